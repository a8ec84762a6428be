#include "mortcast/scorefc.hpp"

#include "mortcast/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace mortcast {

std::string_view to_string(EtsModel model) {
  switch (model) {
    case EtsModel::ANN: return "ANN";
    case EtsModel::AAN: return "AAN";
    case EtsModel::AAdN: return "AAdN";
  }
  return "?";
}

namespace {

constexpr double kAlphaLo = 1e-4;
constexpr double kAlphaHi = 1.0 - 1e-4;
constexpr double kBetaLo = 1e-4;
constexpr double kPhiLo = 0.8 + 1e-4;
constexpr double kPhiHi = 0.98;

bool has_trend(EtsModel m) { return m != EtsModel::ANN; }

struct FilterResult {
  double sse = 0.0;
  double level = 0.0;
  double trend = 0.0;
};

struct States {
  double level = 0.0;
  double trend = 0.0;
};

// One pass of the innovations filter from the given initial states. When
// `errors` is non-null the one-step errors are written there.
FilterResult filter_from(std::span<const double> y, EtsModel model, const EtsParams& p, States s0,
                         double* errors) {
  FilterResult r;
  r.level = s0.level;
  r.trend = has_trend(model) ? s0.trend : 0.0;
  const double phi = model == EtsModel::AAdN ? p.phi : 1.0;
  const double beta = has_trend(model) ? p.beta : 0.0;
  for (std::size_t t = 0; t < y.size(); ++t) {
    const double damped = phi * r.trend;
    const double e = y[t] - (r.level + damped);
    if (errors != nullptr) errors[t] = e;
    r.sse += e * e;
    r.level = r.level + damped + p.alpha * e;
    r.trend = damped + beta * e;
  }
  return r;
}

// The one-step errors are affine in the initial states, so for fixed
// smoothing parameters the least-squares initial states have a closed form.
States best_initial_states(std::span<const double> y, EtsModel model, const EtsParams& p) {
  const std::size_t n = y.size();
  thread_local std::vector<double> e0, el, eb, zeros;
  e0.resize(n);
  el.resize(n);
  eb.resize(n);
  zeros.assign(n, 0.0);
  filter_from(y, model, p, {}, e0.data());
  filter_from(zeros, model, p, {1.0, 0.0}, el.data());
  double ll = 0.0, l0 = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    ll += el[t] * el[t];
    l0 += el[t] * e0[t];
  }
  const States level_only{ll > 0.0 ? -l0 / ll : y[0], 0.0};
  if (!has_trend(model)) return level_only;
  filter_from(zeros, model, p, {0.0, 1.0}, eb.data());
  double lb = 0.0, bb = 0.0, b0 = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    lb += el[t] * eb[t];
    bb += eb[t] * eb[t];
    b0 += eb[t] * e0[t];
  }
  const double det = ll * bb - lb * lb;
  if (!(det > 1e-12 * ll * bb)) return level_only;
  return {(-l0 * bb + b0 * lb) / det, (-b0 * ll + l0 * lb) / det};
}

FilterResult run_filter(std::span<const double> y, EtsModel model, const EtsParams& p) {
  return filter_from(y, model, p, best_initial_states(y, model, p), nullptr);
}

int parameter_count(EtsModel m) {
  switch (m) {
    case EtsModel::ANN: return 3;   // alpha, l0, sigma
    case EtsModel::AAN: return 5;   // alpha, beta, l0, b0, sigma
    case EtsModel::AAdN: return 6;  // alpha, beta, phi, l0, b0, sigma
  }
  return 0;
}

// Coordinate search over (alpha, beta, phi) on a lattice of the given step,
// restricted to [centre - radius, centre + radius] within the admissible box.
class Optimizer {
public:
  Optimizer(std::span<const double> y, EtsModel model) : y_(y), model_(model) {}

  double sse(const EtsParams& p) {
    const double v = run_filter(y_, model_, p).sse;
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  }

  EtsParams optimize() {
    EtsParams best = coarse_start();
    double best_sse = sse(best);
    const std::array<double, 3> steps{0.01, 0.001, 0.0001};
    const std::array<double, 3> radii{1.0, 0.01, 0.001};
    for (std::size_t pass = 0; pass < steps.size(); ++pass) {
      for (int sweep = 0; sweep < 50; ++sweep) {
        bool improved = false;
        improved |= line_search(best, best_sse, Coord::Alpha, steps[pass], radii[pass]);
        if (has_trend(model_)) {
          improved |= line_search(best, best_sse, Coord::Beta, steps[pass], radii[pass]);
        }
        if (model_ == EtsModel::AAdN) {
          improved |= line_search(best, best_sse, Coord::Phi, steps[pass], radii[pass]);
        }
        if (!improved) break;
      }
    }
    return best;
  }

private:
  enum class Coord { Alpha, Beta, Phi };

  EtsParams coarse_start() {
    EtsParams best{0.5, has_trend(model_) ? 0.1 : 0.0, model_ == EtsModel::AAdN ? 0.9 : 1.0};
    double best_sse = std::numeric_limits<double>::infinity();
    const std::array<double, 3> phis{0.82, 0.9, 0.98};
    const int phi_count = model_ == EtsModel::AAdN ? 3 : 1;
    for (int ai = 1; ai <= 9; ++ai) {
      const double a = 0.1 * ai;
      const int beta_count = has_trend(model_) ? ai : 1;
      for (int bi = 0; bi < beta_count; ++bi) {
        const double b = has_trend(model_) ? std::max(kBetaLo, 0.1 * bi) : 0.0;
        for (int pi = 0; pi < phi_count; ++pi) {
          const EtsParams cand{a, b, model_ == EtsModel::AAdN ? phis[pi] : 1.0};
          const double v = sse(cand);
          if (v < best_sse) {
            best_sse = v;
            best = cand;
          }
        }
      }
    }
    return best;
  }

  bool line_search(EtsParams& best, double& best_sse, Coord coord, double step, double radius) {
    double lo = 0.0;
    double hi = 0.0;
    double centre = 0.0;
    switch (coord) {
      case Coord::Alpha:
        lo = has_trend(model_) ? std::max(kAlphaLo, best.beta) : kAlphaLo;
        hi = kAlphaHi;
        centre = best.alpha;
        break;
      case Coord::Beta:
        lo = kBetaLo;
        hi = best.alpha;
        centre = best.beta;
        break;
      case Coord::Phi:
        lo = kPhiLo;
        hi = kPhiHi;
        centre = best.phi;
        break;
    }
    lo = std::max(lo, centre - radius);
    hi = std::min(hi, centre + radius);
    bool improved = false;
    const EtsParams base = best;
    // Lattice anchored at multiples of the step, plus both bounds.
    const double first = std::ceil(lo / step) * step;
    auto try_value = [&](double v) {
      v = std::clamp(v, lo, hi);
      EtsParams cand = base;
      switch (coord) {
        case Coord::Alpha: cand.alpha = v; break;
        case Coord::Beta: cand.beta = v; break;
        case Coord::Phi: cand.phi = v; break;
      }
      const double s = sse(cand);
      if (s < best_sse) {
        best_sse = s;
        best = cand;
        improved = true;
      }
    };
    try_value(lo);
    for (int i = 0;; ++i) {
      const double v = first + i * step;
      if (v > hi) break;
      try_value(v);
    }
    try_value(hi);
    return improved;
  }

  std::span<const double> y_;
  EtsModel model_;
};

double variance_floor(std::span<const double> y) {
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double var = 0.0;
  for (double v : y) var += (v - mean) * (v - mean);
  var /= static_cast<double>(y.size());
  return std::max(1e-20 * var, 1e-300);
}

}  // namespace

EtsFit fit_ets_model(std::span<const double> series, EtsModel model) {
  const std::size_t n = series.size();
  const std::size_t needed = has_trend(model) ? 8 : 4;
  if (n < needed) {
    throw InsufficientHistoryError(std::string(to_string(model)) + " needs at least " +
                          std::to_string(needed) + " observations");
  }
  for (double v : series) {
    if (!std::isfinite(v)) throw FitFailureError("series contains non-finite values");
  }
  Optimizer opt(series, model);
  EtsFit fit;
  fit.model = model;
  fit.params = opt.optimize();
  if (!has_trend(model)) fit.params.beta = 0.0;
  if (model != EtsModel::AAdN) fit.params.phi = 1.0;
  const FilterResult r = run_filter(series, model, fit.params);
  if (!std::isfinite(r.sse)) throw FitFailureError("non-finite likelihood");
  fit.level = r.level;
  fit.trend = r.trend;
  fit.n = static_cast<int>(n);
  const double nn = static_cast<double>(n);
  fit.sigma2 = r.sse / nn;
  const double s2 = std::max(fit.sigma2, variance_floor(series));
  fit.loglik = -0.5 * nn * (std::log(2.0 * std::numbers::pi * s2) + 1.0);
  const double k = parameter_count(model);
  // With too few observations the small-sample correction is undefined.
  fit.aicc = nn - k - 1.0 > 0.0
                 ? -2.0 * fit.loglik + 2.0 * k + 2.0 * k * (k + 1.0) / (nn - k - 1.0)
                 : std::numeric_limits<double>::infinity();
  return fit;
}

EtsFit fit_ets(std::span<const double> series) {
  if (series.size() < 4) throw InsufficientHistoryError("exponential smoothing needs at least 4 observations");
  EtsFit best;
  bool found = false;
  for (EtsModel m : {EtsModel::ANN, EtsModel::AAN, EtsModel::AAdN}) {
    if (has_trend(m) && series.size() < 8) continue;
    EtsFit cand;
    try {
      cand = fit_ets_model(series, m);
    } catch (const FitFailureError&) {
      continue;
    }
    if (!std::isfinite(cand.loglik)) continue;
    if (!found || cand.aicc < best.aicc) {
      best = cand;
      found = true;
    }
  }
  if (!found) throw FitFailureError("no exponential smoothing candidate produced a finite likelihood");
  return best;
}

ScoreForecast forecast_scores(const EtsFit& fit, int horizon) {
  if (horizon < 1) throw DataError("forecast horizon must be at least 1");
  ScoreForecast out;
  out.mean.reserve(static_cast<std::size_t>(horizon));
  out.variance.reserve(static_cast<std::size_t>(horizon));
  const double phi = fit.model == EtsModel::AAdN ? fit.params.phi : 1.0;
  const double beta = fit.model == EtsModel::ANN ? 0.0 : fit.params.beta;
  const double trend = fit.model == EtsModel::ANN ? 0.0 : fit.trend;
  double phi_power = 1.0;
  double phi_sum = 0.0;  // phi + phi^2 + ... + phi^h
  double psi_sum = 0.0;  // sum_{j<h} c_j^2, with c_j = alpha + beta (phi + ... + phi^j)
  for (int h = 1; h <= horizon; ++h) {
    if (h > 1) {
      const double c = fit.params.alpha + beta * phi_sum;
      psi_sum += c * c;
    }
    phi_power *= phi;
    phi_sum += phi_power;
    out.mean.push_back(fit.level + phi_sum * trend);
    out.variance.push_back(fit.sigma2 * (1.0 + psi_sum));
  }
  return out;
}

}  // namespace mortcast
