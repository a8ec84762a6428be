#include "mortcast/transforms.hpp"

#include "mortcast/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace mortcast {

double logit(double p) { return std::log(p / (1.0 - p)); }

double sigmoid(double z) {
  if (z > 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

CdfPanel cdf_forward(const DensityPanel& d) {
  CdfPanel out{d.years, d.ages, Matrix(d.d.rows(), d.d.cols())};
  for (Eigen::Index t = 0; t < d.d.rows(); ++t) {
    validate_density_row(row_span(d.d, t), d.ages);
    double running = 0.0;
    for (Eigen::Index x = 0; x < d.d.cols(); ++x) {
      running += d.d(t, x);
      out.D(t, x) = std::min(running, 1.0);
    }
    out.D(t, d.d.cols() - 1) = 1.0;
  }
  return out;
}

LogitPanel logit_transform(const CdfPanel& cdf, double clip_eps) {
  if (!(clip_eps > 0.0 && clip_eps <= 1e-6)) {
    throw DataError("clip_eps must lie in (0, 1e-6]");
  }
  const Eigen::Index interior = cdf.D.cols() - 1;
  if (interior < 1) throw DataError("CDF panel needs at least two ages");
  LogitPanel out;
  out.years = cdf.years;
  out.ages.assign(cdf.ages.begin(), cdf.ages.end() - 1);
  out.Z.resize(cdf.D.rows(), interior);
  // 1 - clip_eps is not exact in binary, so the clipped ends are evaluated
  // in closed form rather than through the clamped value.
  const double z_max = std::log1p(-clip_eps) - std::log(clip_eps);
  for (Eigen::Index t = 0; t < cdf.D.rows(); ++t) {
    for (Eigen::Index x = 0; x < interior; ++x) {
      const double p = cdf.D(t, x);
      if (p <= clip_eps) out.Z(t, x) = -z_max;
      else if (p >= 1.0 - clip_eps) out.Z(t, x) = z_max;
      else out.Z(t, x) = logit(p);
    }
  }
  return out;
}

void isotonic_increasing(std::span<double> values) {
  // Pool adjacent violators over blocks of (mean, weight).
  std::vector<double> mean;
  std::vector<std::size_t> weight;
  mean.reserve(values.size());
  weight.reserve(values.size());
  for (double v : values) {
    mean.push_back(v);
    weight.push_back(1);
    while (mean.size() > 1 && mean[mean.size() - 2] > mean.back()) {
      const std::size_t w = weight[weight.size() - 2] + weight.back();
      const double m = (mean[mean.size() - 2] * static_cast<double>(weight[weight.size() - 2]) +
                        mean.back() * static_cast<double>(weight.back())) /
                       static_cast<double>(w);
      mean.pop_back();
      weight.pop_back();
      mean.back() = m;
      weight.back() = w;
    }
  }
  std::size_t pos = 0;
  for (std::size_t b = 0; b < mean.size(); ++b) {
    for (std::size_t k = 0; k < weight[b]; ++k) values[pos++] = mean[b];
  }
}

Vector inverse_logit_row(std::span<const double> z) {
  const auto interior = static_cast<Eigen::Index>(z.size());
  Vector D(interior + 1);
  for (Eigen::Index x = 0; x < interior; ++x) D[x] = sigmoid(z[static_cast<std::size_t>(x)]);
  isotonic_increasing({D.data(), static_cast<std::size_t>(interior)});
  for (Eigen::Index x = 0; x < interior; ++x) D[x] = std::clamp(D[x], 0.0, 1.0);
  D[interior] = 1.0;
  return D;
}

CdfPanel inverse_logit(const LogitPanel& logits) {
  CdfPanel out;
  out.years = logits.years;
  out.ages = logits.ages;
  out.ages.push_back(logits.ages.empty() ? 0 : logits.ages.back() + 1);
  out.D.resize(logits.Z.rows(), logits.Z.cols() + 1);
  for (Eigen::Index t = 0; t < logits.Z.rows(); ++t) {
    out.D.row(t) = inverse_logit_row(row_span(logits.Z, t)).transpose();
  }
  return out;
}

Vector cdf_row_to_density(std::span<const double> D) {
  Vector d(static_cast<Eigen::Index>(D.size()));
  double previous = 0.0;
  for (std::size_t x = 0; x < D.size(); ++x) {
    if (D[x] < previous) throw DataError("CDF row is not non-decreasing");
    d[static_cast<Eigen::Index>(x)] = D[x] - previous;
    previous = D[x];
  }
  return d;
}

DensityPanel cdf_to_density(const CdfPanel& cdf) {
  DensityPanel out{cdf.years, cdf.ages, Matrix(cdf.D.rows(), cdf.D.cols())};
  for (Eigen::Index t = 0; t < cdf.D.rows(); ++t) {
    out.d.row(t) = cdf_row_to_density(row_span(cdf.D, t)).transpose();
  }
  return out;
}

ClrPanel clr_forward(const Matrix& dx, std::vector<int> years, std::vector<int> ages) {
  if (years.empty()) {
    years.resize(static_cast<std::size_t>(dx.rows()));
    std::iota(years.begin(), years.end(), 0);
  }
  if (ages.empty()) ages = standard_ages(static_cast<int>(dx.cols()) - 1);
  if (dx.rows() < 1 || dx.cols() < 1) throw DataError("empty death-count panel");
  for (Eigen::Index t = 0; t < dx.rows(); ++t) {
    for (Eigen::Index x = 0; x < dx.cols(); ++x) {
      if (!(dx(t, x) > 0.0)) {
        throw ZeroCountError(years[static_cast<std::size_t>(t)], ages[static_cast<std::size_t>(x)]);
      }
    }
  }
  const Matrix logs = dx.array().log().matrix();
  const Vector log_alpha = logs.colwise().mean().transpose();
  ClrPanel out;
  out.years = std::move(years);
  out.ages = std::move(ages);
  out.alpha = log_alpha.array().exp().matrix();
  out.beta = logs.rowwise() - log_alpha.transpose();
  return out;
}

Vector clr_inverse(std::span<const double> beta, std::span<const double> alpha) {
  if (beta.size() != alpha.size()) throw DataError("clr_inverse: length mismatch");
  Vector draft(static_cast<Eigen::Index>(beta.size()));
  for (std::size_t x = 0; x < beta.size(); ++x) {
    if (!std::isfinite(beta[x]) || beta[x] > 700.0) {
      throw DivergentForecastError("clr forecast diverged at age index " + std::to_string(x));
    }
    if (!(alpha[x] > 0.0)) throw DataError("clr_inverse: geometric means must be positive");
    draft[static_cast<Eigen::Index>(x)] = std::exp(beta[x]) * alpha[x];
  }
  return draft / draft.sum();
}

}  // namespace mortcast
