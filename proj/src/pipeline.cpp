#include "mortcast/pipeline.hpp"

#include "mortcast/errors.hpp"
#include "mortcast/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace mortcast {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::CdfUfts: return "cdf-ufts";
    case Method::CdfMfts: return "cdf-mfts";
    case Method::CdfMlfts: return "cdf-mlfts";
    case Method::Clr: return "clr";
  }
  return "?";
}

Method parse_method(std::string_view text) {
  for (Method m : {Method::CdfUfts, Method::CdfMfts, Method::CdfMlfts, Method::Clr}) {
    if (text == to_string(m)) return m;
  }
  throw DataError("unknown method '" + std::string(text) + "'");
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  // splitmix64 finalizer over the combined words
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double quantile_select(std::span<double> values, double prob) {
  const double pos = prob * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - static_cast<double>(lo);
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(lo), values.end());
  const double lower = values[lo];
  if (frac == 0.0 || lo + 1 >= values.size()) return lower;
  const double upper = *std::min_element(values.begin() + static_cast<std::ptrdiff_t>(lo) + 1, values.end());
  return lower + frac * (upper - lower);
}

double quantile_sorted(std::span<const double> sorted, double prob) {
  // Linear interpolation between order statistics (Hyndman-Fan type 7).
  const double pos = prob * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

Vector CurveForecaster::mean_curve(int h) const {
  Vector curve = Vector::Zero(center.size());
  for (const auto& layer : layers) {
    curve += layer.mu;
    if (layer.psi.cols() > 0) curve += layer.psi * layer.mean.row(h - 1).transpose();
  }
  return center + scale.cwiseProduct(curve);
}

Vector CurveForecaster::to_density(const Vector& curve) const {
  if (kind == BackTransform::Clr) return clr_inverse(as_span(curve), as_span(clr_alpha));
  const Vector D = inverse_logit_row(as_span(curve));
  return cdf_row_to_density(as_span(D));
}

Matrix CurveForecaster::point() const {
  const Eigen::Index ages = kind == BackTransform::Clr ? center.size() : center.size() + 1;
  Matrix out(horizon, ages);
  for (int h = 1; h <= horizon; ++h) out.row(h - 1) = to_density(mean_curve(h)).transpose();
  return out;
}

IntervalBounds interval_paths(const CurveForecaster& model, int paths, double alpha,
                              std::uint64_t seed) {
  if (paths < 1) throw DataError("path count must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DataError("alpha must lie in (0, 1)");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto pool = model.residual_pool.rows();
  std::uniform_int_distribution<Eigen::Index> pick(0, std::max<Eigen::Index>(pool - 1, 0));

  const Eigen::Index grid = model.center.size();
  const Eigen::Index ages = model.kind == BackTransform::Clr ? grid : grid + 1;
  IntervalBounds out{Matrix(model.horizon, ages), Matrix(model.horizon, ages)};
  Matrix draws(ages, paths);  // one column per path, so each age row is contiguous
  std::vector<double> column(static_cast<std::size_t>(paths));

  for (int h = 1; h <= model.horizon; ++h) {
    for (int b = 0; b < paths; ++b) {
      Vector curve = Vector::Zero(grid);
      for (const auto& layer : model.layers) {
        curve += layer.mu;
        for (Eigen::Index k = 0; k < layer.psi.cols(); ++k) {
          const double sd = std::sqrt(std::max(layer.variance(h - 1, k), 0.0));
          const double eta = layer.mean(h - 1, k) + sd * normal(rng);
          curve += eta * layer.psi.col(k);
        }
      }
      if (pool > 0) curve += model.residual_pool.row(pick(rng)).transpose();
      curve = model.center + model.scale.cwiseProduct(curve);
      draws.col(b) = model.to_density(curve);
    }
    for (Eigen::Index x = 0; x < ages; ++x) {
      for (int b = 0; b < paths; ++b) column[static_cast<std::size_t>(b)] = draws(x, b);
      out.lower(h - 1, x) = quantile_select(column, alpha / 2.0);
      out.upper(h - 1, x) = quantile_select(column, 1.0 - alpha / 2.0);
    }
  }
  return out;
}

ScoreLayer forecast_layer(const FpcaModel& model, int horizon) {
  ScoreLayer layer;
  layer.mu = model.mu;
  layer.psi = model.psi;
  const Eigen::Index k = model.psi.cols();
  layer.mean.resize(horizon, k);
  layer.variance.resize(horizon, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const Vector series = model.scores.col(j);
    EtsFit fit = fit_ets(as_span(series));
    const ScoreForecast fc = forecast_scores(fit, horizon);
    for (int h = 0; h < horizon; ++h) {
      layer.mean(h, j) = fc.mean[static_cast<std::size_t>(h)];
      layer.variance(h, j) = fc.variance[static_cast<std::size_t>(h)];
    }
    layer.fits.push_back(fit);
  }
  return layer;
}

Matrix logit_cdf_panel(const LifeTableSeries& lt, double clip_eps) {
  return logit_transform(cdf_forward(normalize_to_density(lt)), clip_eps).Z;
}

namespace {

void check_history(const LifeTableSeries& lt, const ForecastOptions& options) {
  if (lt.year_count() < kMinTrainingYears) {
    throw InsufficientHistoryError("need at least " + std::to_string(kMinTrainingYears) +
                                   " training years, got " + std::to_string(lt.year_count()));
  }
  if (options.horizon < 1) throw DataError("forecast horizon must be at least 1");
  if (!(options.alpha > 0.0 && options.alpha < 1.0)) throw DataError("alpha must lie in (0, 1)");
}

void check_pair(const LifeTableSeries& f, const LifeTableSeries& m) {
  if (f.years != m.years || f.ages != m.ages) {
    throw DataError("female and male series must share year and age grids");
  }
}

SelectionStage stage_record(std::string name, const FpcaModel& model, const ScoreLayer& layer) {
  SelectionStage s;
  s.name = std::move(name);
  s.k = model.k();
  s.eigenvalues.assign(model.lambda_all.data(), model.lambda_all.data() + model.lambda_all.size());
  for (const auto& fit : layer.fits) s.score_models.emplace_back(to_string(fit.model));
  return s;
}

ForecastResult finish(const CurveForecaster& model, Method method, Sex sex,
                      const LifeTableSeries& lt, const ForecastOptions& options,
                      std::vector<SelectionStage> stages) {
  ForecastResult r;
  r.method = method;
  r.sex = sex;
  r.selector = describe(options.selector);
  r.stages = std::move(stages);
  r.ages = lt.ages;
  for (int h = 1; h <= options.horizon; ++h) r.years.push_back(lt.years.back() + h);
  r.alpha = options.alpha;
  r.point = model.point();
  if (options.intervals) {
    const std::uint64_t stream = static_cast<std::uint64_t>(method) * 2 + (sex == Sex::Male ? 1 : 0);
    IntervalBounds b = interval_paths(model, options.paths, options.alpha,
                                      derive_seed(options.seed, stream));
    r.lower = std::move(b.lower);
    r.upper = std::move(b.upper);
  } else {
    r.lower = r.point;
    r.upper = r.point;
  }
  return r;
}

CurveForecaster single_layer(BackTransform kind, const FpcaModel& model, int horizon,
                             ScoreLayer layer) {
  CurveForecaster c;
  c.kind = kind;
  c.center = Vector::Zero(model.mu.size());
  c.scale = Vector::Ones(model.mu.size());
  c.layers.push_back(std::move(layer));
  c.residual_pool = model.residuals;
  c.horizon = horizon;
  return c;
}

}  // namespace

ForecastResult forecast_cdf(const LifeTableSeries& lt, const ForecastOptions& options) {
  check_history(lt, options);
  const Matrix Z = logit_cdf_panel(lt, options.clip_eps);
  const FpcaModel model = fit_components(Z, options.selector, true);
  ScoreLayer layer = forecast_layer(model, options.horizon);
  std::vector<SelectionStage> stages{stage_record("ufts", model, layer)};
  const CurveForecaster c = single_layer(BackTransform::LogitCdf, model, options.horizon, std::move(layer));
  return finish(c, Method::CdfUfts, lt.sex, lt, options, std::move(stages));
}

SexForecasts forecast_cdf(const LifeTableSeries& female, const LifeTableSeries& male,
                          Method method, const ForecastOptions& options) {
  if (method == Method::Clr) throw DataError("forecast_cdf does not handle the clr method");
  check_history(female, options);
  check_history(male, options);
  check_pair(female, male);
  if (method == Method::CdfUfts) {
    return {forecast_cdf(female, options), forecast_cdf(male, options)};
  }

  const Matrix Zf = logit_cdf_panel(female, options.clip_eps);
  const Matrix Zm = logit_cdf_panel(male, options.clip_eps);
  const int H = options.horizon;

  if (method == Method::CdfMfts) {
    const MftsModel model = fit_mfts(Zf, Zm, options.selector, options.mfts_scaling);
    const ScoreLayer stacked = forecast_layer(model.stacked, H);
    const Eigen::Index p = model.p;
    const SelectionStage stage = stage_record("mfts", model.stacked, stacked);
    auto block = [&](Eigen::Index offset, const Vector& center, const Vector& scale) {
      CurveForecaster c;
      c.kind = BackTransform::LogitCdf;
      c.center = center;
      c.scale = scale;
      ScoreLayer layer;
      layer.mu = stacked.mu.segment(offset, p);
      layer.psi = stacked.psi.middleRows(offset, p);
      layer.mean = stacked.mean;
      layer.variance = stacked.variance;
      layer.fits = stacked.fits;
      c.layers.push_back(std::move(layer));
      c.residual_pool = model.stacked.residuals.middleCols(offset, p);
      c.horizon = H;
      return c;
    };
    const auto& st = model.standardization;
    return {finish(block(0, st.center_f, st.scale_f), method, Sex::Female, female, options, {stage}),
            finish(block(p, st.center_m, st.scale_m), method, Sex::Male, male, options, {stage})};
  }

  const MultilevelModel model = fit_mlfts(Zf, Zm, options.selector);
  const ScoreLayer common = forecast_layer(model.common, H);
  const SelectionStage common_stage = stage_record("common", model.common, common);
  auto sex_model = [&](const Vector& mu, const FpcaModel& resid) {
    CurveForecaster c;
    c.kind = BackTransform::LogitCdf;
    c.center = mu;
    c.scale = Vector::Ones(mu.size());
    c.layers.push_back(common);
    c.layers.push_back(forecast_layer(resid, H));
    c.residual_pool = resid.residuals;
    c.horizon = H;
    return c;
  };
  const CurveForecaster cf = sex_model(model.mu_f, model.resid_f);
  const CurveForecaster cm = sex_model(model.mu_m, model.resid_m);
  return {
      finish(cf, method, Sex::Female, female, options,
             {common_stage, stage_record("female", model.resid_f, cf.layers[1])}),
      finish(cm, method, Sex::Male, male, options,
             {common_stage, stage_record("male", model.resid_m, cm.layers[1])})};
}

ForecastResult forecast_clr(const LifeTableSeries& lt, const ForecastOptions& options) {
  check_history(lt, options);
  const ClrPanel clr = clr_forward(lt.dx, lt.years, lt.ages);
  const FpcaModel model = fit_components(clr.beta, options.selector, true);
  ScoreLayer layer = forecast_layer(model, options.horizon);
  std::vector<SelectionStage> stages{stage_record("clr", model, layer)};
  CurveForecaster c = single_layer(BackTransform::Clr, model, options.horizon, std::move(layer));
  c.clr_alpha = clr.alpha;
  return finish(c, Method::Clr, lt.sex, lt, options, std::move(stages));
}

SexForecasts forecast(Method method, const LifeTableSeries& female, const LifeTableSeries& male,
                      const ForecastOptions& options) {
  if (method == Method::Clr) {
    check_pair(female, male);
    return {forecast_clr(female, options), forecast_clr(male, options)};
  }
  return forecast_cdf(female, male, method, options);
}

nlohmann::json manifest_entry(const ForecastResult& result) {
  nlohmann::json j;
  j["method"] = std::string(to_string(result.method));
  j["sex"] = std::string(to_string(result.sex));
  j["selector"] = result.selector;
  j["alpha"] = result.alpha;
  j["first_year"] = result.years.front();
  j["horizon"] = result.horizon();
  auto stages = nlohmann::json::array();
  for (const auto& s : result.stages) {
    stages.push_back({{"stage", s.name},
                      {"k", s.k},
                      {"eigenvalues", s.eigenvalues},
                      {"score_models", s.score_models}});
  }
  j["stages"] = stages;
  return j;
}

}  // namespace mortcast
