#pragma once

#include "mortcast/fpca.hpp"
#include "mortcast/lifetable.hpp"
#include "mortcast/scorefc.hpp"
#include "mortcast/types.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mortcast {

enum class Method { CdfUfts, CdfMfts, CdfMlfts, Clr };

std::string_view to_string(Method method);
Method parse_method(std::string_view text);

inline constexpr int kMinTrainingYears = 16;

struct ForecastOptions {
  ComponentSelector selector = FixedK{6};
  int horizon = 16;
  double alpha = 0.2;
  int paths = 5000;
  std::uint64_t seed = 1;
  double clip_eps = 1e-10;
  MftsScaling mfts_scaling = MftsScaling::PerAge;
  bool intervals = true;
};

/// What the component selector decided, stage by stage (one stage for
/// UFTS/MFTS/clr; common + sex-specific for the multilevel model).
struct SelectionStage {
  std::string name;
  int k = 0;
  std::vector<double> eigenvalues;  // full spectrum
  std::vector<std::string> score_models;
};

struct ForecastResult {
  Method method = Method::CdfUfts;
  Sex sex = Sex::Female;
  std::string selector;
  std::vector<SelectionStage> stages;
  std::vector<int> years;  // forecast years, one per horizon
  std::vector<int> ages;
  Matrix point;  // H x ages, densities
  Matrix lower;
  Matrix upper;
  double alpha = 0.2;

  int horizon() const { return static_cast<int>(point.rows()); }
};

struct SexForecasts {
  ForecastResult female;
  ForecastResult male;
};

/// Score forecasts for one principal-component block.
struct ScoreLayer {
  Vector mu;
  Matrix psi;       // grid x K
  Matrix mean;      // H x K
  Matrix variance;  // H x K
  std::vector<EtsFit> fits;
};

enum class BackTransform { LogitCdf, Clr };

/// Transformed-space forecast model of one series:
///   curve_h = center + scale * (sum over layers of (mu + psi eta_h) + eps)
/// where eta_h are the score forecasts and eps a resampled in-sample
/// residual curve, followed by the back-transform to a density.
struct CurveForecaster {
  BackTransform kind = BackTransform::LogitCdf;
  Vector center;
  Vector scale;
  std::vector<ScoreLayer> layers;
  Matrix residual_pool;  // n x grid
  Vector clr_alpha;      // geometric means, clr only
  int horizon = 0;

  Vector mean_curve(int h) const;  // h is 1-based
  Vector to_density(const Vector& curve) const;
  Matrix point() const;
};

struct IntervalBounds {
  Matrix lower;
  Matrix upper;
};

/// Pointwise alpha/2 and 1 - alpha/2 quantiles (per horizon and age) of
/// simulated density paths: Gaussian score draws with the exponential
/// smoothing forecast mean and variance, plus a residual curve drawn with
/// replacement from the in-sample residuals. Deterministic given the seed.
IntervalBounds interval_paths(const CurveForecaster& model, int paths, double alpha,
                              std::uint64_t seed);

ScoreLayer forecast_layer(const FpcaModel& model, int horizon);

/// Univariate CDF-transformation forecast of one sex.
ForecastResult forecast_cdf(const LifeTableSeries& lt, const ForecastOptions& options);

/// CDF-transformation forecast of both sexes with the chosen variant
/// (CdfUfts fits each sex separately).
SexForecasts forecast_cdf(const LifeTableSeries& female, const LifeTableSeries& male,
                          Method method, const ForecastOptions& options);

/// Centred log-ratio benchmark forecast of one sex.
ForecastResult forecast_clr(const LifeTableSeries& lt, const ForecastOptions& options);

/// Dispatches on method; always returns both sexes.
SexForecasts forecast(Method method, const LifeTableSeries& female, const LifeTableSeries& male,
                      const ForecastOptions& options);

/// Logit-CDF panel of a life-table series (interior ages only).
Matrix logit_cdf_panel(const LifeTableSeries& lt, double clip_eps);

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

/// Type-7 quantile of an ascending sample.
double quantile_sorted(std::span<const double> sorted, double prob);

/// Type-7 quantile by selection; reorders values.
double quantile_select(std::span<double> values, double prob);

nlohmann::json manifest_entry(const ForecastResult& result);

}  // namespace mortcast
