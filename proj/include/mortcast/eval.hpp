#pragma once

#include "mortcast/lifetable.hpp"
#include "mortcast/pipeline.hpp"

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mortcast {

inline constexpr double kLogClip = 1e-15;

/// Expanding-window design: the first window trains on
/// [train_start, first_test_year - 1]; each later window adds one year until
/// the training span ends at last_year - 1. Every window forecasts up to
/// last_year, capped at max_horizon.
struct WindowPlan {
  int train_start = 1975;
  int first_test_year = 2007;
  int last_year = 2022;
  int max_horizon = 16;

  int window_count() const { return last_year - first_test_year + 1; }
  int train_end(int window) const { return first_test_year - 1 + window; }
  int horizon_for(int window) const;
  /// Number of forecasts available at horizon h.
  int forecasts_at(int h) const;
  void validate() const;
};

/// Aggregated accuracy for one (method, sex, horizon). Divergences are
/// stored unscaled.
struct MetricCell {
  Method method = Method::CdfUfts;
  Sex sex = Sex::Female;
  std::string selector;
  int h = 1;
  int forecasts = 0;
  double kld = 0.0;
  double jsd = 0.0;
  double score = 0.0;
  double width = 0.0;
  double ecp = 0.0;
  double cpd = 0.0;
  double rmsfe_e0 = 0.0;
  double mafe_e0 = 0.0;
};

/// One forecast curve from one window, kept when per-window detail is asked for.
struct WindowForecast {
  Method method = Method::CdfUfts;
  Sex sex = Sex::Female;
  int train_end = 0;
  int h = 1;
  Vector point;
  Vector lower;
  Vector upper;
  Vector actual;
};

struct MetricReport {
  double alpha = 0.2;
  std::vector<MetricCell> cells;
  std::vector<WindowForecast> windows;

  const MetricCell& at(Method method, Sex sex, int h) const;
};

struct EvaluationOptions {
  std::vector<Method> methods{Method::CdfUfts, Method::CdfMfts, Method::CdfMlfts, Method::Clr};
  ForecastOptions forecast;
  bool keep_forecasts = false;
  /// Execution order of windows (indices into 0..window_count-1); empty
  /// means chronological. The report does not depend on it.
  std::vector<int> window_order;
};

MetricReport run_expanding_window(const LifeTableSeries& female, const LifeTableSeries& male,
                                  const WindowPlan& plan, const EvaluationOptions& options);

/// Symmetric Kullback-Leibler divergence of one pair of curves, summed over
/// ages, with densities clipped below at 1e-15 inside the logarithms.
double kld(std::span<const double> p, std::span<const double> q);

/// Jensen-Shannon divergence against the (unnormalized) geometric mean
/// sqrt(p q), same clipping.
double jsd_geometric(std::span<const double> p, std::span<const double> q);

double interval_score(double lower, double upper, double actual, double alpha);

struct Coverage {
  double ecp = 0.0;
  double cpd = 0.0;
};

Coverage ecp_cpd(std::span<const double> lower, std::span<const double> upper,
                 std::span<const double> actual, double alpha);

struct ErrorSummary {
  double rmsfe = 0.0;
  double mafe = 0.0;
};

/// Life-expectancy forecast errors over paired curves (rows).
ErrorSummary e0_errors(const Matrix& forecasts, const Matrix& actuals, std::span<const int> ages);

}  // namespace mortcast
