#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace mortcast {

/// Additive-error, non-seasonal exponential smoothing variants.
enum class EtsModel {
  ANN,  // simple exponential smoothing
  AAN,  // additive (Holt) trend
  AAdN  // damped additive trend
};

std::string_view to_string(EtsModel model);

struct EtsParams {
  double alpha = 0.5;  // level smoothing, (0, 1)
  double beta = 0.0;   // trend smoothing, (0, alpha]
  double phi = 1.0;    // damping, (0.8, 0.98]
};

struct EtsFit {
  EtsModel model = EtsModel::ANN;
  EtsParams params;
  double level = 0.0;  // final states
  double trend = 0.0;
  double sigma2 = 0.0;
  double loglik = 0.0;
  double aicc = 0.0;
  int n = 0;
};

struct ScoreForecast {
  std::vector<double> mean;
  std::vector<double> variance;
};

/// Fits ANN (n >= 4), AAN and AAdN (n >= 8) by maximizing the Gaussian
/// innovations likelihood and returns the candidate with the lowest AICc.
EtsFit fit_ets(std::span<const double> series);

/// Fits one candidate. Throws FitFailureError when the model cannot be
/// estimated from the series.
EtsFit fit_ets_model(std::span<const double> series, EtsModel model);

ScoreForecast forecast_scores(const EtsFit& fit, int horizon);

}  // namespace mortcast
