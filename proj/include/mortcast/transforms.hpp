#pragma once

#include "mortcast/lifetable.hpp"
#include "mortcast/types.hpp"

#include <span>
#include <vector>

namespace mortcast {

inline constexpr double kDefaultClipEps = 1e-10;

/// Cumulative age-at-death distributions; the last column is exactly 1.
struct CdfPanel {
  std::vector<int> years;
  std::vector<int> ages;
  Matrix D;
};

/// Logits of the interior CDF points (all ages but the open interval, whose
/// CDF value is identically 1).
struct LogitPanel {
  std::vector<int> years;
  std::vector<int> ages;  // interior ages only
  Matrix Z;
};

/// Centred log-ratios of death counts against their per-age geometric mean
/// over years.
struct ClrPanel {
  std::vector<int> years;
  std::vector<int> ages;
  Matrix beta;
  Vector alpha;
};

CdfPanel cdf_forward(const DensityPanel& d);

LogitPanel logit_transform(const CdfPanel& cdf, double clip_eps = kDefaultClipEps);

/// Maps logits back to CDF rows: overflow-safe sigmoid on the interior, a
/// monotone (pool-adjacent-violators) fit per row, then the terminal 1.
CdfPanel inverse_logit(const LogitPanel& logits);

/// Single-curve form of inverse_logit; returns the full CDF including the
/// terminal point.
Vector inverse_logit_row(std::span<const double> z);

DensityPanel cdf_to_density(const CdfPanel& cdf);

/// First differences of one CDF row (terminal point included).
Vector cdf_row_to_density(std::span<const double> D);

/// Least-squares non-decreasing fit with unit weights.
void isotonic_increasing(std::span<double> values);

ClrPanel clr_forward(const Matrix& dx, std::vector<int> years = {}, std::vector<int> ages = {});

/// exp(beta) * alpha renormalized to a density. Entries of beta above 700
/// are treated as a divergent forecast.
Vector clr_inverse(std::span<const double> beta, std::span<const double> alpha);

double logit(double p);
double sigmoid(double z);

}  // namespace mortcast
