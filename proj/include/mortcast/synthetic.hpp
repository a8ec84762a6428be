#pragma once

#include "mortcast/lifetable.hpp"

#include <cstdint>

namespace mortcast {

/// Parameters of a synthetic period life-table panel. The hazard at age x in
/// year index t is
///
///   mu(x, t) = [child * exp(-child_decay x) + makeham
///               + g(x)] * exp(-k_t) * exp(noise_sd z)
///
/// where g(x) = G / (1 + G / plateau), G = gompertz_a * exp(gompertz_b x),
/// levels the senescent hazard off at the oldest ages as real tables do.
/// with k_t = improvement * t + a Gaussian random walk of step walk_sd
/// (common to all ages) and z an independent standard normal per cell.
/// Death probabilities are q = 1 - exp(-mu), with q = 1 at the open age.
struct SyntheticSpec {
  Sex sex = Sex::Female;
  int first_year = 1975;
  int years = 48;
  double child = 0.01;
  double child_decay = 1.2;
  double makeham = 2e-4;
  double gompertz_a = 2.5e-5;
  double gompertz_b = 0.105;
  double plateau = 0.7;
  double improvement = 0.015;
  double walk_sd = 0.02;
  double noise_sd = 0.03;
  std::uint64_t seed = 7;
};

/// Defaults calibrated loosely to a long-lived population; females get a
/// lower Gompertz level than males.
SyntheticSpec default_synthetic(Sex sex, std::uint64_t seed = 7);

LifeTableSeries synthetic_life_tables(const SyntheticSpec& spec);

}  // namespace mortcast
