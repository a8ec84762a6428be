#include "mortcast/synthetic.hpp"

#include "mortcast/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace mortcast {

SyntheticSpec default_synthetic(Sex sex, std::uint64_t seed) {
  SyntheticSpec s;
  s.sex = sex;
  s.seed = seed;
  if (sex == Sex::Male) {
    s.child = 0.012;
    s.makeham = 5e-4;
    s.gompertz_a = 6e-5;
    s.gompertz_b = 0.098;
    s.improvement = 0.013;
  }
  return s;
}

LifeTableSeries synthetic_life_tables(const SyntheticSpec& spec) {
  if (spec.years < 1) throw DataError("synthetic panel needs at least one year");
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix qx(spec.years, kAgeCount);
  std::vector<int> years;
  double walk = 0.0;
  for (int t = 0; t < spec.years; ++t) {
    years.push_back(spec.first_year + t);
    if (t > 0) walk += spec.walk_sd * normal(rng);
    const double level = std::exp(-(spec.improvement * t + walk));
    for (int x = 0; x < kOpenAge; ++x) {
      const double gompertz = spec.gompertz_a * std::exp(spec.gompertz_b * x);
      const double base = spec.child * std::exp(-spec.child_decay * x) + spec.makeham +
                          gompertz / (1.0 + gompertz / spec.plateau);
      const double hazard = base * level * std::exp(spec.noise_sd * normal(rng));
      qx(t, x) = std::clamp(1.0 - std::exp(-hazard), 0.0, 1.0);
    }
    qx(t, kOpenAge) = 1.0;
  }
  return rebuild_dx_from_qx(spec.sex, std::move(years), qx);
}

}  // namespace mortcast
