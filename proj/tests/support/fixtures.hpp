#pragma once

// Synthetic panels shared by the unit and acceptance tests.

#include "mortcast/lifetable.hpp"
#include "mortcast/synthetic.hpp"
#include "mortcast/types.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace fixture {

/// Life tables whose death densities are exactly the given rows.
inline mortcast::LifeTableSeries from_densities(const mortcast::Matrix& d, mortcast::Sex sex,
                                                int first_year = 1975) {
  using mortcast::Matrix;
  Matrix qx(d.rows(), d.cols());
  for (Eigen::Index t = 0; t < d.rows(); ++t) {
    double alive = 0.0;  // survivors to age x, summed from the top for accuracy
    for (Eigen::Index x = d.cols() - 1; x >= 0; --x) {
      alive += d(t, x);
      qx(t, x) = (x + 1 == d.cols() || alive <= 0.0) ? 1.0 : std::min(1.0, d(t, x) / alive);
    }
  }
  std::vector<int> years;
  for (Eigen::Index t = 0; t < d.rows(); ++t) years.push_back(first_year + static_cast<int>(t));
  return mortcast::rebuild_dx_from_qx(sex, years, qx);
}

/// Smooth unimodal age-at-death density with its mode near `mode`.
inline std::vector<double> base_shape(double mode, double spread = 9.0) {
  std::vector<double> d(mortcast::kAgeCount);
  double s = 0.0;
  for (int x = 0; x < mortcast::kAgeCount; ++x) {
    const double z = (x + 0.5 - mode) / spread;
    // Gumbel-type (left-skewed) shape plus a small infant bump.
    d[static_cast<std::size_t>(x)] = std::exp(z - std::exp(z)) + (x == 0 ? 0.02 : 0.0) + 1e-6;
    s += d[static_cast<std::size_t>(x)];
  }
  for (auto& v : d) v /= s;
  return d;
}

/// Rows drawn independently from Dirichlet(concentration * shape + 1), which
/// keeps every cell away from zero.
inline mortcast::Matrix dirichlet_panel(const std::vector<double>& shape, double concentration,
                                        int years, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  mortcast::Matrix d(years, static_cast<Eigen::Index>(shape.size()));
  for (int t = 0; t < years; ++t) {
    double s = 0.0;
    for (std::size_t x = 0; x < shape.size(); ++x) {
      std::gamma_distribution<double> g(concentration * shape[x] + 1.0, 1.0);
      s += (d(t, static_cast<Eigen::Index>(x)) = std::max(g(rng), 1e-300));
    }
    d.row(t) /= s;
  }
  return d;
}

/// Panel whose modal age drifts upward by `drift` years per year.
inline mortcast::Matrix drifting_panel(double first_mode, double drift, int years) {
  mortcast::Matrix d(years, mortcast::kAgeCount);
  for (int t = 0; t < years; ++t) {
    const auto row = base_shape(first_mode + drift * t);
    for (int x = 0; x < mortcast::kAgeCount; ++x) d(t, x) = row[static_cast<std::size_t>(x)];
  }
  return d;
}

}  // namespace fixture
