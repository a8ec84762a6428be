#pragma once

// Slow, independent reference implementations used only by the tests. None of
// these share code with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

using Grid = std::vector<std::vector<double>>;

/// Sequential life-table recurrence, one age at a time.
inline std::pair<std::vector<double>, std::vector<double>> life_table(const std::vector<double>& q,
                                                                      double radix) {
  std::vector<double> l(q.size()), d(q.size());
  double alive = radix;
  for (std::size_t x = 0; x < q.size(); ++x) {
    l[x] = alive;
    d[x] = alive * q[x];
    alive -= d[x];
  }
  return {l, d};
}

/// Brute-force Gini concentration of ages at death at midpoints.
inline double gini_pairwise(const std::vector<double>& d, const std::vector<int>& ages) {
  double mean = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) mean += d[i] * (ages[i] + 0.5);
  double s = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = 0; j < d.size(); ++j)
      s += d[i] * d[j] * std::abs(static_cast<double>(ages[i] - ages[j]));
  return s / (2.0 * mean);
}

inline double kld_direct(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double a = std::max(p[i], 1e-15), b = std::max(q[i], 1e-15);
    s += p[i] * std::log(a / b) + q[i] * std::log(b / a);
  }
  return s;
}

/// Explicit sample covariance with divisor n - 1.
inline Grid covariance(const Grid& z) {
  const std::size_t n = z.size(), p = z[0].size();
  std::vector<double> mu(p, 0.0);
  for (const auto& row : z)
    for (std::size_t j = 0; j < p; ++j) mu[j] += row[j] / static_cast<double>(n);
  Grid c(p, std::vector<double>(p, 0.0));
  for (std::size_t a = 0; a < p; ++a)
    for (std::size_t b = 0; b < p; ++b) {
      double s = 0.0;
      for (const auto& row : z) s += (row[a] - mu[a]) * (row[b] - mu[b]);
      c[a][b] = s / static_cast<double>(n - 1);
    }
  return c;
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns
/// eigenvalues in descending order and the matching eigenvectors as columns
/// of v (v[row][col]).
inline std::pair<std::vector<double>, Grid> jacobi_eigen(Grid a) {
  const std::size_t n = a.size();
  Grid v(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a[i][j] * a[i][j];
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a[x][x] > a[y][y]; });
  std::vector<double> vals(n);
  Grid vecs(n, std::vector<double>(n));
  for (std::size_t c = 0; c < n; ++c) {
    vals[c] = a[order[c]][order[c]];
    for (std::size_t r = 0; r < n; ++r) vecs[r][c] = v[r][order[c]];
  }
  return {vals, vecs};
}

/// Random strictly positive density with at least `floor` mass per cell.
inline std::vector<double> random_density(std::mt19937_64& rng, std::size_t n, double floor = 0.0) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> d(n);
  double s = 0.0;
  for (auto& v : d) s += (v = e(rng));
  const double free_mass = 1.0 - floor * static_cast<double>(n);
  for (auto& v : d) v = floor + free_mass * v / s;
  return d;
}

}  // namespace oracle
