#include "mortcast/annuity.hpp"

#include "mortcast/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mortcast {

ForecastLifeTables life_tables_from_densities(const Matrix& densities, std::vector<int> years,
                                              std::vector<int> ages, double radix) {
  if (static_cast<Eigen::Index>(years.size()) != densities.rows() ||
      static_cast<Eigen::Index>(ages.size()) != densities.cols()) {
    throw DataError("forecast densities do not match the year and age grids");
  }
  ForecastLifeTables t;
  t.years = std::move(years);
  t.ages = std::move(ages);
  t.radix = radix;
  t.dx = densities * radix;
  t.lx.resize(densities.rows(), densities.cols());
  for (Eigen::Index r = 0; r < densities.rows(); ++r) {
    validate_density_row(row_span(densities, r), t.ages);
    // Survivors as the remaining deaths, summed from the oldest age down.
    double remaining = 0.0;
    for (Eigen::Index x = densities.cols() - 1; x >= 0; --x) {
      remaining += t.dx(r, x);
      t.lx(r, x) = remaining;
    }
  }
  return t;
}

CohortSurvival cohort_survival(const ForecastLifeTables& tables, int x, int tau_max) {
  if (tau_max < 0) throw DataError("survival span must be nonnegative");
  if (x < tables.ages.front() || x > tables.ages.back()) throw DataError("entry age outside the table");
  if (tau_max > static_cast<int>(tables.years.size())) {
    throw HorizonExceededError("cohort from age " + std::to_string(x) + " needs " +
                               std::to_string(tau_max) + " forecast years, have " +
                               std::to_string(tables.years.size()));
  }
  const int first_age = tables.ages.front();
  CohortSurvival s;
  s.x = x;
  s.tau_max = tau_max;
  s.p.assign(static_cast<std::size_t>(tau_max) + 1, 0.0);
  s.p[0] = 1.0;
  double log_p = 0.0;
  for (int j = 1; j <= tau_max; ++j) {
    const int age = x + j - 1;
    if (age > tables.ages.back()) {
      // Beyond the open interval nobody survives.
      s.p[static_cast<std::size_t>(j)] = 0.0;
      log_p = -INFINITY;
      continue;
    }
    const Eigen::Index row = j - 1;
    const Eigen::Index col = age - first_age;
    const double l = tables.lx(row, col);
    const double q = l > 0.0 ? std::min(tables.dx(row, col) / l, 1.0) : 1.0;
    log_p += std::log1p(-q);
    s.p[static_cast<std::size_t>(j)] = std::exp(log_p);
  }
  return s;
}

double bond_price(double eta, double tau) {
  if (tau < 0.0) throw DataError("bond maturity must be nonnegative");
  return std::exp(-eta * tau);
}

double annuity_price(const CohortSurvival& survival, const PricingConfig& config, int maturity) {
  if (config.eta < 0.0) throw DataError("interest rate must be nonnegative");
  if (maturity < 0) throw DataError("maturity must be nonnegative");
  if (survival.x + maturity > config.max_age) {
    throw ContractBoundError("age " + std::to_string(survival.x) + " plus maturity " +
                             std::to_string(maturity) + " exceeds " + std::to_string(config.max_age));
  }
  if (maturity > survival.tau_max) throw HorizonExceededError("maturity beyond the survival span");
  double price = 0.0;
  for (int tau = 1; tau <= maturity; ++tau) {
    price += bond_price(config.eta, tau) * survival.p[static_cast<std::size_t>(tau)];
  }
  return price;
}

std::vector<int> default_pricing_ages() { return {60, 65, 70, 75, 80, 85, 90, 95, 100, 105}; }
std::vector<int> default_pricing_maturities() { return {5, 10, 15, 20, 25, 30}; }

std::vector<PriceCell> price_grid(const ForecastLifeTables& tables, Sex sex,
                                  const std::vector<int>& ages, const std::vector<int>& maturities,
                                  const PricingConfig& config) {
  std::vector<PriceCell> cells;
  for (int age : ages) {
    int longest = 0;
    for (int T : maturities) {
      if (age + T <= config.max_age) longest = std::max(longest, T);
    }
    const CohortSurvival s = cohort_survival(tables, age, longest);
    for (int T : maturities) {
      PriceCell c{sex, age, T, config.eta, std::nullopt};
      if (age + T <= config.max_age) c.price = annuity_price(s, config, T);
      cells.push_back(c);
    }
  }
  return cells;
}

}  // namespace mortcast
