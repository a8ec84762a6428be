#pragma once

#include "mortcast/lifetable.hpp"
#include "mortcast/types.hpp"

#include <optional>
#include <vector>

namespace mortcast {

struct PricingConfig {
  double eta = 0.0025;  // continuously compounded annual rate
  int max_age = kOpenAge;
};

/// Forecast period life tables, one row per calendar year.
struct ForecastLifeTables {
  std::vector<int> years;
  std::vector<int> ages;
  Matrix lx;
  Matrix dx;
  double radix = kDefaultRadix;
};

/// Scales forecast densities (rows) to survivors and deaths per radix.
ForecastLifeTables life_tables_from_densities(const Matrix& densities, std::vector<int> years,
                                              std::vector<int> ages, double radix = kDefaultRadix);

/// p[tau] = probability that a life aged x at the start of the first
/// forecast year survives tau more years, following the cohort diagonal.
struct CohortSurvival {
  int x = 0;
  int tau_max = 0;
  std::vector<double> p;
};

CohortSurvival cohort_survival(const ForecastLifeTables& tables, int x, int tau_max);

double bond_price(double eta, double tau);

/// Single-premium temporary immediate annuity paying 1 per year for up to T
/// years.
double annuity_price(const CohortSurvival& survival, const PricingConfig& config, int maturity);

struct PriceCell {
  Sex sex = Sex::Female;
  int age = 0;
  int maturity = 0;
  double eta = 0.0;
  std::optional<double> price;  // empty where age + maturity exceeds the table
};

std::vector<int> default_pricing_ages();       // 60, 65, ..., 105
std::vector<int> default_pricing_maturities(); // 5, 10, ..., 30

std::vector<PriceCell> price_grid(const ForecastLifeTables& tables, Sex sex,
                                  const std::vector<int>& ages, const std::vector<int>& maturities,
                                  const PricingConfig& config);

}  // namespace mortcast
