#pragma once

#include "mortcast/types.hpp"

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace mortcast {

enum class Sex { Female, Male };

std::string_view to_string(Sex sex);
Sex parse_sex(std::string_view text);

inline constexpr int kOpenAge = 110;
inline constexpr int kAgeCount = kOpenAge + 1;
inline constexpr double kDefaultRadix = 1e5;

/// Yearly period life tables for one sex. Row t holds calendar year years[t];
/// column x holds age ages[x], the last column being the open interval.
/// Death counts are kept in full floating precision.
struct LifeTableSeries {
  Sex sex = Sex::Female;
  std::vector<int> years;
  std::vector<int> ages;
  Matrix qx;
  Matrix lx;
  Matrix dx;
  double radix = kDefaultRadix;
  /// Fraction of the last year lived by those dying at each age, when the
  /// source file provided it. Not used by the default calculations.
  std::optional<Matrix> ax;

  Eigen::Index year_count() const { return static_cast<Eigen::Index>(years.size()); }
  Eigen::Index age_count() const { return static_cast<Eigen::Index>(ages.size()); }

  /// Rows whose year lies in [first_year, last_year].
  LifeTableSeries slice_years(int first_year, int last_year) const;
};

/// Age-at-death distributions: every row is nonnegative and sums to one.
struct DensityPanel {
  std::vector<int> years;
  std::vector<int> ages;
  Matrix d;
};

/// Rebuilds survivors and death counts from death probabilities with the
/// recurrence d = l q, l' = l - d, starting from the radix. The last age
/// column must be the open interval (q = 1).
LifeTableSeries rebuild_dx_from_qx(Sex sex, std::vector<int> years, const Matrix& qx,
                                   double radix = kDefaultRadix);

/// Convenience overload: years are numbered 0..n-1.
LifeTableSeries rebuild_dx_from_qx(const Matrix& qx, double radix = kDefaultRadix);

DensityPanel normalize_to_density(const LifeTableSeries& lt);

/// Throws DataError unless the row is a density (nonnegative, unit sum
/// within tol) of the same length as ages.
void validate_density_row(std::span<const double> d, std::span<const int> ages,
                          double tol = 1e-9);

/// Life expectancy at birth with every death placed mid-interval.
double life_expectancy(std::span<const double> d, std::span<const int> ages);

/// Life expectancy using a per-age fraction of the interval lived by decedents.
double life_expectancy(std::span<const double> d, std::span<const int> ages,
                       std::span<const double> ax);

/// Conventional Gini concentration of ages at death (0 = all deaths at one age).
double gini_concentration(std::span<const double> d, std::span<const int> ages);

/// 1 - gini_concentration: approaches 1 when deaths concentrate at one age.
double gini_equality_index(std::span<const double> d, std::span<const int> ages);

/// Age with the largest density; ties resolve to the youngest age.
int modal_age(std::span<const double> d, std::span<const int> ages);

std::vector<int> standard_ages(int open_age = kOpenAge);

}  // namespace mortcast
