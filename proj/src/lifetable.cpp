#include "mortcast/lifetable.hpp"

#include "mortcast/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

namespace mortcast {

std::string_view to_string(Sex sex) {
  return sex == Sex::Female ? "female" : "male";
}

Sex parse_sex(std::string_view text) {
  if (text == "female" || text == "F" || text == "f") return Sex::Female;
  if (text == "male" || text == "M" || text == "m") return Sex::Male;
  throw DataError("unknown sex '" + std::string(text) + "'");
}

std::vector<int> standard_ages(int open_age) {
  std::vector<int> ages(static_cast<std::size_t>(open_age) + 1);
  std::iota(ages.begin(), ages.end(), 0);
  return ages;
}

LifeTableSeries LifeTableSeries::slice_years(int first_year, int last_year) const {
  std::vector<Eigen::Index> rows;
  for (Eigen::Index t = 0; t < year_count(); ++t) {
    if (years[t] >= first_year && years[t] <= last_year) rows.push_back(t);
  }
  LifeTableSeries out;
  out.sex = sex;
  out.ages = ages;
  out.radix = radix;
  out.qx.resize(static_cast<Eigen::Index>(rows.size()), age_count());
  out.lx.resizeLike(out.qx);
  out.dx.resizeLike(out.qx);
  if (ax) out.ax = Matrix(out.qx.rows(), out.qx.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    out.years.push_back(years[rows[i]]);
    out.qx.row(r) = qx.row(rows[i]);
    out.lx.row(r) = lx.row(rows[i]);
    out.dx.row(r) = dx.row(rows[i]);
    if (ax) out.ax->row(r) = ax->row(rows[i]);
  }
  return out;
}

LifeTableSeries rebuild_dx_from_qx(Sex sex, std::vector<int> years, const Matrix& qx,
                                   double radix) {
  if (!(radix > 0.0)) throw DataError("radix must be positive");
  if (qx.cols() < 1) throw DataError("qx panel has no ages");
  if (static_cast<Eigen::Index>(years.size()) != qx.rows()) {
    throw DataError("year vector length does not match qx rows");
  }
  const Eigen::Index n = qx.rows();
  const Eigen::Index a = qx.cols();
  for (Eigen::Index t = 0; t < n; ++t) {
    for (Eigen::Index x = 0; x < a; ++x) {
      const double q = qx(t, x);
      if (!(q >= 0.0 && q <= 1.0)) {
        std::ostringstream msg;
        msg << "qx out of [0,1] at year " << years[t] << ", age index " << x << ": " << q;
        throw DataError(msg.str());
      }
    }
    if (qx(t, a - 1) != 1.0) {
      throw DataError("terminal qx must equal 1 at year " + std::to_string(years[t]));
    }
  }

  LifeTableSeries lt;
  lt.sex = sex;
  lt.years = std::move(years);
  lt.ages = standard_ages(static_cast<int>(a) - 1);
  lt.radix = radix;
  lt.qx = qx;
  lt.lx.resize(n, a);
  lt.dx.resize(n, a);
  for (Eigen::Index t = 0; t < n; ++t) {
    double l = radix;
    for (Eigen::Index x = 0; x < a; ++x) {
      lt.lx(t, x) = l;
      const double d = l * qx(t, x);
      lt.dx(t, x) = d;
      l -= d;
    }
  }
  return lt;
}

LifeTableSeries rebuild_dx_from_qx(const Matrix& qx, double radix) {
  std::vector<int> years(static_cast<std::size_t>(qx.rows()));
  std::iota(years.begin(), years.end(), 0);
  return rebuild_dx_from_qx(Sex::Female, std::move(years), qx, radix);
}

DensityPanel normalize_to_density(const LifeTableSeries& lt) {
  DensityPanel out;
  out.years = lt.years;
  out.ages = lt.ages;
  out.d.resize(lt.dx.rows(), lt.dx.cols());
  for (Eigen::Index t = 0; t < lt.dx.rows(); ++t) {
    const double total = lt.dx.row(t).sum();
    if (std::abs(total - lt.radix) > 1e-6 * lt.radix) {
      throw DataError("death counts for year " + std::to_string(lt.years[t]) +
                      " do not sum to the radix");
    }
    if ((lt.dx.row(t).array() < 0.0).any()) {
      throw DataError("negative death count in year " + std::to_string(lt.years[t]));
    }
    out.d.row(t) = lt.dx.row(t) / lt.radix;
  }
  return out;
}

void validate_density_row(std::span<const double> d, std::span<const int> ages, double tol) {
  if (d.size() != ages.size() || d.empty()) {
    throw DataError("density row length does not match the age grid");
  }
  double total = 0.0;
  for (double v : d) {
    if (!(v >= -tol) || !std::isfinite(v)) throw DataError("density row has a negative entry");
    total += v;
  }
  if (std::abs(total - 1.0) > tol) throw DataError("density row does not sum to one");
}

double life_expectancy(std::span<const double> d, std::span<const int> ages) {
  validate_density_row(d, ages);
  double e = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) e += d[i] * (ages[i] + 0.5);
  return e;
}

double life_expectancy(std::span<const double> d, std::span<const int> ages,
                       std::span<const double> ax) {
  validate_density_row(d, ages);
  if (ax.size() != d.size()) throw DataError("ax length does not match the age grid");
  double e = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) e += d[i] * (ages[i] + ax[i]);
  return e;
}

double gini_concentration(std::span<const double> d, std::span<const int> ages) {
  validate_density_row(d, ages);
  // Ages are sorted, so sum_{i<j} d_i d_j (a_j - a_i) accumulates in one pass.
  double mass = 0.0;
  double first_moment = 0.0;
  double pair_sum = 0.0;
  for (std::size_t j = 0; j < d.size(); ++j) {
    const double a = ages[j] + 0.5;
    pair_sum += d[j] * (a * mass - first_moment);
    mass += d[j];
    first_moment += d[j] * a;
  }
  const double mean = first_moment / mass;
  // The full double sum counts each unordered pair twice.
  return std::clamp(2.0 * pair_sum / (2.0 * mean * mass * mass), 0.0, 1.0);
}

double gini_equality_index(std::span<const double> d, std::span<const int> ages) {
  return 1.0 - gini_concentration(d, ages);
}

int modal_age(std::span<const double> d, std::span<const int> ages) {
  validate_density_row(d, ages);
  const auto it = std::max_element(d.begin(), d.end());
  return ages[static_cast<std::size_t>(it - d.begin())];
}

}  // namespace mortcast
