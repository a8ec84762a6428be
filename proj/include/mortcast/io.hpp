#pragma once

#include "mortcast/annuity.hpp"
#include "mortcast/eval.hpp"
#include "mortcast/lifetable.hpp"
#include "mortcast/pipeline.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace mortcast {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
double parse_double(const std::string& token, const std::string& file, std::size_t line);

/// Reads an HMD/JMD-style period life table (Year Age mx qx ax lx dx Lx Tx ex,
/// optional title lines before the header, "110+" for the open interval, "."
/// for missing values). Survivors and deaths are rebuilt from qx.
LifeTableSeries read_hmd_lifetable(const std::string& path, Sex sex, double radix = kDefaultRadix);
LifeTableSeries parse_hmd_lifetable(std::istream& in, const std::string& name, Sex sex,
                                    double radix = kDefaultRadix);

/// Writes a table in the same layout; unused columns are written as ".".
void write_hmd_lifetable(std::ostream& out, const LifeTableSeries& lt);

struct YearAgeValue {
  int year = 0;
  int age = 0;
  double value = 0.0;
};

void write_year_age_value(std::ostream& out, const std::vector<int>& years,
                          const std::vector<int>& ages, const Matrix& values);
std::vector<YearAgeValue> read_year_age_value(std::istream& in, const std::string& name);

struct ForecastRow {
  std::string method;
  std::string sex;
  int horizon = 0;
  int age = 0;
  double point = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

void write_forecast_header(std::ostream& out);
void write_forecast_rows(std::ostream& out, const ForecastResult& result);
std::vector<ForecastRow> read_forecast_csv(std::istream& in, const std::string& name);

struct MetricRow {
  std::string method;
  std::string sex;
  std::string selector;
  int h = 0;
  double kld = 0.0;
  double jsd = 0.0;
  double score = 0.0;
  double ecp = 0.0;
  double cpd = 0.0;
  double rmsfe_e0 = 0.0;
  double mafe_e0 = 0.0;
};

void write_metrics_csv(std::ostream& out, const MetricReport& report);
std::vector<MetricRow> read_metrics_csv(std::istream& in, const std::string& name);

void write_annuity_csv(std::ostream& out, const std::vector<PriceCell>& cells);
/// Blank price fields come back as empty optionals.
std::vector<PriceCell> read_annuity_csv(std::istream& in, const std::string& name);

/// Splits a comma-separated line; no quoting.
std::vector<std::string> split_csv(const std::string& line);

}  // namespace mortcast
