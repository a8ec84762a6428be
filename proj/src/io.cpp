#include "mortcast/io.hpp"

#include "mortcast/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace mortcast {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return {buf, res.ptr};
}

double parse_double(const std::string& token, const std::string& file, std::size_t line) {
  double v = 0.0;
  const char* end = token.data() + token.size();
  const auto res = std::from_chars(token.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw ParseError(file, line, "expected a number, found '" + token + "'");
  }
  return v;
}

namespace {

int parse_int(const std::string& token, const std::string& file, std::size_t line) {
  int v = 0;
  const char* end = token.data() + token.size();
  const auto res = std::from_chars(token.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw ParseError(file, line, "expected an integer, found '" + token + "'");
  }
  return v;
}

std::vector<std::string> tokens_of(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  for (std::string tok; ss >> tok;) out.push_back(tok);
  return out;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

void expect_header(std::istream& in, const std::string& name, const std::string& header) {
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != header) {
    throw ParseError(name, 1, "expected header '" + header + "'");
  }
}

}  // namespace

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

LifeTableSeries read_hmd_lifetable(const std::string& path, Sex sex, double radix) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open life-table file '" + path + "'");
  return parse_hmd_lifetable(in, path, sex, radix);
}

LifeTableSeries parse_hmd_lifetable(std::istream& in, const std::string& name, Sex sex,
                                    double radix) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    auto toks = tokens_of(line);
    if (!toks.empty() && toks[0] == "Year") {
      header = std::move(toks);
      break;
    }
  }
  if (header.empty()) throw ParseError(name, line_no, "no header line starting with 'Year'");
  auto column = [&](const std::string& label) -> int {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == label) return static_cast<int>(i);
    }
    return -1;
  };
  const int col_age = column("Age");
  const int col_qx = column("qx");
  const int col_ax = column("ax");
  if (col_age < 0 || col_qx < 0) throw ParseError(name, line_no, "header lacks Age or qx column");

  std::vector<int> years;
  std::vector<std::vector<double>> q_rows;
  std::vector<std::vector<double>> a_rows;
  bool have_ax = col_ax >= 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto toks = tokens_of(line);
    if (toks.empty()) continue;
    if (toks.size() < header.size()) throw ParseError(name, line_no, "too few columns");
    const int year = parse_int(toks[0], name, line_no);
    const std::string& age_tok = toks[static_cast<std::size_t>(col_age)];
    const int age = age_tok.back() == '+' ? parse_int(age_tok.substr(0, age_tok.size() - 1), name, line_no)
                                          : parse_int(age_tok, name, line_no);
    if (age == 0) {
      if (!years.empty() && static_cast<int>(q_rows.back().size()) != kAgeCount) {
        throw ParseError(name, line_no, "year " + std::to_string(years.back()) + " is incomplete");
      }
      years.push_back(year);
      q_rows.emplace_back();
      a_rows.emplace_back();
    }
    if (years.empty() || years.back() != year) throw ParseError(name, line_no, "rows out of order");
    if (age != static_cast<int>(q_rows.back().size()) || age > kOpenAge) {
      throw ParseError(name, line_no, "unexpected age " + age_tok);
    }
    if (age == kOpenAge && age_tok.back() != '+') {
      throw ParseError(name, line_no, "open age interval must be written as 110+");
    }
    const std::string& q_tok = toks[static_cast<std::size_t>(col_qx)];
    if (q_tok == ".") throw ParseError(name, line_no, "missing qx");
    const double q = parse_double(q_tok, name, line_no);
    if (!(q >= 0.0 && q <= 1.0)) throw ParseError(name, line_no, "qx outside [0,1]");
    q_rows.back().push_back(q);
    if (have_ax) {
      const std::string& a_tok = toks[static_cast<std::size_t>(col_ax)];
      if (a_tok == ".") {
        have_ax = false;
      } else {
        a_rows.back().push_back(parse_double(a_tok, name, line_no));
      }
    }
  }
  if (years.empty()) throw ParseError(name, line_no, "no data rows");
  if (static_cast<int>(q_rows.back().size()) != kAgeCount) {
    throw ParseError(name, line_no, "last year is incomplete");
  }
  for (std::size_t t = 1; t < years.size(); ++t) {
    if (years[t] != years[t - 1] + 1) throw ParseError(name, line_no, "years are not consecutive");
  }
  Matrix qx(static_cast<Eigen::Index>(years.size()), kAgeCount);
  for (std::size_t t = 0; t < years.size(); ++t) {
    for (int x = 0; x < kAgeCount; ++x) qx(static_cast<Eigen::Index>(t), x) = q_rows[t][static_cast<std::size_t>(x)];
    if (q_rows[t][kOpenAge] != 1.0) {
      throw ParseError(name, line_no, "qx at 110+ must be 1 in year " + std::to_string(years[t]));
    }
  }
  LifeTableSeries lt = rebuild_dx_from_qx(sex, std::move(years), qx, radix);
  if (have_ax) {
    Matrix ax(qx.rows(), qx.cols());
    for (Eigen::Index t = 0; t < qx.rows(); ++t) {
      for (int x = 0; x < kAgeCount; ++x) ax(t, x) = a_rows[static_cast<std::size_t>(t)][static_cast<std::size_t>(x)];
    }
    lt.ax = std::move(ax);
  }
  return lt;
}

void write_hmd_lifetable(std::ostream& out, const LifeTableSeries& lt) {
  out << "Period life table, " << to_string(lt.sex) << "\n\n";
  out << "Year Age mx qx ax lx dx Lx Tx ex\n";
  for (Eigen::Index t = 0; t < lt.year_count(); ++t) {
    for (Eigen::Index x = 0; x < lt.age_count(); ++x) {
      const int age = lt.ages[static_cast<std::size_t>(x)];
      out << lt.years[static_cast<std::size_t>(t)] << ' ' << age
          << (x + 1 == lt.age_count() ? "+" : "") << " . " << format_double(lt.qx(t, x)) << ' '
          << (lt.ax ? format_double((*lt.ax)(t, x)) : std::string("0.5")) << ' '
          << format_double(lt.lx(t, x)) << ' ' << format_double(lt.dx(t, x)) << " . . .\n";
    }
  }
}

void write_year_age_value(std::ostream& out, const std::vector<int>& years,
                          const std::vector<int>& ages, const Matrix& values) {
  out << "year,age,value\n";
  for (Eigen::Index t = 0; t < values.rows(); ++t) {
    for (Eigen::Index x = 0; x < values.cols(); ++x) {
      out << years[static_cast<std::size_t>(t)] << ',' << ages[static_cast<std::size_t>(x)] << ','
          << format_double(values(t, x)) << '\n';
    }
  }
}

std::vector<YearAgeValue> read_year_age_value(std::istream& in, const std::string& name) {
  expect_header(in, name, "year,age,value");
  std::vector<YearAgeValue> rows;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 3) throw ParseError(name, line_no, "expected 3 fields");
    rows.push_back({parse_int(f[0], name, line_no), parse_int(f[1], name, line_no),
                    parse_double(f[2], name, line_no)});
  }
  return rows;
}

void write_forecast_header(std::ostream& out) {
  out << "method,sex,horizon,age,point,lower,upper\n";
}

void write_forecast_rows(std::ostream& out, const ForecastResult& r) {
  for (int h = 1; h <= r.horizon(); ++h) {
    for (Eigen::Index x = 0; x < r.point.cols(); ++x) {
      out << to_string(r.method) << ',' << to_string(r.sex) << ',' << h << ','
          << r.ages[static_cast<std::size_t>(x)] << ',' << format_double(r.point(h - 1, x)) << ','
          << format_double(r.lower(h - 1, x)) << ',' << format_double(r.upper(h - 1, x)) << '\n';
    }
  }
}

std::vector<ForecastRow> read_forecast_csv(std::istream& in, const std::string& name) {
  expect_header(in, name, "method,sex,horizon,age,point,lower,upper");
  std::vector<ForecastRow> rows;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 7) throw ParseError(name, line_no, "expected 7 fields");
    rows.push_back({f[0], f[1], parse_int(f[2], name, line_no), parse_int(f[3], name, line_no),
                    parse_double(f[4], name, line_no), parse_double(f[5], name, line_no),
                    parse_double(f[6], name, line_no)});
  }
  return rows;
}

void write_metrics_csv(std::ostream& out, const MetricReport& report) {
  out << "method,sex,selector,h,kld,jsd,score,ecp,cpd,rmsfe_e0,mafe_e0\n";
  for (const auto& c : report.cells) {
    out << to_string(c.method) << ',' << to_string(c.sex) << ',' << c.selector << ',' << c.h << ','
        << format_double(c.kld) << ',' << format_double(c.jsd) << ',' << format_double(c.score)
        << ',' << format_double(c.ecp) << ',' << format_double(c.cpd) << ','
        << format_double(c.rmsfe_e0) << ',' << format_double(c.mafe_e0) << '\n';
  }
}

std::vector<MetricRow> read_metrics_csv(std::istream& in, const std::string& name) {
  expect_header(in, name, "method,sex,selector,h,kld,jsd,score,ecp,cpd,rmsfe_e0,mafe_e0");
  std::vector<MetricRow> rows;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 11) throw ParseError(name, line_no, "expected 11 fields");
    MetricRow r;
    r.method = f[0];
    r.sex = f[1];
    r.selector = f[2];
    r.h = parse_int(f[3], name, line_no);
    r.kld = parse_double(f[4], name, line_no);
    r.jsd = parse_double(f[5], name, line_no);
    r.score = parse_double(f[6], name, line_no);
    r.ecp = parse_double(f[7], name, line_no);
    r.cpd = parse_double(f[8], name, line_no);
    r.rmsfe_e0 = parse_double(f[9], name, line_no);
    r.mafe_e0 = parse_double(f[10], name, line_no);
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_annuity_csv(std::ostream& out, const std::vector<PriceCell>& cells) {
  out << "sex,age,maturity,eta,price\n";
  for (const auto& c : cells) {
    out << to_string(c.sex) << ',' << c.age << ',' << c.maturity << ',' << format_double(c.eta)
        << ',' << (c.price ? format_double(*c.price) : std::string()) << '\n';
  }
}

std::vector<PriceCell> read_annuity_csv(std::istream& in, const std::string& name) {
  expect_header(in, name, "sex,age,maturity,eta,price");
  std::vector<PriceCell> cells;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 5) throw ParseError(name, line_no, "expected 5 fields");
    PriceCell c;
    c.sex = parse_sex(f[0]);
    c.age = parse_int(f[1], name, line_no);
    c.maturity = parse_int(f[2], name, line_no);
    c.eta = parse_double(f[3], name, line_no);
    if (!f[4].empty()) c.price = parse_double(f[4], name, line_no);
    cells.push_back(c);
  }
  return cells;
}

}  // namespace mortcast
