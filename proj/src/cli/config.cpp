#include "mortcast/cli.hpp"

#include "mortcast/errors.hpp"
#include "mortcast/io.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>

namespace mortcast::cli {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> list_of(const std::string& value) {
  std::vector<std::string> out;
  for (const auto& f : split_csv(value)) {
    const auto t = trim(f);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

template <typename T>
T number(const std::string& value, const std::string& name, std::size_t line) {
  T v{};
  const char* end = value.data() + value.size();
  const auto res = std::from_chars(value.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw ParseError(name, line, "invalid number '" + value + "'");
  }
  return v;
}

bool boolean(const std::string& value, const std::string& name, std::size_t line) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ParseError(name, line, "invalid boolean '" + value + "'");
}

Method method_at(const std::string& value, const std::string& name, std::size_t line) {
  try {
    return parse_method(value);
  } catch (const DataError& e) {
    throw ParseError(name, line, e.what());
  }
}

std::string resolve(const std::string& path, const std::string& base_dir) {
  if (path.empty() || base_dir.empty() || std::filesystem::path(path).is_absolute()) return path;
  return (std::filesystem::path(base_dir) / path).lexically_normal().string();
}

}  // namespace

RunConfig parse_config(std::istream& in, const std::string& name, const std::string& base_dir) {
  RunConfig c;
  int fixed_k = 6;
  bool use_evr = false;
  int kmax = EigenvalueRatio{}.kmax;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(name, line_no, "expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "female") {
      c.female_path = resolve(value, base_dir);
    } else if (key == "male") {
      c.male_path = resolve(value, base_dir);
    } else if (key == "methods") {
      c.methods.clear();
      for (const auto& m : list_of(value)) c.methods.push_back(method_at(m, name, line_no));
    } else if (key == "k") {
      fixed_k = number<int>(value, name, line_no);
    } else if (key == "evr") {
      use_evr = boolean(value, name, line_no);
    } else if (key == "kmax") {
      kmax = number<int>(value, name, line_no);
    } else if (key == "mfts_scaling") {
      if (value == "per-age") c.mfts_scaling = MftsScaling::PerAge;
      else if (value == "scalar") c.mfts_scaling = MftsScaling::Scalar;
      else if (value == "none") c.mfts_scaling = MftsScaling::None;
      else throw ParseError(name, line_no, "mfts_scaling must be per-age, scalar or none");
    } else if (key == "horizon") {
      c.horizon = number<int>(value, name, line_no);
    } else if (key == "alpha") {
      c.alpha = number<double>(value, name, line_no);
    } else if (key == "seed") {
      c.seed = number<std::uint64_t>(value, name, line_no);
    } else if (key == "paths") {
      c.paths = number<int>(value, name, line_no);
    } else if (key == "eta") {
      c.etas.clear();
      for (const auto& e : list_of(value)) c.etas.push_back(number<double>(e, name, line_no));
    } else if (key == "output") {
      c.output_dir = resolve(value, base_dir);
    } else if (key == "train_start") {
      c.train_start = number<int>(value, name, line_no);
    } else if (key == "first_test_year") {
      c.first_test_year = number<int>(value, name, line_no);
    } else if (key == "last_year") {
      c.last_year = number<int>(value, name, line_no);
    } else if (key == "annuity_method") {
      c.annuity_method = method_at(value, name, line_no);
    } else if (key == "annuity_horizon") {
      c.annuity_horizon = number<int>(value, name, line_no);
    } else if (key == "per_window") {
      c.per_window = boolean(value, name, line_no);
    } else {
      throw ParseError(name, line_no, "unknown key '" + key + "'");
    }
  }
  if (use_evr) {
    EigenvalueRatio evr;
    evr.kmax = kmax;
    c.selector = evr;
  } else {
    c.selector = FixedK{fixed_k};
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file '" + path + "'");
  return parse_config(in, path, std::filesystem::path(path).parent_path().string());
}

void validate(const RunConfig& c) {
  if (c.female_path.empty() && c.male_path.empty()) {
    throw DataError("config names no life-table file (female= / male=)");
  }
  for (const auto* p : {&c.female_path, &c.male_path}) {
    if (!p->empty() && !std::filesystem::exists(*p)) {
      throw DataError("life-table file '" + *p + "' does not exist");
    }
  }
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw DataError("alpha must lie in (0, 1)");
  if (c.horizon < 1) throw DataError("horizon must be at least 1");
  if (c.annuity_horizon < 1) throw DataError("annuity_horizon must be at least 1");
  if (c.paths < 1) throw DataError("paths must be positive");
  if (c.methods.empty()) throw DataError("no forecasting method selected");
  if (const auto* fixed = std::get_if<FixedK>(&c.selector); fixed && fixed->k < 1) {
    throw DataError("k must be at least 1");
  }
  for (double eta : c.etas) {
    if (!(eta >= 0.0)) throw DataError("interest rates must be nonnegative");
  }
}

}  // namespace mortcast::cli
