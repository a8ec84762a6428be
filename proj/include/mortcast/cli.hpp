#pragma once

#include "mortcast/eval.hpp"
#include "mortcast/fpca.hpp"
#include "mortcast/pipeline.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mortcast::cli {

struct RunConfig {
  std::string female_path;
  std::string male_path;
  std::vector<Method> methods{Method::CdfUfts, Method::CdfMfts, Method::CdfMlfts, Method::Clr};
  ComponentSelector selector = FixedK{6};
  MftsScaling mfts_scaling = MftsScaling::PerAge;
  int horizon = 16;
  double alpha = 0.2;
  std::uint64_t seed = 1;
  int paths = 5000;
  std::vector<double> etas{0.0025};
  std::string output_dir = ".";
  // Expanding-window plan; zero means "derive from the data span".
  int train_start = 0;
  int first_test_year = 0;
  int last_year = 0;
  Method annuity_method = Method::CdfMlfts;
  int annuity_horizon = 50;
  bool per_window = false;
};

/// Flat key=value text; '#' starts a comment. Relative data paths resolve
/// against the config file's directory.
RunConfig parse_config(std::istream& in, const std::string& name, const std::string& base_dir = "");
RunConfig load_config(const std::string& path);

void validate(const RunConfig& config);

/// Each command writes its files into config.output_dir and a short
/// summary to `log`.
void cmd_describe(const RunConfig& config, std::ostream& log);
void cmd_forecast(const RunConfig& config, std::ostream& log);
void cmd_evaluate(const RunConfig& config, std::ostream& log);
void cmd_annuity(const RunConfig& config, std::ostream& log);

/// Plain-text side-by-side tables of a metric report (divergences x 100;
/// the smallest value in each row is starred).
std::string render_comparison(const MetricReport& report);

/// Entry point used by the mortcast executable. Returns the process exit
/// code: 0 success, 2 data errors, 3 numerical failures.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace mortcast::cli
