#include "mortcast/cli.hpp"
#include "mortcast/errors.hpp"
#include "mortcast/io.hpp"

#include <doctest.h>
#include <workspace.hpp>

#include <fstream>
#include <sstream>

using namespace mortcast;

namespace {

int run_cli(std::vector<std::string> args, std::string* err_text = nullptr) {
  args.insert(args.begin(), "mortcast");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  if (err_text != nullptr) *err_text = err.str();
  return code;
}

std::string base_config(const std::string& extra = "") {
  return "female = female.txt\nmale = male.txt  # comment\npaths = 200\noutput = out\n" + extra;
}

}  // namespace

TEST_CASE("config parsing") {
  std::istringstream in(
      "# run\nfemale = f.txt\nmale = /abs/m.txt\nmethods = cdf-mlfts, clr\nevr = true\nkmax = 4\n"
      "alpha = 0.05\nseed = 42\neta = 0.0025, 0.03\nmfts_scaling = scalar\n");
  const auto c = cli::parse_config(in, "run.cfg", "/data");
  CHECK(c.female_path == "/data/f.txt");
  CHECK(c.male_path == "/abs/m.txt");
  CHECK(c.methods == std::vector<Method>{Method::CdfMlfts, Method::Clr});
  REQUIRE(std::holds_alternative<EigenvalueRatio>(c.selector));
  CHECK(std::get<EigenvalueRatio>(c.selector).kmax == 4);
  CHECK(c.alpha == 0.05);
  CHECK(c.seed == 42);
  CHECK(c.etas == std::vector<double>{0.0025, 0.03});
  CHECK(c.mfts_scaling == MftsScaling::Scalar);
}

TEST_CASE("config errors carry file and line") {
  std::istringstream bad("female = f.txt\n\ncolour = blue\n");
  try {
    cli::parse_config(bad, "run.cfg");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).rfind("run.cfg:3:", 0) == 0);
  }
  std::istringstream method("methods = cdf-ufts, arima\n");
  CHECK_THROWS_AS(cli::parse_config(method, "run.cfg"), ParseError);
  std::istringstream number("alpha = 0.2x\n");
  CHECK_THROWS_AS(cli::parse_config(number, "run.cfg"), ParseError);
}

TEST_CASE("exit codes") {
  fixture::TempDir dir("exit");
  fixture::write_synthetic_pair(dir, 20, 3);
  fixture::write_text(dir / "run.cfg", base_config());
  std::string err;
  CHECK(run_cli({"forecast", "--config", dir / "missing.cfg"}, &err) == 2);
  CHECK(run_cli({"forecast", "--config", dir / "run.cfg", "--alpha", "1.5"}, &err) == 2);
  CHECK(err.find("alpha") != std::string::npos);
  CHECK(run_cli({"forecast", "--config", dir / "run.cfg", "--method", "nope"}) == 2);
  CHECK(run_cli({"frobnicate"}) == 2);
  // Too little history for the expanding window is a data error.
  fixture::write_text(dir / "short.cfg", base_config("first_test_year = 1985\n"));
  CHECK(run_cli({"evaluate", "--config", dir / "short.cfg"}, &err) == 2);
  CHECK(err.find("window ending 1984") != std::string::npos);
  // A malformed life table points at the offending line.
  fixture::write_text(dir / "broken.txt", "Year Age mx qx ax lx dx Lx Tx ex\n1975 0 . 2.5 . . . . . .\n");
  fixture::write_text(dir / "broken.cfg", "female = broken.txt\n");
  CHECK(run_cli({"describe", "--config", dir / "broken.cfg"}, &err) == 2);
  CHECK(err.find("broken.txt:2") != std::string::npos);
}

TEST_CASE("describe output") {
  fixture::TempDir dir("describe");
  fixture::write_synthetic_pair(dir, 20, 3);
  fixture::write_text(dir / "run.cfg", base_config());
  REQUIRE(run_cli({"describe", "--config", dir / "run.cfg"}) == 0);
  std::ifstream in(dir / "out/describe.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "sex,year,e0,gini,modal_age");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == 40);
  std::ifstream rb(dir / "out/rainbow_female.csv");
  CHECK(read_year_age_value(rb, "rainbow").size() == 20u * 111u);
}

TEST_CASE("forecast output shape, manifest and determinism") {
  fixture::TempDir dir("forecast");
  fixture::write_synthetic_pair(dir, 24, 5);
  fixture::write_text(dir / "run.cfg", base_config("methods = cdf-ufts, cdf-mlfts\n"));
  REQUIRE(run_cli({"forecast", "--config", dir / "run.cfg"}) == 0);
  const std::string first = fixture::read_text(dir / "out/forecast.csv");
  const std::string manifest = fixture::read_text(dir / "out/manifest.json");
  std::istringstream csv(first);
  const auto rows = read_forecast_csv(csv, "forecast.csv");
  CHECK(rows.size() == 2u * 2u * 16u * 111u);
  const auto j = nlohmann::json::parse(manifest);
  CHECK(j["forecasts"].size() == 4);
  CHECK(j["forecasts"][2]["stages"].size() == 2);
  CHECK(j["forecasts"][0]["stages"][0]["k"] == 6);
  CHECK(manifest.find("time") == std::string::npos);
  REQUIRE(run_cli({"forecast", "--config", dir / "run.cfg"}) == 0);
  CHECK(fixture::read_text(dir / "out/forecast.csv") == first);
  CHECK(fixture::read_text(dir / "out/manifest.json") == manifest);
  REQUIRE(run_cli({"forecast", "--config", dir / "run.cfg", "--seed", "2"}) == 0);
  CHECK(fixture::read_text(dir / "out/forecast.csv") != first);
}

TEST_CASE("EVR selection is recorded") {
  fixture::TempDir dir("evr");
  fixture::write_synthetic_pair(dir, 20, 6);
  fixture::write_text(dir / "run.cfg", base_config("methods = cdf-ufts\n"));
  REQUIRE(run_cli({"forecast", "--config", dir / "run.cfg", "--evr", "--horizon", "3"}) == 0);
  const auto j = nlohmann::json::parse(fixture::read_text(dir / "out/manifest.json"));
  CHECK(j["config"]["selector"] == "EVR");
  CHECK(j["forecasts"][0]["stages"][0]["k"].get<int>() >= 1);
}

TEST_CASE("evaluate output") {
  fixture::TempDir dir("evaluate");
  fixture::write_synthetic_pair(dir, 20, 7);
  fixture::write_text(dir / "run.cfg", base_config("methods = cdf-ufts, clr\nper_window = true\n"));
  REQUIRE(run_cli({"evaluate", "--config", dir / "run.cfg", "--horizon", "4"}) == 0);
  const std::string metrics = fixture::read_text(dir / "out/metrics.csv");
  std::istringstream in(metrics);
  const auto rows = read_metrics_csv(in, "metrics.csv");
  CHECK(rows.size() == 2u * 2u * 4u);
  const std::string table = fixture::read_text(dir / "out/comparison.txt");
  CHECK(table.find("Mean") != std::string::npos);
  CHECK(table.find('*') != std::string::npos);
  // Each data row stars exactly one KLD and one JSD entry when values differ.
  std::istringstream lines(table);
  std::string line;
  std::getline(lines, line);
  CHECK(line.find("x 100") != std::string::npos);
  REQUIRE(run_cli({"evaluate", "--config", dir / "run.cfg", "--horizon", "4"}) == 0);
  CHECK(fixture::read_text(dir / "out/metrics.csv") == metrics);
  CHECK(fixture::read_text(dir / "out/comparison.txt") == table);
  CHECK(!fixture::read_text(dir / "out/windows.csv").empty());
}

TEST_CASE("annuity output") {
  fixture::TempDir dir("annuity");
  fixture::write_synthetic_pair(dir, 24, 8);
  fixture::write_text(dir / "run.cfg", base_config("eta = 0, 0.0025, 0.03\n"));
  REQUIRE(run_cli({"annuity", "--config", dir / "run.cfg"}) == 0);
  const std::string csv = fixture::read_text(dir / "out/annuity.csv");
  std::istringstream in(csv);
  const auto cells = read_annuity_csv(in, "annuity.csv");
  CHECK(cells.size() == 3u * 2u * 60u);
  for (const auto& c : cells) {
    CHECK(c.price.has_value() == (c.age + c.maturity <= 110));
    if (c.price && c.eta == 0.0) {
      CHECK(*c.price < c.maturity);
      CHECK(*c.price > 0.0);
    }
  }
  REQUIRE(run_cli({"annuity", "--config", dir / "run.cfg"}) == 0);
  CHECK(fixture::read_text(dir / "out/annuity.csv") == csv);
  const std::string txt = fixture::read_text(dir / "out/annuity.txt");
  CHECK(txt.find("T=30") != std::string::npos);
}
