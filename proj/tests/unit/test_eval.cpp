#include "mortcast/errors.hpp"
#include "mortcast/eval.hpp"
#include "mortcast/io.hpp"

#include <doctest.h>
#include <fixtures.hpp>
#include <oracles.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

using namespace mortcast;

namespace {

struct Pair {
  LifeTableSeries f, m;
};

Pair toy_data(int years, std::uint64_t seed) {
  auto sf = default_synthetic(Sex::Female, seed);
  auto sm = default_synthetic(Sex::Male, seed);
  sf.years = sm.years = years;
  return {synthetic_life_tables(sf), synthetic_life_tables(sm)};
}

EvaluationOptions quick_options(std::vector<Method> methods) {
  EvaluationOptions o;
  o.methods = std::move(methods);
  o.forecast.paths = 200;
  return o;
}

}  // namespace

TEST_CASE("window plan arithmetic") {
  WindowPlan plan;  // 1975 start, test years 2007..2022
  CHECK(plan.window_count() == 16);
  CHECK(plan.train_end(0) == 2006);
  for (int h = 1; h <= 16; ++h) {
    CHECK(plan.forecasts_at(h) == 17 - h);
    // Denominator of the per-horizon averages.
    CHECK(kAgeCount * plan.forecasts_at(h) == 111 * (17 - h));
  }
  CHECK(plan.forecasts_at(16) == 1);
  const WindowPlan toy{1975, 1991, 1992, 2};
  CHECK(toy.window_count() == 2);
  CHECK(toy.forecasts_at(1) == 2);
  CHECK(toy.forecasts_at(2) == 1);
  CHECK_THROWS_AS((WindowPlan{1990, 1980, 2000, 16}.validate()), DataError);
}

TEST_CASE("kld examples") {
  const std::vector<double> p{0.5, 0.5}, q{0.25, 0.75};
  CHECK(kld(p, p) == 0.0);
  // Symmetric sum: ln(4/3)/2 forward plus (3 ln 1.5 - ln 2)/4 backward = ln(3)/4.
  CHECK(std::abs(kld(p, q) - 0.2746530722) < 1e-9);
  CHECK(std::abs(oracle::kld_direct(p, q) - 0.25 * std::log(3.0)) < 1e-15);
  CHECK(std::abs(kld(p, q) - oracle::kld_direct(p, q)) < 1e-15);
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 100; ++rep) {
    const auto a = oracle::random_density(rng, kAgeCount);
    const auto b = oracle::random_density(rng, kAgeCount);
    CHECK(std::abs(kld(a, b) - kld(b, a)) <= 1e-15);
    CHECK(kld(a, b) > 0.0);
    CHECK(std::abs(kld(a, b) - oracle::kld_direct(a, b)) < 1e-12);
    CHECK(kld(a, a) == 0.0);
  }
}

TEST_CASE("jsd examples") {
  const std::vector<double> p{0.5, 0.5};
  CHECK(jsd_geometric(p, p) == 0.0);
  const double extreme = jsd_geometric(std::vector<double>{1, 0}, std::vector<double>{0, 1});
  CHECK(std::isfinite(extreme));
  CHECK(std::abs(extreme - 17.269388197455342) < 1e-9);  // ln(1e15) / 2
  std::mt19937_64 rng(32);
  for (int rep = 0; rep < 100; ++rep) {
    const auto a = oracle::random_density(rng, kAgeCount);
    const auto b = oracle::random_density(rng, kAgeCount);
    const double j = jsd_geometric(a, b);
    CHECK(j >= 0.0);
    // With the unnormalized geometric mean the divergence is a quarter of the symmetric KLD.
    CHECK(std::abs(j - kld(a, b) / 4.0) < 1e-13);
  }
}

TEST_CASE("interval score") {
  CHECK(interval_score(0.2, 0.5, 0.3, 0.2) == doctest::Approx(0.3));
  CHECK(interval_score(0.0, 1.0, 2.0, 0.2) == doctest::Approx(11.0));
  CHECK(interval_score(0.4, 0.4, 0.4, 0.05) == 0.0);
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 200; ++rep) {
    double l = u(rng), h = u(rng);
    if (l > h) std::swap(l, h);
    const double a = u(rng);
    const double s = interval_score(l, h, a, 0.2);
    CHECK(s >= h - l);
    if (a >= l && a <= h) CHECK(s == h - l);
    else CHECK(s > h - l);
  }
}

TEST_CASE("coverage arithmetic") {
  const std::vector<double> lo(4, 0.0), hi(4, 1.0);
  auto c = ecp_cpd(lo, hi, std::vector<double>{0.1, 0.2, 0.3, 0.4}, 0.2);
  CHECK(c.ecp == 1.0);
  CHECK(c.cpd == doctest::Approx(0.2).epsilon(1e-15));
  c = ecp_cpd(lo, hi, std::vector<double>{2, 2, -1, -1}, 0.2);
  CHECK(c.ecp == 0.0);
  CHECK(c.cpd == doctest::Approx(0.8).epsilon(1e-15));
  c = ecp_cpd(lo, hi, std::vector<double>{0.5, 2, 0.5, -1}, 0.2);
  CHECK(c.ecp == 0.5);
  CHECK(c.cpd == doctest::Approx(0.3).epsilon(1e-15));
}

TEST_CASE("life expectancy errors") {
  const std::vector<int> ages{0, 1};
  Matrix f(2, 2), a(2, 2);
  f << 0.7, 0.3, 0.8, 0.2;  // e0 0.8, 0.7
  a << 1.0, 0.0, 0.4, 0.6;  // e0 0.5, 1.1
  auto e = e0_errors(a, a, ages);
  CHECK(e.rmsfe == 0.0);
  CHECK(e.mafe == 0.0);
  e = e0_errors(f.topRows(1), a.topRows(1), ages);
  CHECK(e.rmsfe == doctest::Approx(0.3));
  CHECK(e.mafe == doctest::Approx(0.3));
  e = e0_errors(f, a, ages);
  CHECK(e.mafe == doctest::Approx(0.35));
  CHECK(e.rmsfe == doctest::Approx(std::sqrt(0.125)));
}

TEST_CASE("toy expanding window counts and metric invariants") {
  const auto d = toy_data(18, 3);
  const WindowPlan plan{1975, 1991, 1992, 2};
  const auto report = run_expanding_window(d.f, d.m, plan, quick_options({Method::CdfUfts, Method::Clr}));
  CHECK(report.cells.size() == 2 * 2 * 2);
  for (const auto& c : report.cells) {
    CHECK(c.forecasts == (c.h == 1 ? 2 : 1));
    CHECK(c.kld >= 0.0);
    CHECK(c.jsd >= 0.0);
    CHECK(c.ecp >= 0.0);
    CHECK(c.ecp <= 1.0);
    CHECK(c.cpd >= 0.0);
    CHECK(c.cpd <= 0.8);
    CHECK(c.score >= c.width);
    CHECK(c.width >= 0.0);
  }
}

TEST_CASE("window execution order does not change the report") {
  const auto d = toy_data(20, 4);
  const WindowPlan plan{1975, 1991, 1994, 4};
  auto o = quick_options({Method::CdfMlfts, Method::Clr});
  o.keep_forecasts = true;
  const auto a = run_expanding_window(d.f, d.m, plan, o);
  o.window_order = {3, 1, 0, 2};
  const auto b = run_expanding_window(d.f, d.m, plan, o);
  REQUIRE(a.cells.size() == b.cells.size());
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    CHECK(a.cells[i].kld == b.cells[i].kld);
    CHECK(a.cells[i].score == b.cells[i].score);
    CHECK(a.cells[i].ecp == b.cells[i].ecp);
    CHECK(a.cells[i].rmsfe_e0 == b.cells[i].rmsfe_e0);
  }
  std::ostringstream sa, sb;
  write_metrics_csv(sa, a);
  write_metrics_csv(sb, b);
  CHECK(sa.str() == sb.str());
}

TEST_CASE("one-step window cell equals a direct forecast on the truncated data") {
  const auto d = toy_data(19, 5);
  const WindowPlan plan{1975, 1991, 1993, 3};
  auto o = quick_options({Method::CdfUfts});
  o.keep_forecasts = true;
  const auto report = run_expanding_window(d.f, d.m, plan, o);
  const int train_end = 1991;
  ForecastOptions fo = o.forecast;
  fo.horizon = 1;
  fo.seed = derive_seed(o.forecast.seed, train_end);
  const auto direct = forecast_cdf(d.f.slice_years(1975, train_end), fo);
  const auto it = std::find_if(report.windows.begin(), report.windows.end(), [&](const WindowForecast& w) {
    return w.sex == Sex::Female && w.train_end == train_end && w.h == 1;
  });
  REQUIRE(it != report.windows.end());
  // The window forecast ran with horizon 2, so only the point and the h=1 actual are comparable.
  CHECK((it->point - direct.point.row(0).transpose()).cwiseAbs().maxCoeff() == 0.0);
  const auto dens = normalize_to_density(d.f);
  CHECK(it->actual == dens.d.row(train_end + 1 - 1975).transpose());
}

TEST_CASE("window failures carry provenance") {
  const auto d = toy_data(20, 6);
  const WindowPlan plan{1980, 1990, 1994, 4};  // first window trains on 10 years
  try {
    run_expanding_window(d.f, d.m, plan, quick_options({Method::Clr}));
    FAIL("expected a data error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("window ending 1989, method clr") != std::string::npos);
  }
}

TEST_CASE("metrics CSV round trip") {
  const auto d = toy_data(18, 7);
  const auto report = run_expanding_window(d.f, d.m, WindowPlan{1975, 1991, 1992, 2}, quick_options({Method::CdfMfts}));
  std::stringstream ss;
  write_metrics_csv(ss, report);
  const auto rows = read_metrics_csv(ss, "mem");
  REQUIRE(rows.size() == report.cells.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].kld == report.cells[i].kld);
    CHECK(rows[i].cpd == report.cells[i].cpd);
    CHECK(rows[i].mafe_e0 == report.cells[i].mafe_e0);
    CHECK(rows[i].method == "cdf-mfts");
  }
}
