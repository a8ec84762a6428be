#include "mortcast/annuity.hpp"
#include "mortcast/errors.hpp"
#include "mortcast/io.hpp"

#include <doctest.h>
#include <oracles.hpp>

#include <cmath>
#include <functional>
#include <random>
#include <sstream>

using namespace mortcast;

namespace {

/// Forecast tables for years 2023.. whose death probabilities are q(row, age).
ForecastLifeTables tables_from_q(int years, const std::function<double(int, int)>& q) {
  ForecastLifeTables t;
  t.ages = standard_ages();
  t.lx.resize(years, kAgeCount);
  t.dx.resize(years, kAgeCount);
  for (int r = 0; r < years; ++r) {
    t.years.push_back(2023 + r);
    std::vector<double> qs(kAgeCount);
    for (int x = 0; x < kAgeCount; ++x) qs[static_cast<std::size_t>(x)] = x == kOpenAge ? 1.0 : q(r, x);
    const auto [l, d] = oracle::life_table(qs, t.radix);
    for (int x = 0; x < kAgeCount; ++x) {
      t.lx(r, x) = l[static_cast<std::size_t>(x)];
      t.dx(r, x) = d[static_cast<std::size_t>(x)];
    }
  }
  return t;
}

}  // namespace

TEST_CASE("zero mortality") {
  const auto t = tables_from_q(50, [](int, int) { return 0.0; });
  const auto s = cohort_survival(t, 60, 30);
  for (double p : s.p) CHECK(p == 1.0);
  PricingConfig cfg;
  cfg.eta = 0.0;
  CHECK(annuity_price(s, cfg, 5) == 5.0);
}

TEST_CASE("constant death probability") {
  const auto t = tables_from_q(40, [](int, int) { return 0.1; });
  const auto s = cohort_survival(t, 30, 25);
  for (int tau = 0; tau <= 25; ++tau)
    CHECK(s.p[static_cast<std::size_t>(tau)] == doctest::Approx(std::pow(0.9, tau)).epsilon(1e-13));
}

TEST_CASE("cohort diagonal") {
  auto q = [](int r, int x) { return 0.01 + 0.003 * r + 0.0002 * x; };
  const auto t = tables_from_q(3, q);
  const auto s = cohort_survival(t, 60, 3);
  CHECK(s.p[2] == doctest::Approx((1 - q(0, 60)) * (1 - q(1, 61))).epsilon(1e-14));
  CHECK(s.p[3] == doctest::Approx((1 - q(0, 60)) * (1 - q(1, 61)) * (1 - q(2, 62))).epsilon(1e-14));
  CHECK_THROWS_AS(cohort_survival(t, 60, 4), HorizonExceededError);
}

TEST_CASE("log-space accumulation matches the naive product") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.0, 0.3);
  Matrix qs(50, kAgeCount);
  for (Eigen::Index r = 0; r < qs.rows(); ++r)
    for (Eigen::Index x = 0; x < qs.cols(); ++x) qs(r, x) = u(rng);
  const auto t = tables_from_q(50, [&](int r, int x) { return qs(r, x); });
  for (int x : {0, 40, 60, 85}) {
    const auto s = cohort_survival(t, x, 25);
    double naive = 1.0;
    for (int j = 1; j <= 25; ++j) {
      naive *= 1.0 - qs(j - 1, x + j - 1);
      CHECK(std::abs(s.p[static_cast<std::size_t>(j)] - naive) < 1e-12);
      CHECK(s.p[static_cast<std::size_t>(j)] <= s.p[static_cast<std::size_t>(j - 1)]);
    }
  }
}

TEST_CASE("bond prices") {
  CHECK(bond_price(0.0, 17.0) == 1.0);
  CHECK(bond_price(0.0025, 1.0) == doctest::Approx(0.99750312239746).epsilon(1e-13));
  CHECK(bond_price(0.03, 10.0) == doctest::Approx(0.74081822068171).epsilon(1e-13));
}

TEST_CASE("contract bound and certain annuity") {
  const auto t = tables_from_q(50, [](int, int x) { return 0.002 * std::exp(0.09 * (x - 60)) > 0.9 ? 0.9 : 0.002 * std::exp(0.09 * (x - 60)); });
  const auto s = cohort_survival(t, 100, 11);
  PricingConfig cfg;
  CHECK_NOTHROW(annuity_price(s, cfg, 10));
  CHECK_THROWS_AS(annuity_price(s, cfg, 11), ContractBoundError);
  const auto s60 = cohort_survival(t, 60, 30);
  double certain = 0.0;
  for (int tau = 1; tau <= 30; ++tau) certain += bond_price(cfg.eta, tau);
  CHECK(annuity_price(s60, cfg, 30) < certain);
}

TEST_CASE("price grid shape, blanks and monotonicity") {
  // Gompertz hazard with calendar improvement: mortality increases with age.
  const auto t = tables_from_q(50, [](int r, int x) {
    return std::min(0.95, 1.0 - std::exp(-3e-5 * std::exp(0.1 * x) * std::exp(-0.01 * r)));
  });
  PricingConfig low, high;
  low.eta = 0.0025;
  high.eta = 0.03;
  const auto ages = default_pricing_ages();
  const auto mats = default_pricing_maturities();
  CHECK(ages.size() == 10);
  CHECK(mats.size() == 6);
  const auto g_low = price_grid(t, Sex::Female, ages, mats, low);
  const auto g_high = price_grid(t, Sex::Female, ages, mats, high);
  REQUIRE(g_low.size() == 60);
  int blanks = 0;
  for (std::size_t i = 0; i < g_low.size(); ++i) {
    const auto& c = g_low[i];
    CHECK(c.price.has_value() == (c.age + c.maturity <= 110));
    if (!c.price) {
      ++blanks;
      continue;
    }
    CHECK(*g_high[i].price < *c.price);
  }
  CHECK(blanks == 15);  // 1 + 2 + 3 + 4 + 5 at ages 85..105
  auto price = [&](int age, int mat) {
    for (const auto& c : g_low)
      if (c.age == age && c.maturity == mat) return *c.price;
    return -1.0;
  };
  for (int age : ages)
    for (int m = 10; m <= 30 && age + m <= 110; m += 5) CHECK(price(age, m) >= price(age, m - 5));
  for (int m : mats)
    for (int age = 65; age + m <= 110; age += 5) CHECK(price(age, m) <= price(age - 5, m));
}

TEST_CASE("annuity CSV round trip") {
  std::vector<PriceCell> cells{{Sex::Female, 60, 5, 0.0025, 4.916}, {Sex::Male, 105, 10, 0.03, std::nullopt}};
  std::stringstream ss;
  write_annuity_csv(ss, cells);
  const auto back = read_annuity_csv(ss, "mem");
  REQUIRE(back.size() == 2);
  CHECK(back[0].price.value() == 4.916);
  CHECK(back[0].eta == 0.0025);
  CHECK(!back[1].price.has_value());
  CHECK(back[1].sex == Sex::Male);
}
