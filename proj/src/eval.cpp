#include "mortcast/eval.hpp"

#include "mortcast/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <tuple>

namespace mortcast {

int WindowPlan::horizon_for(int window) const {
  return std::min(max_horizon, last_year - train_end(window));
}

int WindowPlan::forecasts_at(int h) const {
  int count = 0;
  for (int w = 0; w < window_count(); ++w) {
    if (h <= horizon_for(w)) ++count;
  }
  return count;
}

void WindowPlan::validate() const {
  if (first_test_year <= train_start) throw DataError("first test year must follow the training start");
  if (last_year < first_test_year) throw DataError("last year precedes the first test year");
  if (max_horizon < 1) throw DataError("maximum horizon must be at least 1");
}

const MetricCell& MetricReport::at(Method method, Sex sex, int h) const {
  for (const auto& c : cells) {
    if (c.method == method && c.sex == sex && c.h == h) return c;
  }
  throw DataError("no metric cell for the requested method, sex and horizon");
}

double kld(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw DataError("kld: length mismatch");
  double forward = 0.0;
  double backward = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) {
    const double lp = std::log(std::max(p[x], kLogClip));
    const double lq = std::log(std::max(q[x], kLogClip));
    forward += p[x] * (lp - lq);
    backward += q[x] * (lq - lp);
  }
  return forward + backward;
}

double jsd_geometric(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw DataError("jsd: length mismatch");
  double to_p = 0.0;
  double to_q = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) {
    const double lp = std::log(std::max(p[x], kLogClip));
    const double lq = std::log(std::max(q[x], kLogClip));
    const double ldelta = 0.5 * (lp + lq);
    to_p += p[x] * (lp - ldelta);
    to_q += q[x] * (lq - ldelta);
  }
  return 0.5 * to_p + 0.5 * to_q;
}

double interval_score(double lower, double upper, double actual, double alpha) {
  double s = upper - lower;
  if (actual < lower) s += (2.0 / alpha) * (lower - actual);
  if (actual > upper) s += (2.0 / alpha) * (actual - upper);
  return s;
}

Coverage ecp_cpd(std::span<const double> lower, std::span<const double> upper,
                 std::span<const double> actual, double alpha) {
  if (lower.size() != actual.size() || upper.size() != actual.size() || actual.empty()) {
    throw DataError("ecp_cpd: shape mismatch");
  }
  std::size_t outside = 0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    if (actual[i] < lower[i]) ++outside;
    if (actual[i] > upper[i]) ++outside;
  }
  Coverage c;
  c.ecp = 1.0 - static_cast<double>(outside) / static_cast<double>(actual.size());
  c.cpd = std::abs(c.ecp - (1.0 - alpha));
  return c;
}

ErrorSummary e0_errors(const Matrix& forecasts, const Matrix& actuals, std::span<const int> ages) {
  if (forecasts.rows() != actuals.rows() || forecasts.cols() != actuals.cols() ||
      forecasts.rows() == 0) {
    throw DataError("e0_errors: shape mismatch");
  }
  double sq = 0.0;
  double abs_sum = 0.0;
  for (Eigen::Index r = 0; r < forecasts.rows(); ++r) {
    const double err =
        life_expectancy(row_span(forecasts, r), ages) - life_expectancy(row_span(actuals, r), ages);
    sq += err * err;
    abs_sum += std::abs(err);
  }
  const auto n = static_cast<double>(forecasts.rows());
  return {std::sqrt(sq / n), abs_sum / n};
}

namespace {

struct CellAccumulator {
  double kld = 0.0;
  double jsd = 0.0;
  double score = 0.0;
  double width = 0.0;
  std::size_t outside = 0;
  std::size_t forecasts = 0;
  double e0_sq = 0.0;
  double e0_abs = 0.0;
};

struct WindowOutput {
  std::vector<std::pair<Method, SexForecasts>> forecasts;
};

int row_of_year(const LifeTableSeries& lt, int year) {
  const auto it = std::find(lt.years.begin(), lt.years.end(), year);
  if (it == lt.years.end()) throw DataError("year " + std::to_string(year) + " missing from data");
  return static_cast<int>(it - lt.years.begin());
}

template <typename Error>
[[noreturn]] void rethrow_with_window(const Error& e, int train_end, Method method) {
  throw Error("window ending " + std::to_string(train_end) + ", method " +
              std::string(to_string(method)) + ": " + e.what());
}

}  // namespace

MetricReport run_expanding_window(const LifeTableSeries& female, const LifeTableSeries& male,
                                  const WindowPlan& plan, const EvaluationOptions& options) {
  plan.validate();
  if (female.years != male.years) throw DataError("female and male series must share years");
  const DensityPanel actual_f = normalize_to_density(female);
  const DensityPanel actual_m = normalize_to_density(male);
  row_of_year(female, plan.train_start);
  row_of_year(female, plan.last_year);

  const int windows = plan.window_count();
  std::vector<int> order = options.window_order;
  if (order.empty()) {
    order.resize(static_cast<std::size_t>(windows));
    std::iota(order.begin(), order.end(), 0);
  }
  std::vector<WindowOutput> outputs(static_cast<std::size_t>(windows));
  for (int w : order) {
    if (w < 0 || w >= windows) throw DataError("window order index out of range");
    const int train_end = plan.train_end(w);
    const LifeTableSeries train_f = female.slice_years(plan.train_start, train_end);
    const LifeTableSeries train_m = male.slice_years(plan.train_start, train_end);
    ForecastOptions fo = options.forecast;
    fo.horizon = plan.horizon_for(w);
    fo.seed = derive_seed(options.forecast.seed, static_cast<std::uint64_t>(train_end));
    auto& out = outputs[static_cast<std::size_t>(w)];
    out.forecasts.clear();
    for (Method m : options.methods) {
      try {
        out.forecasts.emplace_back(m, forecast(m, train_f, train_m, fo));
      } catch (const NumericalError& e) {
        rethrow_with_window(e, train_end, m);
      } catch (const DataError& e) {
        rethrow_with_window(e, train_end, m);
      }
    }
  }

  // Deterministic reduction in (window, method, sex, horizon) order.
  using Key = std::tuple<int, int, int>;  // method index, sex, h
  std::map<Key, CellAccumulator> acc;
  MetricReport report;
  report.alpha = options.forecast.alpha;
  const double alpha = options.forecast.alpha;
  const auto ages = static_cast<double>(female.age_count());
  for (int w = 0; w < windows; ++w) {
    const int train_end = plan.train_end(w);
    for (std::size_t mi = 0; mi < outputs[static_cast<std::size_t>(w)].forecasts.size(); ++mi) {
      const auto& [method, pair] = outputs[static_cast<std::size_t>(w)].forecasts[mi];
      for (const ForecastResult* fr : {&pair.female, &pair.male}) {
        const DensityPanel& actual = fr->sex == Sex::Female ? actual_f : actual_m;
        for (int h = 1; h <= fr->horizon(); ++h) {
          const int row = row_of_year(female, train_end + h);
          const auto a = row_span(actual.d, row);
          const auto f = row_span(fr->point, h - 1);
          const auto lo = row_span(fr->lower, h - 1);
          const auto up = row_span(fr->upper, h - 1);
          auto& c = acc[{static_cast<int>(mi), static_cast<int>(fr->sex), h}];
          c.kld += kld(a, f);
          c.jsd += jsd_geometric(a, f);
          for (std::size_t x = 0; x < a.size(); ++x) {
            c.score += interval_score(lo[x], up[x], a[x], alpha);
            c.width += up[x] - lo[x];
            if (a[x] < lo[x] || a[x] > up[x]) ++c.outside;
          }
          const double err = life_expectancy(f, actual.ages) - life_expectancy(a, actual.ages);
          c.e0_sq += err * err;
          c.e0_abs += std::abs(err);
          ++c.forecasts;
          if (options.keep_forecasts) {
            report.windows.push_back({method, fr->sex, train_end, h,
                                      fr->point.row(h - 1).transpose(),
                                      fr->lower.row(h - 1).transpose(),
                                      fr->upper.row(h - 1).transpose(),
                                      actual.d.row(row).transpose()});
          }
        }
      }
    }
  }

  for (std::size_t mi = 0; mi < options.methods.size(); ++mi) {
    for (Sex sex : {Sex::Female, Sex::Male}) {
      for (int h = 1; h <= plan.max_horizon; ++h) {
        const auto it = acc.find({static_cast<int>(mi), static_cast<int>(sex), h});
        if (it == acc.end()) continue;
        const CellAccumulator& c = it->second;
        const auto count = static_cast<double>(c.forecasts);
        const double cells = ages * count;
        MetricCell cell;
        cell.method = options.methods[mi];
        cell.sex = sex;
        cell.selector = describe(options.forecast.selector);
        cell.h = h;
        cell.forecasts = static_cast<int>(c.forecasts);
        cell.kld = c.kld / cells;
        cell.jsd = c.jsd / cells;
        cell.score = c.score / cells;
        cell.width = c.width / cells;
        cell.ecp = 1.0 - static_cast<double>(c.outside) / cells;
        cell.cpd = std::abs(cell.ecp - (1.0 - alpha));
        cell.rmsfe_e0 = std::sqrt(c.e0_sq / count);
        cell.mafe_e0 = c.e0_abs / count;
        report.cells.push_back(cell);
      }
    }
  }
  return report;
}

}  // namespace mortcast
