#include "mortcast/cli.hpp"

#include "mortcast/annuity.hpp"
#include "mortcast/errors.hpp"
#include "mortcast/io.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <variant>

namespace mortcast::cli {

namespace {

struct Data {
  std::optional<LifeTableSeries> female;
  std::optional<LifeTableSeries> male;

  std::vector<const LifeTableSeries*> present() const {
    std::vector<const LifeTableSeries*> out;
    if (female) out.push_back(&*female);
    if (male) out.push_back(&*male);
    return out;
  }
};

Data load_data(const RunConfig& c) {
  validate(c);
  Data d;
  if (!c.female_path.empty()) d.female = read_hmd_lifetable(c.female_path, Sex::Female);
  if (!c.male_path.empty()) d.male = read_hmd_lifetable(c.male_path, Sex::Male);
  return d;
}

std::ofstream open_output(const RunConfig& c, const std::string& file) {
  std::filesystem::create_directories(c.output_dir);
  const auto path = std::filesystem::path(c.output_dir) / file;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  return out;
}

bool needs_both(Method m) { return m == Method::CdfMfts || m == Method::CdfMlfts; }

ForecastOptions forecast_options(const RunConfig& c) {
  ForecastOptions o;
  o.selector = c.selector;
  o.horizon = c.horizon;
  o.alpha = c.alpha;
  o.paths = c.paths;
  o.seed = c.seed;
  o.mfts_scaling = c.mfts_scaling;
  return o;
}

std::vector<ForecastResult> run_method(Method m, const Data& d, const ForecastOptions& o) {
  if (d.female && d.male) {
    SexForecasts both = forecast(m, *d.female, *d.male, o);
    return {std::move(both.female), std::move(both.male)};
  }
  if (needs_both(m)) {
    throw DataError(std::string(to_string(m)) + " needs both female and male life tables");
  }
  const LifeTableSeries& lt = d.female ? *d.female : *d.male;
  return {m == Method::Clr ? forecast_clr(lt, o) : forecast_cdf(lt, o)};
}

nlohmann::json config_json(const RunConfig& c) {
  nlohmann::json j;
  j["female"] = c.female_path;
  j["male"] = c.male_path;
  std::vector<std::string> methods;
  for (Method m : c.methods) methods.emplace_back(to_string(m));
  j["methods"] = methods;
  j["selector"] = describe(c.selector);
  if (const auto* evr = std::get_if<EigenvalueRatio>(&c.selector)) j["kmax"] = evr->kmax;
  j["horizon"] = c.horizon;
  j["alpha"] = c.alpha;
  j["seed"] = c.seed;
  j["paths"] = c.paths;
  return j;
}

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

}  // namespace

void cmd_describe(const RunConfig& c, std::ostream& log) {
  const Data d = load_data(c);
  auto summary = open_output(c, "describe.csv");
  summary << "sex,year,e0,gini,modal_age\n";
  for (const LifeTableSeries* lt : d.present()) {
    const DensityPanel dens = normalize_to_density(*lt);
    for (Eigen::Index t = 0; t < dens.d.rows(); ++t) {
      const auto row = row_span(dens.d, t);
      summary << to_string(lt->sex) << ',' << dens.years[static_cast<std::size_t>(t)] << ','
              << format_double(life_expectancy(row, dens.ages)) << ','
              << format_double(gini_equality_index(row, dens.ages)) << ','
              << modal_age(row, dens.ages) << '\n';
    }
    auto rainbow = open_output(c, "rainbow_" + std::string(to_string(lt->sex)) + ".csv");
    write_year_age_value(rainbow, dens.years, dens.ages, dens.d);
    log << to_string(lt->sex) << ": " << dens.d.rows() << " years ("
        << dens.years.front() << "-" << dens.years.back() << ")\n";
  }
}

void cmd_forecast(const RunConfig& c, std::ostream& log) {
  const Data d = load_data(c);
  const ForecastOptions o = forecast_options(c);
  std::vector<ForecastResult> results;
  for (Method m : c.methods) {
    for (auto& r : run_method(m, d, o)) results.push_back(std::move(r));
  }
  auto csv = open_output(c, "forecast.csv");
  write_forecast_header(csv);
  nlohmann::json manifest;
  manifest["config"] = config_json(c);
  manifest["forecasts"] = nlohmann::json::array();
  for (const auto& r : results) {
    write_forecast_rows(csv, r);
    manifest["forecasts"].push_back(manifest_entry(r));
    log << to_string(r.method) << " " << to_string(r.sex) << ": K =";
    for (const auto& s : r.stages) log << ' ' << s.name << ':' << s.k;
    log << "\n";
  }
  auto mf = open_output(c, "manifest.json");
  mf << manifest.dump(2) << '\n';
}

namespace {

WindowPlan window_plan(const RunConfig& c, const LifeTableSeries& lt) {
  WindowPlan plan;
  plan.train_start = c.train_start != 0 ? c.train_start : lt.years.front();
  plan.last_year = c.last_year != 0 ? c.last_year : lt.years.back();
  // By default the last 16 years are forecast, unless that would leave fewer
  // than the minimum number of training years.
  plan.first_test_year = c.first_test_year != 0
                             ? c.first_test_year
                             : std::max(plan.last_year - 15, plan.train_start + kMinTrainingYears);
  plan.max_horizon = c.horizon;
  return plan;
}

}  // namespace

void cmd_evaluate(const RunConfig& c, std::ostream& log) {
  const Data d = load_data(c);
  if (!d.female || !d.male) throw DataError("evaluate needs both female and male life tables");
  const WindowPlan plan = window_plan(c, *d.female);
  EvaluationOptions eo;
  eo.methods = c.methods;
  eo.forecast = forecast_options(c);
  eo.keep_forecasts = c.per_window;
  const MetricReport report = run_expanding_window(*d.female, *d.male, plan, eo);
  {
    auto csv = open_output(c, "metrics.csv");
    write_metrics_csv(csv, report);
  }
  {
    auto txt = open_output(c, "comparison.txt");
    txt << render_comparison(report);
  }
  if (c.per_window) {
    auto w = open_output(c, "windows.csv");
    w << "method,sex,train_end,h,age,point,lower,upper,actual\n";
    for (const auto& f : report.windows) {
      for (Eigen::Index x = 0; x < f.point.size(); ++x) {
        w << to_string(f.method) << ',' << to_string(f.sex) << ',' << f.train_end << ',' << f.h
          << ',' << x << ',' << format_double(f.point[x]) << ',' << format_double(f.lower[x]) << ','
          << format_double(f.upper[x]) << ',' << format_double(f.actual[x]) << '\n';
      }
    }
  }
  log << plan.window_count() << " windows, " << report.cells.size() << " metric cells\n";
}

void cmd_annuity(const RunConfig& c, std::ostream& log) {
  const Data d = load_data(c);
  ForecastOptions o = forecast_options(c);
  o.horizon = c.annuity_horizon;
  o.intervals = false;
  const std::vector<ForecastResult> results = run_method(c.annuity_method, d, o);
  const auto ages = default_pricing_ages();
  const auto maturities = default_pricing_maturities();
  std::vector<PriceCell> cells;
  std::ostringstream text;
  for (double eta : c.etas) {
    PricingConfig pc;
    pc.eta = eta;
    std::vector<std::vector<PriceCell>> per_sex;
    for (const auto& r : results) {
      const ForecastLifeTables tables = life_tables_from_densities(r.point, r.years, r.ages);
      per_sex.push_back(price_grid(tables, r.sex, ages, maturities, pc));
      cells.insert(cells.end(), per_sex.back().begin(), per_sex.back().end());
    }
    text << "Annuity prices, method " << to_string(c.annuity_method) << ", eta = "
         << format_double(eta) << "\n";
    text << pad("Age", 5);
    for (const auto& r : results) {
      for (int T : maturities) {
        text << pad(std::string(1, to_string(r.sex)[0] == 'f' ? 'F' : 'M') + " T=" + std::to_string(T), 9);
      }
    }
    text << '\n';
    for (std::size_t a = 0; a < ages.size(); ++a) {
      text << pad(std::to_string(ages[a]), 5);
      for (const auto& grid : per_sex) {
        for (std::size_t m = 0; m < maturities.size(); ++m) {
          const auto& cell = grid[a * maturities.size() + m];
          text << pad(cell.price ? fixed3(*cell.price) : std::string(), 9);
        }
      }
      text << '\n';
    }
    text << '\n';
  }
  {
    auto csv = open_output(c, "annuity.csv");
    write_annuity_csv(csv, cells);
  }
  auto txt = open_output(c, "annuity.txt");
  txt << text.str();
  log << cells.size() << " price cells\n";
}

std::string render_comparison(const MetricReport& report) {
  std::vector<Method> methods;
  int max_h = 0;
  for (const auto& c : report.cells) {
    if (std::find(methods.begin(), methods.end(), c.method) == methods.end()) methods.push_back(c.method);
    max_h = std::max(max_h, c.h);
  }
  struct Panel {
    std::string title;
    std::string first, second;
    std::function<double(const MetricCell&)> a, b;
  };
  const std::vector<Panel> panels{
      {"Point forecast errors (x 100)", "KLD", "JSD",
       [](const MetricCell& c) { return 100.0 * c.kld; }, [](const MetricCell& c) { return 100.0 * c.jsd; }},
      {"Interval forecast errors, nominal coverage " + fixed4(1.0 - report.alpha), "score", "CPD",
       [](const MetricCell& c) { return c.score; }, [](const MetricCell& c) { return c.cpd; }},
      {"Life expectancy forecast errors", "RMSFE", "MAFE",
       [](const MetricCell& c) { return c.rmsfe_e0; }, [](const MetricCell& c) { return c.mafe_e0; }}};

  auto find = [&](Method m, Sex s, int h) -> const MetricCell* {
    for (const auto& c : report.cells) {
      if (c.method == m && c.sex == s && c.h == h) return &c;
    }
    return nullptr;
  };

  std::ostringstream out;
  constexpr std::size_t w = 11;
  for (const auto& panel : panels) {
    out << panel.title << "\n";
    out << pad("Sex", 4) << pad("h", 5);
    for (Method m : methods) out << pad(std::string(to_string(m)), 2 * w);
    out << "\n" << pad("", 9);
    for (std::size_t i = 0; i < methods.size(); ++i) out << pad(panel.first, w) << pad(panel.second, w);
    out << "\n";
    for (Sex sex : {Sex::Female, Sex::Male}) {
      std::vector<std::vector<double>> a_cols(methods.size()), b_cols(methods.size());
      auto emit = [&](const std::string& label, const std::vector<double>& av, const std::vector<double>& bv) {
        const double amin = *std::min_element(av.begin(), av.end());
        const double bmin = *std::min_element(bv.begin(), bv.end());
        out << pad(label == "1" || label.empty() ? std::string(sex == Sex::Female ? "F" : "M") : "", 4);
        out << pad(label.empty() ? "Mean" : label, 5);
        for (std::size_t i = 0; i < av.size(); ++i) {
          out << pad(fixed4(av[i]) + (av[i] == amin ? "*" : " "), w)
              << pad(fixed4(bv[i]) + (bv[i] == bmin ? "*" : " "), w);
        }
        out << "\n";
      };
      bool any = false;
      for (int h = 1; h <= max_h; ++h) {
        std::vector<double> av, bv;
        for (std::size_t i = 0; i < methods.size(); ++i) {
          const MetricCell* c = find(methods[i], sex, h);
          if (c == nullptr) break;
          av.push_back(panel.a(*c));
          bv.push_back(panel.b(*c));
          a_cols[i].push_back(av.back());
          b_cols[i].push_back(bv.back());
        }
        if (av.size() != methods.size()) continue;
        any = true;
        emit(std::to_string(h), av, bv);
      }
      if (!any) continue;
      std::vector<double> am, bm;
      for (std::size_t i = 0; i < methods.size(); ++i) {
        double sa = 0.0, sb = 0.0;
        for (double v : a_cols[i]) sa += v;
        for (double v : b_cols[i]) sb += v;
        am.push_back(sa / static_cast<double>(a_cols[i].size()));
        bm.push_back(sb / static_cast<double>(b_cols[i].size()));
      }
      emit("", am, bm);
    }
    out << "\n";
  }
  return out.str();
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Forecast age distributions of life-table deaths and price temporary annuities"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<std::string> method;
  std::optional<int> k;
  bool evr = false;
  std::optional<double> alpha;
  std::optional<std::uint64_t> seed;
  std::vector<double> etas;
  std::optional<std::string> output;
  std::optional<int> paths;
  std::optional<int> horizon;
  bool per_window = false;

  std::vector<CLI::App*> subs;
  for (const char* name : {"describe", "forecast", "evaluate", "annuity"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "key=value configuration file")->required();
    sub->add_option("--method", method, "cdf-ufts | cdf-mfts | cdf-mlfts | clr");
    sub->add_option("--k", k, "fixed number of components");
    sub->add_flag("--evr", evr, "select the number of components by eigenvalue ratio");
    sub->add_option("--alpha", alpha, "significance level of the prediction intervals");
    sub->add_option("--seed", seed, "seed for interval simulation");
    sub->add_option("--eta", etas, "interest rate(s) for annuity pricing");
    sub->add_option("--output", output, "output directory");
    sub->add_option("--paths", paths, "simulated paths per forecast");
    sub->add_option("--horizon", horizon, "maximum forecast horizon");
    sub->add_flag("--per-window", per_window, "also write per-window forecasts (evaluate)");
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    RunConfig c = load_config(config_path);
    if (k) c.selector = FixedK{*k};
    if (evr && !std::holds_alternative<EigenvalueRatio>(c.selector)) c.selector = EigenvalueRatio{};
    if (alpha) c.alpha = *alpha;
    if (seed) c.seed = *seed;
    if (!etas.empty()) c.etas = etas;
    if (output) c.output_dir = *output;
    if (paths) c.paths = *paths;
    if (horizon) c.horizon = *horizon;
    if (per_window) c.per_window = true;
    const std::string name = app.get_subcommands().front()->get_name();
    if (method) {
      const Method m = parse_method(*method);
      c.methods = {m};
      c.annuity_method = m;
    }
    if (name == "describe") cmd_describe(c, out);
    else if (name == "forecast") cmd_forecast(c, out);
    else if (name == "evaluate") cmd_evaluate(c, out);
    else cmd_annuity(c, out);
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace mortcast::cli
