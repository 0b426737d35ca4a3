// infoval command-line driver.
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "infoval/backtest.hpp"
#include "infoval/errors.hpp"
#include "infoval/experiments.hpp"
#include "infoval/prices.hpp"
#include "infoval/report.hpp"
#include "infoval/serialization.hpp"

namespace fs = std::filesystem;
using namespace infoval;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> replications;
  std::optional<unsigned> threads;
  bool paper_scale = false;
  std::string out = "out";
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "YAML configuration file");
  cmd->add_option("--seed", o.seed, "master seed (overrides the config)");
  cmd->add_option("--replications", o.replications, "Monte Carlo replications");
  cmd->add_option("--threads", o.threads, "worker threads, 0 = all cores");
  cmd->add_flag("--paper-scale", o.paper_scale, "original study sizes");
  cmd->add_option("--out", o.out, "output directory")->capture_default_str();
}

ExperimentConfig resolve(const CommonOptions& o, ExperimentConfig config = {}) {
  if (!o.config.empty()) config = load_config(o.config);
  if (o.paper_scale) apply_paper_scale(config);
  if (o.seed) config.seed = *o.seed;
  if (o.replications) config.replications = *o.replications;
  if (o.threads) config.threads = *o.threads;
  config.validate();
  return config;
}

void finish(const ExperimentReport& report, const std::string& out) {
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
  for (const auto& path : write_report(report, out)) std::cout << path.string() << "\n";
}

int simulate(const CommonOptions& o, std::optional<std::size_t> length) {
  const auto config = resolve(o);
  const std::size_t n = length.value_or(config.n);
  PriceTable table;
  table.dates = synthetic_dates(n + 1);
  if (const auto* g = std::get_if<GarchParams>(&config.dgp)) {
    const auto path = simulate_garch(*g, n, config.seed, config.burn_in);
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = 0.01 * path.returns[i];
    table.names = {"price"};
    table.columns = {prices_from_log_returns(r)};
  } else if (const auto* d = std::get_if<DccParams>(&config.dgp)) {
    const auto path = simulate_dcc(*d, n, config.seed, config.burn_in);
    table.names = {"price1", "price2"};
    table.columns.assign(2, std::vector<double>(n + 1, 100.0));
    for (std::size_t j = 0; j < 2; ++j) {
      for (std::size_t i = 0; i < n; ++i) {
        const double rel = 0.01 * path.returns(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        table.columns[j][i + 1] = table.columns[j][i] * (1.0 + rel);
      }
    }
  } else {
    throw ConfigError("simulate needs a garch or dcc dgp");
  }
  fs::create_directories(o.out);
  const auto file = fs::path(o.out) / "prices.csv";
  write_prices_csv(file, table);
  std::cout << file.string() << "\n";
  return 0;
}

// forecast,realization[,forecast_g] rows with a header line.
std::vector<std::vector<double>> read_columns(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<double>> cols;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw DataError(path.string() + ": line " + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
    }
    if (cols.empty()) cols.resize(row.size());
    if (row.size() != cols.size() || row.size() < 2) {
      throw DataError(path.string() + ": line " + std::to_string(lineno) + ": wrong column count");
    }
    for (std::size_t j = 0; j < row.size(); ++j) cols[j].push_back(row[j]);
  }
  if (cols.empty()) throw DataError(path.string() + ": no data rows");
  return cols;
}

int backtest_file(const CommonOptions& o, const std::string& file, double alpha, int h, bool upper) {
  const auto cols = read_columns(file);
  ExperimentReport report;
  report.kind = "backtest";
  report.provenance.version = INFOVAL_VERSION;
  report.provenance.notes.push_back("source " + file);
  const auto orientation = upper ? Orientation::UpperTail : Orientation::LowerTail;
  auto add = [&](const std::string& name, const std::vector<double>& f) {
    BacktestRow row;
    row.h = h;
    row.alpha = alpha;
    row.method = name;
    row.report = backtest(exceedance_indicators(f, cols[1], orientation, alpha, h));
    report.backtests.push_back(row);
  };
  add("F", cols[0]);
  if (cols.size() > 2) add("G", cols[2]);
  finish(report, o.out);
  return 0;
}

int run(int argc, char** argv) {
  CLI::App app{"Forecast evaluation under nested information sets"};
  app.require_subcommand(1);
  app.set_version_flag("--version", INFOVAL_VERSION);

  CommonOptions common;
  std::optional<std::size_t> length;
  auto* sim = app.add_subcommand("simulate", "write a synthetic price CSV from the configured model");
  add_common(sim, common);
  sim->add_option("-n,--length", length, "number of returns");

  auto* mean = app.add_subcommand("mean-scores", "huge-sample mean scores of two forecasters");
  add_common(mean, common);

  auto* power = app.add_subcommand("power", "rejection rates of the information-set test");
  add_common(power, common);

  std::string forecasts;
  double bt_alpha = 0.01;
  int bt_h = 1;
  bool upper = false;
  auto* bt = app.add_subcommand("backtest", "coverage and independence backtests");
  add_common(bt, common);
  bt->add_option("--forecasts", forecasts,
                 "CSV with forecast,realization[,forecast_g]; without it the configured simulation is used");
  bt->add_option("--alpha", bt_alpha, "quantile level")->capture_default_str();
  bt->add_option("--horizon", bt_h, "forecast horizon")->capture_default_str();
  bt->add_flag("--upper", upper, "count realizations above the forecast");

  std::vector<std::string> prices;
  auto* apply = app.add_subcommand("apply", "compare forecasters on price history");
  add_common(apply, common);
  apply->add_option("--prices", prices, "one or two date,price CSV files")->required()->expected(1, 2);

  MixtureSpec mix;
  std::size_t mix_n = 1000000;
  auto* mixture = app.add_subcommand("mixture-demo", "quantile versus log score on a two-component mixture");
  add_common(mixture, common);
  mixture->add_option("--alpha", mix.alpha)->capture_default_str();
  mixture->add_option("--sigma", mix.sigma)->capture_default_str();
  mixture->add_option("-n,--length", mix_n)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  if (sim->parsed()) return simulate(common, length);
  if (mean->parsed()) {
    finish(run_mean_score_experiment(resolve(common)), common.out);
  } else if (power->parsed()) {
    finish(run_power_study(resolve(common)), common.out);
  } else if (bt->parsed()) {
    if (!forecasts.empty()) return backtest_file(common, forecasts, bt_alpha, bt_h, upper);
    auto report = run_mean_score_experiment(resolve(common));
    report.kind = "backtest";
    report.rows.clear();
    finish(report, common.out);
  } else if (apply->parsed()) {
    std::vector<fs::path> files(prices.begin(), prices.end());
    finish(run_application(files, resolve(common)), common.out);
  } else if (mixture->parsed()) {
    ExperimentConfig defaults;
    defaults.seed = 7;
    defaults.dgp = mix;
    const auto config = resolve(common, defaults);
    if (const auto* m = std::get_if<MixtureSpec>(&config.dgp); m && !common.config.empty()) mix = *m;
    ExperimentReport report;
    report.kind = "mixture";
    report.mixture = run_mixture_demo(mix, mix_n, config.seed);
    report.provenance.seed = config.seed;
    report.provenance.version = INFOVAL_VERSION;
    report.provenance.config_hash = config_hash(config);
    finish(report, common.out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
}
