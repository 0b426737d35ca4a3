#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "infoval/backtest.hpp"
#include "infoval/dcc.hpp"
#include "infoval/dmtest.hpp"
#include "infoval/garch.hpp"
#include "infoval/scoring.hpp"

namespace infoval {

/// Y = B X1 + (1 - B) X2 with B ~ Ber(1/2), X1 ~ N(0, 1),
/// X2 ~ N(q_alpha (1 - sigma), sigma^2): both the marginal and the
/// B-conditional alpha-quantiles equal q_alpha.
struct MixtureSpec {
  double alpha = 0.05;
  double sigma = 2.0;

  void validate() const;
};

using Dgp = std::variant<GarchParams, DccParams, MixtureSpec>;

/// Forecasters. Ideal and Unconditional use the true data-generating process;
/// the rest are estimated on a rolling window.
enum class Method {
  Ideal,              // true conditional distribution
  Unconditional,      // empirical quantile of an independent simulated path
  SqrtTime,           // sqrt(h) s q_alpha + h m from the window
  RollingEmpirical,   // empirical quantile of overlapping h-step window sums
  GarchFit,           // GARCH(1,1) QMLE on the window (Monte Carlo for h > 1)
  DccFit,             // two-step DCC on the bivariate window, portfolio quantile
  PortfolioGarchFit,  // GARCH(1,1) QMLE on the portfolio return series
};

std::string_view to_string(Method method);
Method method_from_string(std::string_view name);

/// Quantile scoring function used for every (h, alpha) cell; alpha comes
/// from the cell.
struct ScorerSpec {
  QuantileScorer::Form form = QuantileScorer::Form::SStar;
  /// identity, x_over_alpha, exp or table
  std::string g_family = "x_over_alpha";
  std::vector<double> table_x;
  std::vector<double> table_y;

  QuantileScorer make(double alpha) const;
};

struct ExperimentConfig {
  Dgp dgp = garch_preset(1);
  std::vector<int> horizons = {1};
  std::vector<double> alphas = {0.01};
  /// Evaluation length of the huge-sample mean-score study.
  std::size_t n = 100000;
  /// Evaluation length for h = 1 when set.
  std::optional<std::size_t> n_h1;
  /// Length of the independent path behind the unconditional quantile.
  std::size_t unconditional_sample = 300000;
  std::size_t window = 500;
  std::size_t mc_size = 1000;
  std::size_t replications = 200;
  std::vector<std::size_t> sample_sizes = {250, 500, 1000, 1500};
  std::vector<double> levels = {0.05, 0.10};
  std::uint64_t seed = 1;
  /// Smaller (F) and larger (G) information sets; unset picks the default
  /// pair of the experiment.
  std::optional<Method> method_f;
  std::optional<Method> method_g;
  std::array<double, 2> weights = {0.5, 0.5};
  std::size_t burn_in = kDefaultBurnIn;
  /// Worker threads for replication loops; 0 uses the hardware count.
  unsigned threads = 0;
  ScorerSpec scorer;

  /// Throws ConfigError.
  void validate() const;
  std::size_t evaluation_length(int h) const;
  bool is_garch() const { return std::holds_alternative<GarchParams>(dgp); }
  bool is_dcc() const { return std::holds_alternative<DccParams>(dgp); }
  bool is_mixture() const { return std::holds_alternative<MixtureSpec>(dgp); }
};

/// Restores the original study sizes: 1000 replications, N = 100,000
/// (300,000 for h = 1, 500,000 for the bivariate model).
void apply_paper_scale(ExperimentConfig& config);

struct MeanScoreRow {
  int h = 1;
  double alpha = 0.01;
  std::size_t n = 0;
  double m_f = 0.0;
  double m_g = 0.0;
  double diff = 0.0;
  double rel_diff = 0.0;
  double sigma_hat = 0.0;
  double t_stat = 0.0;
  double p_value = 1.0;
  std::size_t truncation_lag = 0;
  bool fallback = false;
  bool identical = false;
};

struct BacktestRow {
  int h = 1;
  double alpha = 0.01;
  std::string method;
  BacktestReport report;
};

struct PowerCell {
  int h = 1;
  double alpha = 0.01;
  std::size_t n = 0;
  double level = 0.05;
  double power = 0.0;
  std::size_t replications = 0;
  /// Replications that raised an error; excluded from `power`.
  std::size_t failures = 0;
  std::size_t boundary_fits = 0;
  std::size_t total_fits = 0;
  /// More than 5% of replications failed.
  bool flagged = false;
};

struct ComparisonStats {
  double m_f = 0.0;
  double m_g = 0.0;
  double diff = 0.0;
  /// Standard error of the paired mean difference.
  double se = 0.0;
};

struct MixtureReport {
  MixtureSpec spec;
  std::size_t n = 0;
  double q_alpha = 0.0;
  /// Alpha-quantile of the unconditional mixture, solved numerically.
  double forecast_f = 0.0;
  /// Component quantiles given B = 1 and B = 0.
  double forecast_g_b1 = 0.0;
  double forecast_g_b0 = 0.0;
  ComparisonStats quantile_score;
  ComparisonStats log_score;
  /// |diff| <= 3 se for the quantile score.
  bool quantile_indistinguishable = false;
  /// diff > 3 se for the log score.
  bool log_score_separates = false;
};

struct Provenance {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string version;
  std::vector<std::string> notes;
};

struct ExperimentReport {
  std::string kind;
  std::string method_f;
  std::string method_g;
  std::vector<MeanScoreRow> rows;
  std::vector<PowerCell> power;
  std::vector<BacktestRow> backtests;
  std::optional<MixtureReport> mixture;
  Provenance provenance;
  std::vector<std::string> warnings;
};

/// Aligned forecast streams for one horizon.
struct ForecastStreams {
  int h = 1;
  std::vector<double> realizations;
  /// f[a][i], g[a][i]: forecasts for alphas[a] at origin i.
  std::vector<std::vector<double>> f;
  std::vector<std::vector<double>> g;
  std::size_t boundary_fits = 0;
  std::size_t total_fits = 0;
};

/// Scores both streams and runs the information-set test.
MeanScoreRow compare_streams(std::span<const double> forecasts_f, std::span<const double> forecasts_g,
                             std::span<const double> realizations, int h, double alpha,
                             const QuantileScorer& scorer);

/// Rolling-window forecasts on a univariate return series. Origins run from
/// `window` to size - h; the target is the h-step sum starting at the origin.
/// `truth` (parameters and conditional variances of the series) enables the
/// Ideal method.
struct GarchTruth {
  GarchParams params;
  std::span<const double> cond_var;
};
ForecastStreams rolling_forecasts(std::span<const double> returns, int h,
                                  std::span<const double> alphas, Method method_f, Method method_g,
                                  const ExperimentConfig& config, std::uint64_t seed,
                                  std::optional<GarchTruth> truth = std::nullopt);

/// Rolling-window one-step forecasts of the portfolio of a bivariate series.
/// `truth_h` (true conditional covariances) enables the Ideal method.
ForecastStreams rolling_forecasts_bivariate(const ReturnMatrix& returns,
                                            std::span<const double> portfolio,
                                            std::span<const double> alphas, Method method_f,
                                            Method method_g, const ExperimentConfig& config,
                                            std::uint64_t seed,
                                            std::span<const Mat2> truth_h = {});

ExperimentReport run_mean_score_experiment(const ExperimentConfig& config);
ExperimentReport run_power_study(const ExperimentConfig& config);
ExperimentReport run_application(std::span<const std::filesystem::path> price_files,
                                 const ExperimentConfig& config);
MixtureReport run_mixture_demo(const MixtureSpec& spec, std::size_t n, std::uint64_t seed);

/// Application run on returns already in memory; run_application reduces to
/// this after parsing. Univariate input uses log-returns, bivariate input
/// relative returns.
ExperimentReport run_application_on_returns(const std::vector<std::vector<double>>& returns,
                                            const ExperimentConfig& config);

}  // namespace infoval
