#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace infoval {

/// GARCH(1,1): R_t = sigma_t eps_t, sigma_t^2 = kappa + phi R_{t-1}^2 + beta sigma_{t-1}^2.
struct GarchParams {
  double kappa = 0.01;
  double phi = 0.088;
  double beta = 0.902;

  /// Throws std::invalid_argument unless kappa > 0, phi, beta >= 0, phi + beta < 1.
  void validate() const;
  double persistence() const noexcept { return phi + beta; }
  double unconditional_variance() const;

  bool operator==(const GarchParams&) const = default;
};

/// Parameter sets used in the conditional-vs-unconditional study (1-based).
GarchParams garch_preset(int config);

struct GarchPath {
  std::vector<double> returns;
  /// cond_var[t] is the variance of returns[t] given the past.
  std::vector<double> cond_var;
  /// Variance of the first return after the path.
  double next_var = 0.0;
  std::uint64_t seed = 0;
  std::size_t burn_in = 0;

  std::size_t size() const noexcept { return returns.size(); }
};

inline constexpr std::size_t kDefaultBurnIn = 500;

/// Simulates n returns after discarding `burn_in` draws; the recursion starts at
/// the stationary variance.
GarchPath simulate_garch(const GarchParams& params, std::size_t n, std::uint64_t seed,
                         std::size_t burn_in = kDefaultBurnIn);

/// One recursion step.
inline double garch_next_variance(const GarchParams& p, double var, double ret) noexcept {
  return p.kappa + p.phi * ret * ret + p.beta * var;
}

/// Conditional variances of `returns` under `params`, started at `initial_var`.
/// Element n of the result is the one-step-ahead variance after the sample.
std::vector<double> garch_filter(const GarchParams& params, std::span<const double> returns,
                                 double initial_var);

struct GarchFit {
  GarchParams params;
  std::vector<double> cond_var;
  /// One-step-ahead variance for the observation following the sample.
  double next_var = 0.0;
  double loglik = 0.0;
  /// Persistence phi + beta reached 1 - 1e-6.
  bool boundary = false;
  bool converged = false;
  int iterations = 0;
};

/// Gaussian quasi-maximum likelihood on a zero-mean series of at least 100
/// observations. The search runs in an unconstrained parameterization
///   kappa = exp(a), phi + beta = s_max * logistic(b), phi = (phi + beta) * logistic(c)
/// from (0.05 var, 0.1, 0.8) with sigma_0^2 = sample variance.
/// Throws DegenerateVarianceError for a zero sample variance.
GarchFit fit_garch_qmle(std::span<const double> returns);

enum class ForecastMethod { ExactNormal, MonteCarlo, UnconditionalEmpirical, SqrtTimeRule };

std::string_view to_string(ForecastMethod method);

struct QuantileForecast {
  std::size_t t = 0;
  int h = 1;
  double alpha = 0.01;
  double value = 0.0;
  ForecastMethod method = ForecastMethod::ExactNormal;
  /// Monte Carlo sample size, zero for the other methods.
  std::size_t mc_size = 0;
};

/// sigma_{t+1} q_alpha.
QuantileForecast forecast_quantile_h1(double next_var, double alpha);

/// State of the recursion at the forecast origin.
struct GarchState {
  double var;       // sigma_t^2
  double last_return;  // R_t
};

/// Empirical alpha-quantile (rank ceil(alpha m)) of m simulated h-step sums
/// R_{t+1} + ... + R_{t+h}. Requires h >= 2, m >= 100.
QuantileForecast forecast_quantile_mc(const GarchParams& params, GarchState state, int h,
                                      double alpha, std::size_t m, std::uint64_t seed);

/// Same simulation, several levels read from one Monte Carlo sample.
std::vector<QuantileForecast> forecast_quantiles_mc(const GarchParams& params, GarchState state,
                                                    int h, std::span<const double> alphas,
                                                    std::size_t m, std::uint64_t seed);

/// Rank ceil(alpha n) order statistic of the supplied h-step returns.
QuantileForecast unconditional_quantile(std::span<const double> h_step_returns, double alpha);

/// sqrt(h) s q_alpha + h m.
QuantileForecast sqrt_time_rule(double mean_1step, double sd_1step, int h, double alpha);

enum class AggregationMode { Overlapping, Disjoint };

/// h-step sums; overlapping gives n - h + 1 values, disjoint floor(n / h).
std::vector<double> aggregate_h_step(std::span<const double> returns, int h,
                                     AggregationMode mode = AggregationMode::Overlapping);

}  // namespace infoval
