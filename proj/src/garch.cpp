#include "infoval/garch.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "infoval/errors.hpp"
#include "infoval/optimize.hpp"
#include "infoval/rng.hpp"
#include "infoval/stats.hpp"

namespace infoval {
namespace {

constexpr double kPersistenceCap = 1.0 - 1e-8;
constexpr double kBoundaryPersistence = 1.0 - 1e-6;
constexpr std::size_t kMinFitLength = 100;

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

void require_level(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
}

struct Mapped {
  double kappa, phi, beta;
  double s, share, logistic_b;
};

Mapped map_parameters(std::span<const double> theta) {
  Mapped m;
  m.kappa = std::exp(theta[0]);
  m.logistic_b = logistic(theta[1]);
  m.s = kPersistenceCap * m.logistic_b;
  m.share = logistic(theta[2]);
  m.phi = m.s * m.share;
  m.beta = m.s * (1.0 - m.share);
  return m;
}

// Negative Gaussian quasi-log-likelihood and its gradient in the
// unconstrained coordinates.
double negative_loglik(std::span<const double> theta, std::span<double> grad,
                       std::span<const double> r, double initial_var) {
  const Mapped m = map_parameters(theta);
  const bool want_grad = !grad.empty();

  double var = initial_var;
  double d_kappa = 0.0, d_phi = 0.0, d_beta = 0.0;
  double g_kappa = 0.0, g_phi = 0.0, g_beta = 0.0;
  CompensatedSum nll;
  for (std::size_t t = 0; t < r.size(); ++t) {
    if (t > 0) {
      const double r2 = r[t - 1] * r[t - 1];
      if (want_grad) {
        d_kappa = 1.0 + m.beta * d_kappa;
        d_phi = r2 + m.beta * d_phi;
        d_beta = var + m.beta * d_beta;
      }
      var = m.kappa + m.phi * r2 + m.beta * var;
    }
    if (!(var > 0.0) || !std::isfinite(var)) return std::numeric_limits<double>::infinity();
    const double r2t = r[t] * r[t];
    nll.add(0.5 * (std::log(var) + r2t / var));
    if (want_grad) {
      const double w = 0.5 * (1.0 / var - r2t / (var * var));
      g_kappa += w * d_kappa;
      g_phi += w * d_phi;
      g_beta += w * d_beta;
    }
  }
  if (want_grad) {
    const double ds_db = kPersistenceCap * m.logistic_b * (1.0 - m.logistic_b);
    const double dshare_dc = m.share * (1.0 - m.share);
    grad[0] = g_kappa * m.kappa;
    grad[1] = (g_phi * m.share + g_beta * (1.0 - m.share)) * ds_db;
    grad[2] = (g_phi - g_beta) * m.s * dshare_dc;
  }
  return nll.value() + 0.5 * static_cast<double>(r.size()) * std::log(2.0 * std::numbers::pi);
}

}  // namespace

void GarchParams::validate() const {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) {
    throw std::invalid_argument("GARCH: kappa must be positive");
  }
  if (!(phi >= 0.0) || !(beta >= 0.0)) {
    throw std::invalid_argument("GARCH: phi and beta must be nonnegative");
  }
  if (!(phi + beta < 1.0)) {
    throw std::invalid_argument("GARCH: phi + beta must be below one (covariance stationarity)");
  }
}

double GarchParams::unconditional_variance() const {
  validate();
  return kappa / (1.0 - phi - beta);
}

GarchParams garch_preset(int config) {
  switch (config) {
    case 1: return {0.01, 0.088, 0.902};
    case 2: return {0.02, 0.2, 0.78};
    case 3: return {0.05, 0.3, 0.65};
    default:
      throw std::invalid_argument("unknown GARCH configuration " + std::to_string(config));
  }
}

GarchPath simulate_garch(const GarchParams& params, std::size_t n, std::uint64_t seed,
                         std::size_t burn_in) {
  params.validate();
  if (n < 1) throw std::invalid_argument("simulate_garch: n must be >= 1");
  NormalStream eps(seed);
  GarchPath path;
  path.seed = seed;
  path.burn_in = burn_in;
  path.returns.resize(n);
  path.cond_var.resize(n);

  double var = params.unconditional_variance();
  for (std::size_t i = 0; i < burn_in + n; ++i) {
    const double r = std::sqrt(var) * eps();
    if (i >= burn_in) {
      path.returns[i - burn_in] = r;
      path.cond_var[i - burn_in] = var;
    }
    var = garch_next_variance(params, var, r);
  }
  path.next_var = var;
  return path;
}

std::vector<double> garch_filter(const GarchParams& params, std::span<const double> returns,
                                 double initial_var) {
  std::vector<double> out(returns.size() + 1);
  double var = initial_var;
  for (std::size_t t = 0; t < returns.size(); ++t) {
    out[t] = var;
    var = garch_next_variance(params, var, returns[t]);
  }
  out[returns.size()] = var;
  return out;
}

GarchFit fit_garch_qmle(std::span<const double> returns) {
  if (returns.size() < kMinFitLength) {
    throw std::invalid_argument("fit_garch_qmle: need at least 100 observations");
  }
  for (double r : returns) {
    if (!std::isfinite(r)) throw std::invalid_argument("fit_garch_qmle: non-finite return");
  }
  const double var0 = sample_variance(returns);
  if (!(var0 > 0.0)) throw DegenerateVarianceError("fit_garch_qmle: sample variance is zero");

  const std::vector<double> start = {std::log(0.05 * var0), logit(0.9 / kPersistenceCap),
                                     logit(0.1 / 0.9)};
  const Objective objective = [&](std::span<const double> theta, std::span<double> grad) {
    return negative_loglik(theta, grad, returns, var0);
  };
  MinimizeOptions options;
  options.f_tolerance = 1e-8;
  const MinimizeResult result = minimize(objective, start, options);

  const Mapped m = map_parameters(result.x);
  GarchFit fit;
  fit.params = {m.kappa, m.phi, m.beta};
  fit.loglik = -result.value;
  fit.converged = result.converged;
  fit.iterations = result.iterations;
  fit.boundary = m.phi + m.beta >= kBoundaryPersistence;
  fit.cond_var = garch_filter(fit.params, returns, var0);
  fit.next_var = fit.cond_var.back();
  fit.cond_var.pop_back();
  return fit;
}

std::string_view to_string(ForecastMethod method) {
  switch (method) {
    case ForecastMethod::ExactNormal: return "exact_normal";
    case ForecastMethod::MonteCarlo: return "monte_carlo";
    case ForecastMethod::UnconditionalEmpirical: return "unconditional_empirical";
    case ForecastMethod::SqrtTimeRule: return "sqrt_time_rule";
  }
  return "unknown";
}

QuantileForecast forecast_quantile_h1(double next_var, double alpha) {
  if (!(next_var > 0.0) || !std::isfinite(next_var)) {
    throw std::invalid_argument("forecast_quantile_h1: variance must be positive");
  }
  require_level(alpha);
  QuantileForecast f;
  f.h = 1;
  f.alpha = alpha;
  f.value = std::sqrt(next_var) * normal_quantile(alpha);
  f.method = ForecastMethod::ExactNormal;
  return f;
}

std::vector<QuantileForecast> forecast_quantiles_mc(const GarchParams& params, GarchState state,
                                                    int h, std::span<const double> alphas,
                                                    std::size_t m, std::uint64_t seed) {
  params.validate();
  if (!(state.var > 0.0) || !std::isfinite(state.var) || !std::isfinite(state.last_return)) {
    throw std::invalid_argument("forecast_quantile_mc: invalid state");
  }
  if (h < 2) throw std::invalid_argument("forecast_quantile_mc: horizon must be >= 2");
  if (m < 100) throw std::invalid_argument("forecast_quantile_mc: need at least 100 draws");
  for (double a : alphas) require_level(a);

  NormalStream eps(seed);
  const double first_var = garch_next_variance(params, state.var, state.last_return);
  std::vector<double> sums(m);
  for (std::size_t j = 0; j < m; ++j) {
    double var = first_var;
    double sum = 0.0;
    for (int k = 0; k < h; ++k) {
      const double r = std::sqrt(var) * eps();
      sum += r;
      var = garch_next_variance(params, var, r);
    }
    sums[j] = sum;
  }
  const auto values = empirical_quantiles_inplace(sums, alphas);
  std::vector<QuantileForecast> out(alphas.size());
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    out[i].h = h;
    out[i].alpha = alphas[i];
    out[i].value = values[i];
    out[i].method = ForecastMethod::MonteCarlo;
    out[i].mc_size = m;
  }
  return out;
}

QuantileForecast forecast_quantile_mc(const GarchParams& params, GarchState state, int h,
                                      double alpha, std::size_t m, std::uint64_t seed) {
  const double a[] = {alpha};
  return forecast_quantiles_mc(params, state, h, a, m, seed).front();
}

QuantileForecast unconditional_quantile(std::span<const double> h_step_returns, double alpha) {
  if (h_step_returns.empty()) throw std::invalid_argument("unconditional_quantile: empty sample");
  require_level(alpha);
  QuantileForecast f;
  f.alpha = alpha;
  f.value = empirical_quantile(h_step_returns, alpha);
  f.method = ForecastMethod::UnconditionalEmpirical;
  return f;
}

QuantileForecast sqrt_time_rule(double mean_1step, double sd_1step, int h, double alpha) {
  if (!(sd_1step > 0.0) || !std::isfinite(sd_1step)) {
    throw std::invalid_argument("sqrt_time_rule: standard deviation must be positive");
  }
  if (h < 1) throw std::invalid_argument("sqrt_time_rule: horizon must be >= 1");
  require_level(alpha);
  QuantileForecast f;
  f.h = h;
  f.alpha = alpha;
  f.value = std::sqrt(static_cast<double>(h)) * sd_1step * normal_quantile(alpha) +
            static_cast<double>(h) * mean_1step;
  f.method = ForecastMethod::SqrtTimeRule;
  return f;
}

std::vector<double> aggregate_h_step(std::span<const double> returns, int h,
                                     AggregationMode mode) {
  if (h < 1) throw std::invalid_argument("aggregate_h_step: horizon must be >= 1");
  const auto hs = static_cast<std::size_t>(h);
  if (hs > returns.size()) {
    throw std::invalid_argument("aggregate_h_step: horizon exceeds series length");
  }
  std::vector<double> out;
  if (mode == AggregationMode::Overlapping) {
    out.reserve(returns.size() - hs + 1);
    for (std::size_t i = 0; i + hs <= returns.size(); ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < hs; ++k) s += returns[i + k];
      out.push_back(s);
    }
  } else {
    out.reserve(returns.size() / hs);
    for (std::size_t i = 0; i + hs <= returns.size(); i += hs) {
      double s = 0.0;
      for (std::size_t k = 0; k < hs; ++k) s += returns[i + k];
      out.push_back(s);
    }
  }
  return out;
}

}  // namespace infoval
