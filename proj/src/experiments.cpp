#include "infoval/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <boost/math/tools/roots.hpp>

#include "infoval/errors.hpp"
#include "infoval/parallel.hpp"
#include "infoval/prices.hpp"
#include "infoval/rng.hpp"
#include "infoval/serialization.hpp"
#include "infoval/stats.hpp"

#ifndef INFOVAL_VERSION
#define INFOVAL_VERSION "dev"
#endif

namespace infoval {
namespace {

// Top-level seed streams.
constexpr std::uint64_t kStreamMeanScore = 1;
constexpr std::uint64_t kStreamPower = 2;
constexpr std::uint64_t kStreamUnconditional = 3;
constexpr std::uint64_t kStreamApplication = 5;
// Per-forecaster substreams.
constexpr std::uint64_t kTagF = 0xF;
constexpr std::uint64_t kTagG = 0x6;

constexpr double kFailureFlagFraction = 0.05;

template <class Fn>
auto with_context(const std::string& context, Fn&& fn) {
  try {
    return fn();
  } catch (const DegenerateVarianceError& e) {
    throw DegenerateVarianceError(context + ": " + e.what());
  } catch (const InsufficientSampleError& e) {
    throw InsufficientSampleError(context + ": " + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(context + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(context + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(context + ": " + e.what());
  }
}

std::string cell_label(int h, double alpha) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "h=%d alpha=%g", h, alpha);
  return buf;
}

// Whether a method draws Monte Carlo samples at this horizon.
bool is_stochastic(Method m, int h) {
  return h > 1 && (m == Method::Ideal || m == Method::GarchFit);
}

std::vector<double> standard_quantiles(std::span<const double> alphas) {
  std::vector<double> q;
  q.reserve(alphas.size());
  for (double a : alphas) q.push_back(normal_quantile(a));
  return q;
}

std::vector<double> weighted_portfolio(const ReturnMatrix& r, const std::array<double, 2>& w) {
  std::vector<double> y(static_cast<std::size_t>(r.rows()));
  for (Eigen::Index t = 0; t < r.rows(); ++t) {
    y[static_cast<std::size_t>(t)] = w[0] * r(t, 0) + w[1] * r(t, 1);
  }
  return y;
}

void add_backtests(ExperimentReport& report, const ForecastStreams& s, std::span<const double> alphas,
                   const std::string& name_f, const std::string& name_g) {
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    for (int which = 0; which < 2; ++which) {
      const auto& forecasts = which == 0 ? s.f[a] : s.g[a];
      try {
        BacktestRow row;
        row.h = s.h;
        row.alpha = alphas[a];
        row.method = which == 0 ? name_f : name_g;
        row.report = backtest(exceedance_indicators(forecasts, s.realizations,
                                                    Orientation::LowerTail, alphas[a], s.h));
        report.backtests.push_back(std::move(row));
      } catch (const InsufficientSampleError&) {
        report.warnings.push_back("backtest skipped for " + cell_label(s.h, alphas[a]) +
                                  ": fewer than 100 forecasts");
      }
    }
  }
}

ExperimentReport start_report(const ExperimentConfig& config, std::string kind, Method f,
                              Method g) {
  ExperimentReport report;
  report.kind = std::move(kind);
  report.method_f = std::string(to_string(f));
  report.method_g = std::string(to_string(g));
  report.provenance.config_hash = config_hash(config);
  report.provenance.seed = config.seed;
  report.provenance.version = INFOVAL_VERSION;
  return report;
}

}  // namespace

void MixtureSpec::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("mixture: alpha must lie in (0, 1)");
  if (!(sigma > 1.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("mixture: sigma must exceed one");
  }
}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::Ideal: return "ideal";
    case Method::Unconditional: return "unconditional";
    case Method::SqrtTime: return "sqrt_time";
    case Method::RollingEmpirical: return "rolling_empirical";
    case Method::GarchFit: return "garch_fit";
    case Method::DccFit: return "dcc_fit";
    case Method::PortfolioGarchFit: return "portfolio_garch_fit";
  }
  return "unknown";
}

Method method_from_string(std::string_view name) {
  for (Method m : {Method::Ideal, Method::Unconditional, Method::SqrtTime, Method::RollingEmpirical,
                   Method::GarchFit, Method::DccFit, Method::PortfolioGarchFit}) {
    if (to_string(m) == name) return m;
  }
  throw ConfigError("unknown forecasting method '" + std::string(name) + "'");
}

QuantileScorer ScorerSpec::make(double alpha) const {
  if (form == QuantileScorer::Form::SStar) return QuantileScorer::sstar(alpha);
  if (g_family == "identity") return QuantileScorer::general(alpha, MonotoneFunction::identity());
  if (g_family == "x_over_alpha") {
    return QuantileScorer::general(alpha, MonotoneFunction::scaled(1.0 / alpha));
  }
  if (g_family == "exp") return QuantileScorer::general(alpha, MonotoneFunction::exponential());
  if (g_family == "table") {
    return QuantileScorer::general(alpha, MonotoneFunction::tabulated(table_x, table_y));
  }
  throw ConfigError("unknown transform family '" + g_family + "'");
}

void ExperimentConfig::validate() const {
  try {
    std::visit([](const auto& d) { d.validate(); }, dgp);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid data-generating process: ") + e.what());
  }
  if (horizons.empty()) throw ConfigError("horizons must not be empty");
  for (int h : horizons) {
    if (h < 1) throw ConfigError("every horizon must be >= 1");
  }
  if (alphas.empty()) throw ConfigError("alphas must not be empty");
  for (double a : alphas) {
    if (!(a > 0.0 && a < 1.0)) throw ConfigError("every alpha must lie in (0, 1)");
  }
  if (window < 100) throw ConfigError("window must be >= 100");
  if (replications < 1) throw ConfigError("replications must be >= 1");
  if (mc_size < 100) throw ConfigError("mc_size must be >= 100");
  if (n < 1) throw ConfigError("n must be >= 1");
  if (n_h1 && *n_h1 < 1) throw ConfigError("n_h1 must be >= 1");
  if (unconditional_sample < 1) throw ConfigError("unconditional_sample must be >= 1");
  for (double l : levels) {
    if (!(l > 0.0 && l <= 1.0)) throw ConfigError("test levels must lie in (0, 1]");
  }
  for (auto s : sample_sizes) {
    if (s < 1) throw ConfigError("sample sizes must be >= 1");
  }
  try {
    PortfolioSpec{weights, 1.0}.validate();
    (void)scorer.make(alphas.front());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (is_dcc() && !(horizons.size() == 1 && horizons.front() == 1)) {
    throw ConfigError("the bivariate model supports horizon 1 only");
  }
}

std::size_t ExperimentConfig::evaluation_length(int h) const {
  return (h == 1 && n_h1) ? *n_h1 : n;
}

void apply_paper_scale(ExperimentConfig& config) {
  config.replications = 1000;
  config.unconditional_sample = 300000;
  if (config.is_dcc()) {
    config.n = 500000;
    config.n_h1.reset();
  } else {
    config.n = 100000;
    config.n_h1 = 300000;
  }
}

MeanScoreRow compare_streams(std::span<const double> forecasts_f, std::span<const double> forecasts_g,
                             std::span<const double> realizations, int h, double alpha,
                             const QuantileScorer& scorer) {
  const MeanScore sf = mean_score(forecasts_f, realizations, scorer);
  const MeanScore sg = mean_score(forecasts_g, realizations, scorer);
  const DmTestResult dm = dm_test(sf.series, sg.series, h);
  MeanScoreRow row;
  row.h = h;
  row.alpha = alpha;
  row.n = realizations.size();
  row.m_f = sf.mean;
  row.m_g = sg.mean;
  row.diff = row.m_f - row.m_g;
  row.rel_diff = row.m_f != 0.0 ? row.diff / row.m_f : 0.0;
  row.sigma_hat = dm.sigma_hat;
  row.t_stat = dm.t_stat;
  row.p_value = dm.p_value;
  row.truncation_lag = dm.truncation_lag;
  row.fallback = dm.fallback_flag;
  row.identical = dm.identical_forecasts;
  return row;
}

ForecastStreams rolling_forecasts(std::span<const double> returns, int h,
                                  std::span<const double> alphas, Method method_f, Method method_g,
                                  const ExperimentConfig& config, std::uint64_t seed,
                                  std::optional<GarchTruth> truth) {
  if (h < 1) throw std::invalid_argument("rolling_forecasts: horizon must be >= 1");
  const std::size_t window = config.window;
  const auto hs = static_cast<std::size_t>(h);
  if (returns.size() < window + hs) {
    throw DataError("rolling_forecasts: need at least window + h returns, got " +
                    std::to_string(returns.size()));
  }
  if (truth && truth->cond_var.size() < returns.size()) {
    throw std::invalid_argument("rolling_forecasts: conditional variances do not cover the series");
  }
  const std::size_t origins = returns.size() - hs + 1 - window;
  const std::size_t A = alphas.size();
  const auto q = standard_quantiles(alphas);

  ForecastStreams s;
  s.h = h;
  s.realizations.resize(origins);
  s.f.assign(A, std::vector<double>(origins));
  s.g.assign(A, std::vector<double>(origins));

  std::vector<double> scratch;
  auto produce = [&](Method m, std::uint64_t tag, std::size_t origin, std::size_t i,
                     std::vector<std::vector<double>>& dest) {
    const auto win = returns.subspan(origin - window, window);
    switch (m) {
      case Method::SqrtTime: {
        const double mean = compensated_mean(win);
        const double sd = std::sqrt(sample_variance(win, true));
        for (std::size_t a = 0; a < A; ++a) {
          dest[a][i] = sqrt_time_rule(mean, sd, h, alphas[a]).value;
        }
        break;
      }
      case Method::RollingEmpirical: {
        scratch = aggregate_h_step(win, h);
        const auto v = empirical_quantiles_inplace(scratch, alphas);
        for (std::size_t a = 0; a < A; ++a) dest[a][i] = v[a];
        break;
      }
      case Method::GarchFit:
      case Method::PortfolioGarchFit: {
        const GarchFit fit = fit_garch_qmle(win);
        ++s.total_fits;
        if (fit.boundary) ++s.boundary_fits;
        if (h == 1) {
          const double sd = std::sqrt(fit.next_var);
          for (std::size_t a = 0; a < A; ++a) dest[a][i] = sd * q[a];
        } else {
          const auto mc = forecast_quantiles_mc(fit.params, {fit.cond_var.back(), win.back()}, h,
                                                alphas, config.mc_size,
                                                derive_seed(seed, {tag, origin}));
          for (std::size_t a = 0; a < A; ++a) dest[a][i] = mc[a].value;
        }
        break;
      }
      case Method::Ideal: {
        if (!truth) throw ConfigError("method 'ideal' needs a simulated series");
        if (h == 1) {
          const double sd = std::sqrt(truth->cond_var[origin]);
          for (std::size_t a = 0; a < A; ++a) dest[a][i] = sd * q[a];
        } else {
          const auto mc = forecast_quantiles_mc(
              truth->params, {truth->cond_var[origin - 1], returns[origin - 1]}, h, alphas,
              config.mc_size, derive_seed(seed, {tag, origin}));
          for (std::size_t a = 0; a < A; ++a) dest[a][i] = mc[a].value;
        }
        break;
      }
      default:
        throw ConfigError("method '" + std::string(to_string(m)) +
                          "' is not available for rolling univariate forecasts");
    }
  };

  const bool share = method_f == method_g && !is_stochastic(method_f, h);
  for (std::size_t i = 0; i < origins; ++i) {
    const std::size_t origin = window + i;
    double y = 0.0;
    for (std::size_t k = 0; k < hs; ++k) y += returns[origin + k];
    s.realizations[i] = y;
    produce(method_f, kTagF, origin, i, s.f);
    if (share) {
      for (std::size_t a = 0; a < A; ++a) s.g[a][i] = s.f[a][i];
    } else {
      produce(method_g, kTagG, origin, i, s.g);
    }
  }
  return s;
}

ForecastStreams rolling_forecasts_bivariate(const ReturnMatrix& returns,
                                            std::span<const double> portfolio,
                                            std::span<const double> alphas, Method method_f,
                                            Method method_g, const ExperimentConfig& config,
                                            std::uint64_t seed, std::span<const Mat2> truth_h) {
  (void)seed;
  const std::size_t window = config.window;
  const auto T = static_cast<std::size_t>(returns.rows());
  if (portfolio.size() != T) {
    throw std::invalid_argument("rolling_forecasts_bivariate: portfolio length mismatch");
  }
  if (T < window + 1) {
    throw DataError("rolling_forecasts_bivariate: need at least window + 1 observations");
  }
  if (!truth_h.empty() && truth_h.size() < T) {
    throw std::invalid_argument("rolling_forecasts_bivariate: covariances do not cover the series");
  }
  const std::size_t origins = T - window;
  const std::size_t A = alphas.size();
  const auto q = standard_quantiles(alphas);
  const std::array<double, 2>& w = config.weights;
  const Vec2 wv(w[0], w[1]);

  ForecastStreams s;
  s.h = 1;
  s.realizations.assign(portfolio.begin() + static_cast<std::ptrdiff_t>(window), portfolio.end());
  s.f.assign(A, std::vector<double>(origins));
  s.g.assign(A, std::vector<double>(origins));

  std::vector<double> scratch;
  auto produce = [&](Method m, std::size_t origin, std::size_t i,
                     std::vector<std::vector<double>>& dest) {
    const auto win = portfolio.subspan(origin - window, window);
    auto fill_sd = [&](double sd) {
      for (std::size_t a = 0; a < A; ++a) dest[a][i] = sd * q[a];
    };
    switch (m) {
      case Method::PortfolioGarchFit:
      case Method::GarchFit: {
        const GarchFit fit = fit_garch_qmle(win);
        ++s.total_fits;
        if (fit.boundary) ++s.boundary_fits;
        fill_sd(std::sqrt(fit.next_var));
        break;
      }
      case Method::SqrtTime: {
        const double mean = compensated_mean(win);
        const double sd = std::sqrt(sample_variance(win, true));
        for (std::size_t a = 0; a < A; ++a) dest[a][i] = sqrt_time_rule(mean, sd, 1, alphas[a]).value;
        break;
      }
      case Method::RollingEmpirical: {
        scratch.assign(win.begin(), win.end());
        const auto v = empirical_quantiles_inplace(scratch, alphas);
        for (std::size_t a = 0; a < A; ++a) dest[a][i] = v[a];
        break;
      }
      case Method::DccFit: {
        const ReturnMatrix block = returns.middleRows(static_cast<Eigen::Index>(origin - window),
                                                      static_cast<Eigen::Index>(window));
        const DccFit fit = fit_dcc_two_step(block);
        s.total_fits += 1;
        if (fit.boundary || fit.margins_boundary) ++s.boundary_fits;
        const double var = wv.dot(fit.next_h * wv);
        if (!(var > 0.0)) throw DegenerateVarianceError("DCC forecast variance is not positive");
        fill_sd(std::sqrt(var));
        break;
      }
      case Method::Ideal: {
        if (truth_h.empty()) throw ConfigError("method 'ideal' needs a simulated series");
        fill_sd(std::sqrt(wv.dot(truth_h[origin] * wv)));
        break;
      }
      default:
        throw ConfigError("method '" + std::string(to_string(m)) +
                          "' is not available for bivariate rolling forecasts");
    }
  };

  for (std::size_t i = 0; i < origins; ++i) {
    const std::size_t origin = window + i;
    produce(method_f, origin, i, s.f);
    if (method_f == method_g) {
      for (std::size_t a = 0; a < A; ++a) s.g[a][i] = s.f[a][i];
    } else {
      produce(method_g, origin, i, s.g);
    }
  }
  return s;
}

namespace {

// Huge-sample forecasts for the GARCH mean-score study: origin o forecasts
// the h-step sum of returns o+1 .. o+h.
void garch_sample_forecasts(Method m, const GarchParams& params, const GarchPath& path,
                            std::size_t N, int h, std::span<const double> alphas,
                            const ExperimentConfig& config, std::uint64_t seed, std::uint64_t tag,
                            std::vector<std::vector<double>>& dest) {
  const std::size_t A = alphas.size();
  dest.assign(A, std::vector<double>(N));
  switch (m) {
    case Method::Ideal: {
      if (h == 1) {
        const auto q = standard_quantiles(alphas);
        for (std::size_t o = 0; o < N; ++o) {
          const double sd = std::sqrt(path.cond_var[o + 1]);
          for (std::size_t a = 0; a < A; ++a) dest[a][o] = sd * q[a];
        }
      } else {
        std::vector<std::vector<QuantileForecast>> per_origin(N);
        parallel_for(N, config.threads, [&](std::size_t o) {
          per_origin[o] = forecast_quantiles_mc(params, {path.cond_var[o], path.returns[o]}, h,
                                                alphas, config.mc_size,
                                                derive_seed(seed, {tag, o}));
        });
        for (std::size_t o = 0; o < N; ++o) {
          for (std::size_t a = 0; a < A; ++a) dest[a][o] = per_origin[o][a].value;
        }
      }
      break;
    }
    case Method::Unconditional: {
      const auto independent = simulate_garch(params, config.unconditional_sample + h - 1,
                                              derive_seed(config.seed, {kStreamUnconditional,
                                                                        static_cast<std::uint64_t>(h)}),
                                              config.burn_in);
      auto sums = aggregate_h_step(independent.returns, h);
      const auto v = empirical_quantiles_inplace(sums, alphas);
      for (std::size_t a = 0; a < A; ++a) std::fill(dest[a].begin(), dest[a].end(), v[a]);
      break;
    }
    default:
      throw ConfigError("method '" + std::string(to_string(m)) +
                        "' is not available in the huge-sample study of a univariate GARCH");
  }
}

void dcc_sample_forecasts(Method m, const DccParams& params, const DccPath& path,
                          std::span<const double> portfolio, std::size_t N,
                          std::span<const double> alphas, const ExperimentConfig& config,
                          std::vector<std::vector<double>>& dest, std::size_t& boundary_fits) {
  const std::size_t A = alphas.size();
  const auto q = standard_quantiles(alphas);
  const Vec2 wv(config.weights[0], config.weights[1]);
  dest.assign(A, std::vector<double>(N));
  switch (m) {
    case Method::Ideal:
      for (std::size_t o = 0; o < N; ++o) {
        const double sd = std::sqrt(wv.dot(path.h_path[o + 1] * wv));
        for (std::size_t a = 0; a < A; ++a) dest[a][o] = sd * q[a];
      }
      break;
    case Method::GarchFit:
    case Method::PortfolioGarchFit: {
      const GarchFit fit = fit_garch_qmle(portfolio.subspan(0, N + 1));
      if (fit.boundary) ++boundary_fits;
      for (std::size_t o = 0; o < N; ++o) {
        const double sd = std::sqrt(fit.cond_var[o + 1]);
        for (std::size_t a = 0; a < A; ++a) dest[a][o] = sd * q[a];
      }
      break;
    }
    case Method::Unconditional: {
      const auto independent = simulate_dcc(params, config.unconditional_sample,
                                            derive_seed(config.seed, {kStreamUnconditional, 1}),
                                            config.burn_in);
      auto y = weighted_portfolio(independent.returns, config.weights);
      const auto v = empirical_quantiles_inplace(y, alphas);
      for (std::size_t a = 0; a < A; ++a) std::fill(dest[a].begin(), dest[a].end(), v[a]);
      break;
    }
    default:
      throw ConfigError("method '" + std::string(to_string(m)) +
                        "' is not available in the huge-sample study of the bivariate model");
  }
}

}  // namespace

ExperimentReport run_mean_score_experiment(const ExperimentConfig& config) {
  config.validate();
  if (config.is_mixture()) throw ConfigError("mean-score study needs a GARCH or DCC process");
  const std::vector<double>& alphas = config.alphas;

  if (const auto* params = std::get_if<GarchParams>(&config.dgp)) {
    const Method mf = config.method_f.value_or(Method::Unconditional);
    const Method mg = config.method_g.value_or(Method::Ideal);
    ExperimentReport report = start_report(config, "mean-scores", mf, mg);
    report.provenance.notes.push_back(
        "one simulated path per horizon, shared across alpha levels");
    report.provenance.notes.push_back("unconditional quantile from an independent path of " +
                                      std::to_string(config.unconditional_sample) +
                                      " overlapping h-step returns");
    for (int h : config.horizons) {
      const std::string ctx = "mean-score study, h=" + std::to_string(h);
      with_context(ctx, [&] {
        const std::size_t N = config.evaluation_length(h);
        const auto hs = static_cast<std::size_t>(h);
        const std::uint64_t seed_h =
            derive_seed(config.seed, {kStreamMeanScore, static_cast<std::uint64_t>(h)});
        const GarchPath path = simulate_garch(*params, N + hs, seed_h, config.burn_in);

        ForecastStreams s;
        s.h = h;
        s.realizations.resize(N);
        for (std::size_t o = 0; o < N; ++o) {
          double y = 0.0;
          for (std::size_t k = 1; k <= hs; ++k) y += path.returns[o + k];
          s.realizations[o] = y;
        }
        garch_sample_forecasts(mf, *params, path, N, h, alphas, config, seed_h, kTagF, s.f);
        if (mf == mg && !is_stochastic(mf, h)) {
          s.g = s.f;
        } else {
          garch_sample_forecasts(mg, *params, path, N, h, alphas, config, seed_h, kTagG, s.g);
        }
        for (std::size_t a = 0; a < alphas.size(); ++a) {
          report.rows.push_back(compare_streams(s.f[a], s.g[a], s.realizations, h, alphas[a],
                                                config.scorer.make(alphas[a])));
        }
        add_backtests(report, s, alphas, report.method_f, report.method_g);
        return 0;
      });
    }
    return report;
  }

  const auto& params = std::get<DccParams>(config.dgp);
  const Method mf = config.method_f.value_or(Method::PortfolioGarchFit);
  const Method mg = config.method_g.value_or(Method::Ideal);
  ExperimentReport report = start_report(config, "mean-scores", mf, mg);
  report.provenance.notes.push_back(
      "portfolio GARCH(1,1) fitted once on the full evaluation sample");
  with_context("mean-score study (bivariate)", [&] {
    const std::size_t N = config.n;
    const DccPath path = simulate_dcc(params, N + 1,
                                      derive_seed(config.seed, {kStreamMeanScore, 1}),
                                      config.burn_in);
    const auto portfolio = weighted_portfolio(path.returns, config.weights);
    ForecastStreams s;
    s.h = 1;
    s.realizations.assign(portfolio.begin() + 1, portfolio.end());
    std::size_t boundary = 0;
    dcc_sample_forecasts(mf, params, path, portfolio, N, alphas, config, s.f, boundary);
    if (mf == mg) {
      s.g = s.f;
    } else {
      dcc_sample_forecasts(mg, params, path, portfolio, N, alphas, config, s.g, boundary);
    }
    if (boundary > 0) report.warnings.push_back("portfolio GARCH fit reached the stationarity boundary");
    for (std::size_t a = 0; a < alphas.size(); ++a) {
      report.rows.push_back(compare_streams(s.f[a], s.g[a], s.realizations, 1, alphas[a],
                                            config.scorer.make(alphas[a])));
    }
    add_backtests(report, s, alphas, report.method_f, report.method_g);
    return 0;
  });
  return report;
}

ExperimentReport run_power_study(const ExperimentConfig& config) {
  config.validate();
  if (config.is_mixture()) throw ConfigError("power study needs a GARCH or DCC process");
  const bool bivariate = config.is_dcc();
  const Method mf = config.method_f.value_or(bivariate ? Method::PortfolioGarchFit : Method::SqrtTime);
  const Method mg = config.method_g.value_or(bivariate ? Method::DccFit : Method::GarchFit);
  ExperimentReport report = start_report(config, "power", mf, mg);
  report.provenance.notes.push_back(
      "replication seeds: derive(seed, {2, h, N, r}); failed replications are excluded from power");
  const std::vector<double>& alphas = config.alphas;

  struct Outcome {
    bool ok = false;
    std::vector<DmTestResult> dm;
    std::size_t boundary = 0;
    std::size_t total = 0;
    std::string error;
  };

  for (int h : config.horizons) {
    for (std::size_t N : config.sample_sizes) {
      std::vector<Outcome> outcomes(config.replications);
      parallel_for(config.replications, config.threads, [&](std::size_t r) {
        Outcome& out = outcomes[r];
        const std::uint64_t seed_r =
            derive_seed(config.seed, {kStreamPower, static_cast<std::uint64_t>(h), N, r});
        try {
          ForecastStreams s;
          if (bivariate) {
            const auto& params = std::get<DccParams>(config.dgp);
            const DccPath path = simulate_dcc(params, config.window + N, seed_r, config.burn_in);
            const auto portfolio = weighted_portfolio(path.returns, config.weights);
            s = rolling_forecasts_bivariate(path.returns, portfolio, alphas, mf, mg, config, seed_r,
                                            path.h_path);
          } else {
            const auto& params = std::get<GarchParams>(config.dgp);
            const GarchPath path = simulate_garch(
                params, config.window + N + static_cast<std::size_t>(h) - 1, seed_r, config.burn_in);
            s = rolling_forecasts(path.returns, h, alphas, mf, mg, config, seed_r,
                                  GarchTruth{params, path.cond_var});
          }
          out.boundary = s.boundary_fits;
          out.total = s.total_fits;
          for (std::size_t a = 0; a < alphas.size(); ++a) {
            const auto scorer = config.scorer.make(alphas[a]);
            const MeanScore sf = mean_score(s.f[a], s.realizations, scorer);
            const MeanScore sg = mean_score(s.g[a], s.realizations, scorer);
            out.dm.push_back(dm_test(sf.series, sg.series, h));
          }
          out.ok = true;
        } catch (const ConfigError&) {
          throw;
        } catch (const std::exception& e) {
          out.error = e.what();
        }
      });

      std::size_t failures = 0, boundary = 0, total = 0;
      for (const auto& o : outcomes) {
        if (!o.ok) ++failures;
        boundary += o.boundary;
        total += o.total;
      }
      const std::size_t ok = config.replications - failures;
      if (failures > 0) {
        for (const auto& o : outcomes) {
          if (!o.ok) {
            report.warnings.push_back(cell_label(h, alphas.front()) + " N=" + std::to_string(N) +
                                      ": replication failed: " + o.error);
            break;
          }
        }
      }
      for (std::size_t a = 0; a < alphas.size(); ++a) {
        for (double level : config.levels) {
          std::size_t rejections = 0;
          for (const auto& o : outcomes) {
            if (o.ok && o.dm[a].rejects(level)) ++rejections;
          }
          PowerCell cell;
          cell.h = h;
          cell.alpha = alphas[a];
          cell.n = N;
          cell.level = level;
          cell.replications = config.replications;
          cell.failures = failures;
          cell.boundary_fits = boundary;
          cell.total_fits = total;
          cell.power = ok > 0 ? static_cast<double>(rejections) / static_cast<double>(ok) : 0.0;
          cell.flagged = static_cast<double>(failures) >
                         kFailureFlagFraction * static_cast<double>(config.replications);
          report.power.push_back(cell);
        }
      }
    }
  }
  return report;
}

ExperimentReport run_application_on_returns(const std::vector<std::vector<double>>& returns,
                                            const ExperimentConfig& config) {
  config.validate();
  if (returns.empty() || returns.size() > 2) {
    throw DataError("application needs one or two return series");
  }
  const bool bivariate = returns.size() == 2;
  const Method mf = config.method_f.value_or(bivariate ? Method::PortfolioGarchFit : Method::SqrtTime);
  const Method mg = config.method_g.value_or(bivariate ? Method::DccFit : Method::GarchFit);
  ExperimentReport report = start_report(config, "apply", mf, mg);
  const std::vector<double>& alphas = config.alphas;
  const int max_h = *std::max_element(config.horizons.begin(), config.horizons.end());
  const std::size_t length = returns.front().size();
  if (length < config.window + static_cast<std::size_t>(max_h)) {
    throw DataError("need at least window + max(h) + 1 price rows, got " +
                    std::to_string(length + 1));
  }

  if (!bivariate) {
    for (int h : config.horizons) {
      with_context("application, h=" + std::to_string(h), [&] {
        const auto seed_h =
            derive_seed(config.seed, {kStreamApplication, static_cast<std::uint64_t>(h)});
        const auto s = rolling_forecasts(returns.front(), h, alphas, mf, mg, config, seed_h);
        for (std::size_t a = 0; a < alphas.size(); ++a) {
          report.rows.push_back(compare_streams(s.f[a], s.g[a], s.realizations, h, alphas[a],
                                                config.scorer.make(alphas[a])));
        }
        add_backtests(report, s, alphas, report.method_f, report.method_g);
        if (s.boundary_fits > 0) {
          report.warnings.push_back(std::to_string(s.boundary_fits) + " of " +
                                    std::to_string(s.total_fits) +
                                    " fits reached the stationarity boundary at h=" +
                                    std::to_string(h));
        }
        return 0;
      });
    }
    return report;
  }

  if (returns[1].size() != length) throw DataError("return series differ in length");
  if (!(config.horizons.size() == 1 && config.horizons.front() == 1)) {
    throw ConfigError("the portfolio application supports horizon 1 only");
  }
  ReturnMatrix matrix(static_cast<Eigen::Index>(length), 2);
  for (std::size_t t = 0; t < length; ++t) {
    matrix(static_cast<Eigen::Index>(t), 0) = returns[0][t];
    matrix(static_cast<Eigen::Index>(t), 1) = returns[1][t];
  }
  with_context("portfolio application", [&] {
    const auto portfolio = portfolio_returns(matrix, PortfolioSpec{config.weights, 1.0});
    const auto s = rolling_forecasts_bivariate(matrix, portfolio, alphas, mf, mg, config,
                                               derive_seed(config.seed, {kStreamApplication, 1}));
    for (std::size_t a = 0; a < alphas.size(); ++a) {
      report.rows.push_back(compare_streams(s.f[a], s.g[a], s.realizations, 1, alphas[a],
                                            config.scorer.make(alphas[a])));
    }
    add_backtests(report, s, alphas, report.method_f, report.method_g);
    return 0;
  });
  return report;
}

ExperimentReport run_application(std::span<const std::filesystem::path> price_files,
                                 const ExperimentConfig& config) {
  if (price_files.empty() || price_files.size() > 2) {
    throw DataError("apply takes one or two price files");
  }
  PriceTable table = load_prices_csv(price_files[0]);
  if (price_files.size() == 2) {
    const PriceTable other = load_prices_csv(price_files[1]);
    if (table.assets() != 1 || other.assets() != 1) {
      throw DataError("with two price files each must hold a single price column");
    }
    table = align_prices(table, other);
  }
  if (table.assets() > 2) throw DataError("at most two assets are supported");

  const ReturnSeries series =
      table.assets() == 1 ? to_log_returns(table) : to_relative_returns(table);
  const std::string context = table.source;
  ExperimentReport report = with_context(context, [&] {
    return run_application_on_returns(series.columns, config);
  });
  if (table.skipped_rows > 0) {
    report.warnings.push_back(std::to_string(table.skipped_rows) +
                              " rows with missing prices were skipped");
  }
  report.provenance.notes.push_back("prices: " + table.source + " (" +
                                    std::to_string(table.size()) + " aligned rows, " +
                                    (table.assets() == 1 ? "log-returns" : "relative returns") + ")");
  return report;
}

MixtureReport run_mixture_demo(const MixtureSpec& spec, std::size_t n, std::uint64_t seed) {
  spec.validate();
  if (n < 10000) throw std::invalid_argument("run_mixture_demo: n must be >= 10^4");

  MixtureReport out;
  out.spec = spec;
  out.n = n;
  out.q_alpha = normal_quantile(spec.alpha);
  const double mean_b0 = out.q_alpha * (1.0 - spec.sigma);

  // Marginal quantile: root of 0.5 Phi(x) + 0.5 Phi((x - mean_b0) / sigma) = alpha.
  const auto mixture_cdf_gap = [&](double x) {
    return 0.5 * normal_cdf(x) + 0.5 * normal_cdf((x - mean_b0) / spec.sigma) - spec.alpha;
  };
  const double lo = std::min(out.q_alpha, mean_b0 + spec.sigma * out.q_alpha) - 10.0 * spec.sigma;
  const double hi = std::max(0.0, mean_b0) + 10.0 * spec.sigma;
  boost::uintmax_t iterations = 200;
  const auto bracket = boost::math::tools::toms748_solve(
      mixture_cdf_gap, lo, hi, boost::math::tools::eps_tolerance<double>(52), iterations);
  out.forecast_f = 0.5 * (bracket.first + bracket.second);
  out.forecast_g_b1 = out.q_alpha;
  out.forecast_g_b0 = mean_b0 + spec.sigma * out.q_alpha;

  const GaussianComponent components[] = {{0.5, 0.0, 1.0}, {0.5, mean_b0, spec.sigma * spec.sigma}};
  Engine engine(seed);
  std::bernoulli_distribution coin(0.5);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<double> q_diff(n), log_diff(n);
  CompensatedSum qf, qg, lf, lg;
  for (std::size_t i = 0; i < n; ++i) {
    const bool b = coin(engine);
    const double y = b ? normal(engine) : mean_b0 + spec.sigma * normal(engine);
    const double forecast_g = b ? out.forecast_g_b1 : out.forecast_g_b0;
    const double sf = quantile_score_sstar(out.forecast_f, y, spec.alpha);
    const double sg = quantile_score_sstar(forecast_g, y, spec.alpha);
    const double lsf = log_score_gaussian_mixture(components, y);
    const double lsg = b ? log_score_gaussian(0.0, 1.0, y)
                         : log_score_gaussian(mean_b0, spec.sigma * spec.sigma, y);
    qf.add(sf);
    qg.add(sg);
    lf.add(lsf);
    lg.add(lsg);
    q_diff[i] = sf - sg;
    log_diff[i] = lsf - lsg;
  }

  const double nd = static_cast<double>(n);
  auto summarize = [&](const CompensatedSum& f, const CompensatedSum& g,
                       const std::vector<double>& d) {
    ComparisonStats c;
    c.m_f = f.value() / nd;
    c.m_g = g.value() / nd;
    c.diff = compensated_mean(d);
    c.se = std::sqrt(sample_variance(d, true) / nd);
    return c;
  };
  out.quantile_score = summarize(qf, qg, q_diff);
  out.log_score = summarize(lf, lg, log_diff);
  out.quantile_indistinguishable =
      std::abs(out.quantile_score.diff) <= 3.0 * out.quantile_score.se;
  out.log_score_separates = out.log_score.diff > 3.0 * out.log_score.se;
  return out;
}

}  // namespace infoval
