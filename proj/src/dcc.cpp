#include "infoval/dcc.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "infoval/errors.hpp"
#include "infoval/optimize.hpp"
#include "infoval/rng.hpp"
#include "infoval/stats.hpp"

namespace infoval {
namespace {

constexpr double kPersistenceCap = 1.0 - 1e-8;
constexpr double kBoundaryPersistence = 1.0 - 1e-6;
constexpr std::size_t kMinFitLength = 200;

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

struct CorrelationParams {
  double gamma, eta;
};

CorrelationParams map_correlation(std::span<const double> theta) {
  const double s = kPersistenceCap * logistic(theta[0]);
  const double gamma = s * logistic(theta[1]);
  return {gamma, s - gamma};
}

// Negative correlation quasi-log-likelihood
//   0.5 * sum (log det C_t + u_t' C_t^{-1} u_t - u_t' u_t).
double negative_correlation_loglik(CorrelationParams p, const Mat2& q_bar,
                                   std::span<const double> u1, std::span<const double> u2) {
  const double w = 1.0 - p.gamma - p.eta;
  double q11 = q_bar(0, 0), q22 = q_bar(1, 1), q12 = q_bar(0, 1);
  CompensatedSum nll;
  for (std::size_t t = 0; t < u1.size(); ++t) {
    const double c = q12 / std::sqrt(q11 * q22);
    const double det = 1.0 - c * c;
    if (!(det > 0.0) || !std::isfinite(det)) return std::numeric_limits<double>::infinity();
    const double a = u1[t], b = u2[t];
    const double quad = (a * a - 2.0 * c * a * b + b * b) / det;
    nll.add(0.5 * (std::log(det) + quad - (a * a + b * b)));
    q11 = w * q_bar(0, 0) + p.gamma * a * a + p.eta * q11;
    q22 = w * q_bar(1, 1) + p.gamma * b * b + p.eta * q22;
    q12 = w * q_bar(0, 1) + p.gamma * a * b + p.eta * q12;
  }
  return nll.value();
}

Mat2 covariance(double var1, double var2, const Mat2& corr) {
  const double s1 = std::sqrt(var1), s2 = std::sqrt(var2);
  Mat2 h;
  h << var1, s1 * s2 * corr(0, 1), s1 * s2 * corr(1, 0), var2;
  return h;
}

}  // namespace

void DccParams::validate() const {
  garch_1.validate();
  garch_2.validate();
  if (!(q_bar_offdiag > -1.0 && q_bar_offdiag < 1.0)) {
    throw std::invalid_argument("DCC: q_bar21 must lie in (-1, 1) for a positive definite Q_bar");
  }
  if (!(gamma >= 0.0) || !(eta >= 0.0)) {
    throw std::invalid_argument("DCC: gamma and eta must be nonnegative");
  }
  if (!(gamma + eta < 1.0)) throw std::invalid_argument("DCC: gamma + eta must be below one");
}

Mat2 DccParams::q_bar() const {
  Mat2 q;
  q << 1.0, q_bar_offdiag, q_bar_offdiag, 1.0;
  return q;
}

DccParams dcc_preset(int config) {
  // kappa1, kappa2, phi1, phi2, beta1, beta2, q_bar21, gamma, eta
  static constexpr double table[7][9] = {
      {0.0030, 0.0010, 0.400, 0.050, 0.590, 0.930, 0.10, 0.01, 0.98},
      {0.0025, 0.0015, 0.390, 0.060, 0.600, 0.920, 0.30, 0.02, 0.97},
      {0.0100, 0.0070, 0.200, 0.180, 0.790, 0.800, 0.30, 0.08, 0.91},
      {0.0200, 0.0010, 0.100, 0.300, 0.890, 0.680, 0.35, 0.10, 0.89},
      {0.0030, 0.0010, 0.400, 0.005, 0.590, 0.975, 0.60, 0.01, 0.98},
      {0.0090, 0.0080, 0.200, 0.010, 0.790, 0.970, 0.75, 0.05, 0.94},
      {0.0028, 0.0031, 0.300, 0.500, 0.690, 0.480, 0.88, 0.01, 0.98},
  };
  if (config < 1 || config > 7) {
    throw std::invalid_argument("unknown DCC configuration " + std::to_string(config));
  }
  const auto& r = table[config - 1];
  DccParams p;
  p.garch_1 = {r[0], r[2], r[4]};
  p.garch_2 = {r[1], r[3], r[5]};
  p.q_bar_offdiag = r[6];
  p.gamma = r[7];
  p.eta = r[8];
  return p;
}

Mat2 correlation_from_q(const Mat2& q) {
  const double d1 = 1.0 / std::sqrt(q(0, 0));
  const double d2 = 1.0 / std::sqrt(q(1, 1));
  Mat2 c;
  c << 1.0, q(0, 1) * d1 * d2, q(1, 0) * d1 * d2, 1.0;
  return c;
}

Mat2 symmetric_sqrt(const Mat2& h) {
  Eigen::SelfAdjointEigenSolver<Mat2> es;
  es.computeDirect(h);
  const Vec2 roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().transpose();
}

DccPath simulate_dcc(const DccParams& params, std::size_t n, std::uint64_t seed,
                     std::size_t burn_in) {
  params.validate();
  if (n < 1) throw std::invalid_argument("simulate_dcc: n must be >= 1");

  NormalStream eps(seed);
  DccPath path;
  path.seed = seed;
  path.burn_in = burn_in;
  path.returns.resize(static_cast<Eigen::Index>(n), 2);
  path.h_path.resize(n);
  path.q_path.resize(n);

  const Mat2 q_bar = params.q_bar();
  const double persistence_weight = 1.0 - params.gamma - params.eta;
  double var1 = params.garch_1.unconditional_variance();
  double var2 = params.garch_2.unconditional_variance();
  Mat2 q = q_bar;

  for (std::size_t i = 0; i < burn_in + n; ++i) {
    const Mat2 h = covariance(var1, var2, correlation_from_q(q));
    Vec2 e;
    e(0) = eps();
    e(1) = eps();
    const Vec2 r = symmetric_sqrt(h) * e;
    if (i >= burn_in) {
      const auto row = static_cast<Eigen::Index>(i - burn_in);
      path.returns.row(row) = r.transpose();
      path.h_path[i - burn_in] = h;
      path.q_path[i - burn_in] = q;
    }
    const Vec2 u(r(0) / std::sqrt(var1), r(1) / std::sqrt(var2));
    var1 = garch_next_variance(params.garch_1, var1, r(0));
    var2 = garch_next_variance(params.garch_2, var2, r(1));
    q = persistence_weight * q_bar + params.gamma * (u * u.transpose()) + params.eta * q;
  }
  path.next_h = covariance(var1, var2, correlation_from_q(q));
  return path;
}

DccFit fit_dcc_two_step(const ReturnMatrix& returns) {
  const auto n = static_cast<std::size_t>(returns.rows());
  if (n < kMinFitLength) throw std::invalid_argument("fit_dcc_two_step: need at least 200 rows");

  const std::vector<double> r1(returns.col(0).data(), returns.col(0).data() + n);
  const std::vector<double> r2(returns.col(1).data(), returns.col(1).data() + n);

  DccFit fit;
  fit.margin_1 = fit_garch_qmle(r1);
  fit.margin_2 = fit_garch_qmle(r2);
  fit.margins_boundary = fit.margin_1.boundary || fit.margin_2.boundary;

  std::vector<double> u1(n), u2(n);
  CompensatedSum s11, s22, s12;
  for (std::size_t t = 0; t < n; ++t) {
    u1[t] = r1[t] / std::sqrt(fit.margin_1.cond_var[t]);
    u2[t] = r2[t] / std::sqrt(fit.margin_2.cond_var[t]);
    s11.add(u1[t] * u1[t]);
    s22.add(u2[t] * u2[t]);
    s12.add(u1[t] * u2[t]);
  }
  const double nd = static_cast<double>(n);
  fit.q_bar << s11.value() / nd, s12.value() / nd, s12.value() / nd, s22.value() / nd;
  if (!(fit.q_bar.determinant() > 0.0)) {
    throw DegenerateVarianceError("fit_dcc_two_step: standardized residuals are collinear");
  }

  const Objective objective = [&](std::span<const double> theta, std::span<double>) {
    return negative_correlation_loglik(map_correlation(theta), fit.q_bar, u1, u2);
  };
  MinimizeOptions options;
  options.f_tolerance = 1e-8;
  options.analytic_gradient = false;
  const std::vector<double> start = {logit(0.95 / kPersistenceCap), logit(0.05 / 0.95)};
  const MinimizeResult result = minimize(objective, start, options);
  const CorrelationParams cp = map_correlation(result.x);

  fit.converged = result.converged && fit.margin_1.converged && fit.margin_2.converged;
  fit.correlation_loglik = -result.value;
  fit.boundary = cp.gamma + cp.eta >= kBoundaryPersistence;
  fit.params.garch_1 = fit.margin_1.params;
  fit.params.garch_2 = fit.margin_2.params;
  fit.params.q_bar_offdiag = fit.q_bar(0, 1) / std::sqrt(fit.q_bar(0, 0) * fit.q_bar(1, 1));
  fit.params.gamma = cp.gamma;
  fit.params.eta = cp.eta;

  const double w = 1.0 - cp.gamma - cp.eta;
  Mat2 q = fit.q_bar;
  fit.h_path.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    fit.h_path[t] =
        covariance(fit.margin_1.cond_var[t], fit.margin_2.cond_var[t], correlation_from_q(q));
    const Vec2 u(u1[t], u2[t]);
    q = w * fit.q_bar + cp.gamma * (u * u.transpose()) + cp.eta * q;
  }
  fit.next_h = covariance(fit.margin_1.next_var, fit.margin_2.next_var, correlation_from_q(q));
  return fit;
}

void PortfolioSpec::validate() const {
  if (!(w[0] >= 0.0 && w[0] <= 1.0 && w[1] >= 0.0 && w[1] <= 1.0)) {
    throw std::invalid_argument("portfolio weights must lie in [0, 1]");
  }
  if (std::abs(w[0] + w[1] - 1.0) > 1e-12) {
    throw std::invalid_argument("portfolio weights must sum to one");
  }
  if (!(v0 > 0.0)) throw std::invalid_argument("initial portfolio value must be positive");
}

std::vector<double> portfolio_returns(const ReturnMatrix& asset_returns, const PortfolioSpec& spec) {
  spec.validate();
  const auto n = static_cast<std::size_t>(asset_returns.rows());
  std::vector<double> out(n);
  // Prices start at one; only ratios S/V enter the return, so both are
  // renormalized by V after every step to keep them in range.
  std::array<double, 2> price = {1.0, 1.0};
  double value = spec.v0;
  for (std::size_t t = 0; t < n; ++t) {
    const auto row = static_cast<Eigen::Index>(t);
    std::array<double, 2> holding{};
    double y = 0.0;
    double next_value = 0.0;
    for (int i = 0; i < 2; ++i) {
      const double r = asset_returns(row, i);
      if (!(r > -1.0) || !std::isfinite(r)) {
        throw std::invalid_argument("portfolio_returns: relative return <= -1 at row " +
                                    std::to_string(t));
      }
      holding[i] = spec.w[i] * value / price[i];
      y += r * holding[i] * price[i] / value;
      price[i] *= 1.0 + r;
      next_value += holding[i] * price[i];
    }
    out[t] = y;
    price[0] /= next_value;
    price[1] /= next_value;
    value = 1.0;
  }
  return out;
}

QuantileForecast forecast_portfolio_quantile_h1(const Mat2& h_next, std::span<const double> w,
                                                double alpha) {
  if (w.size() != 2) throw std::invalid_argument("portfolio weights must have two entries");
  PortfolioSpec spec;
  spec.w = {w[0], w[1]};
  spec.validate();
  const Vec2 wv(w[0], w[1]);
  const double variance = wv.dot(h_next * wv);
  if (!(variance > 0.0) || !std::isfinite(variance)) {
    throw std::invalid_argument("forecast_portfolio_quantile_h1: nonpositive portfolio variance");
  }
  return forecast_quantile_h1(variance, alpha);
}

}  // namespace infoval
