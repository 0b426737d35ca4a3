#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "infoval/garch.hpp"

namespace infoval {

using Mat2 = Eigen::Matrix2d;
using Vec2 = Eigen::Vector2d;
using ReturnMatrix = Eigen::Matrix<double, Eigen::Dynamic, 2>;

/// Bivariate DCC-GARCH(1,1). Q_bar has unit diagonal and off-diagonal q_bar21.
struct DccParams {
  GarchParams garch_1;
  GarchParams garch_2;
  double q_bar_offdiag = 0.0;
  double gamma = 0.0;
  double eta = 0.0;

  void validate() const;
  Mat2 q_bar() const;

  bool operator==(const DccParams&) const = default;
};

/// The seven bivariate configurations (1-based), in the column order
/// kappa1, kappa2, phi1, phi2, beta1, beta2, q_bar21, gamma, eta.
DccParams dcc_preset(int config);

struct DccPath {
  ReturnMatrix returns;
  /// Conditional covariance of returns.row(t).
  std::vector<Mat2> h_path;
  std::vector<Mat2> q_path;
  /// Covariance of the first observation after the path.
  Mat2 next_h = Mat2::Identity();
  std::uint64_t seed = 0;
  std::size_t burn_in = 0;

  std::size_t size() const noexcept { return static_cast<std::size_t>(returns.rows()); }
};

/// Full recursion: univariate variances, Q started at Q_bar, C_t by diagonal
/// normalization of Q_t, R_t = H_t^{1/2} eps_t with the symmetric square root.
DccPath simulate_dcc(const DccParams& params, std::size_t n, std::uint64_t seed,
                     std::size_t burn_in = kDefaultBurnIn);

/// C = diag(Q)^{-1/2} Q diag(Q)^{-1/2}.
Mat2 correlation_from_q(const Mat2& q);

/// Symmetric positive-definite square root via the spectral decomposition.
Mat2 symmetric_sqrt(const Mat2& h);

struct DccFit {
  DccParams params;
  /// Targeted second-moment matrix of the standardized residuals.
  Mat2 q_bar = Mat2::Identity();
  std::vector<Mat2> h_path;
  Mat2 next_h = Mat2::Identity();
  GarchFit margin_1;
  GarchFit margin_2;
  double correlation_loglik = 0.0;
  /// gamma + eta reached 1 - 1e-6 in the correlation step.
  bool boundary = false;
  bool margins_boundary = false;
  bool converged = false;
};

/// Two-step estimator on at least 200 bivariate observations: QML fits of both
/// margins, then correlation targeting Q_bar = mean(u_t u_t^T) and
/// maximization of the correlation quasi-likelihood over gamma + eta < 1.
DccFit fit_dcc_two_step(const ReturnMatrix& returns);

struct PortfolioSpec {
  std::array<double, 2> w = {0.5, 0.5};
  double v0 = 1.0;

  void validate() const;
};

/// Portfolio returns under per-step rebalancing to constant weights, via
/// holdings lambda_{t,i} = w_i V_t / S_{t,i}. Asset returns are relative
/// returns and must exceed -1.
std::vector<double> portfolio_returns(const ReturnMatrix& asset_returns, const PortfolioSpec& spec);

/// sqrt(w^T H w) q_alpha.
QuantileForecast forecast_portfolio_quantile_h1(const Mat2& h_next, std::span<const double> w,
                                                double alpha);

}  // namespace infoval
