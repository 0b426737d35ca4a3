#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace infoval {

enum class Orientation {
  LowerTail,  // 1{Y < forecast}, nominal rate alpha
  UpperTail,  // 1{Y > forecast}, nominal rate 1 - alpha
};

struct ExceedanceSeries {
  std::vector<std::uint8_t> indicators;
  double alpha = 0.01;
  int h = 1;
  Orientation orientation = Orientation::LowerTail;

  std::size_t size() const noexcept { return indicators.size(); }
  double nominal_rate() const noexcept {
    return orientation == Orientation::LowerTail ? alpha : 1.0 - alpha;
  }
  double empirical_rate() const;
};

ExceedanceSeries exceedance_indicators(std::span<const double> forecasts,
                                       std::span<const double> realizations,
                                       Orientation orientation, double alpha, int h = 1);

struct CoverageResult {
  double rate = 0.0;
  double z = 0.0;
  /// Two-sided, normal approximation.
  double p = 1.0;
};

/// z = sqrt(N) (rate - pi0) / sqrt(pi0 (1 - pi0)). Needs N >= 30.
CoverageResult coverage_test(const ExceedanceSeries& series);

struct IndependenceResult {
  double lr = 0.0;
  double p = 1.0;
  std::size_t n00 = 0, n01 = 0, n10 = 0, n11 = 0;
  /// Only one state observed; p is reported as 1.
  bool degenerate = false;
};

/// Likelihood ratio of a first-order two-state Markov chain against i.i.d.
/// Bernoulli, chi-squared(1) reference. Needs N >= 100.
IndependenceResult independence_test(const ExceedanceSeries& series);

struct BacktestReport {
  double empirical_rate = 0.0;
  double coverage_z = 0.0;
  double coverage_p = 1.0;
  double independence_lr = 0.0;
  double independence_p = 1.0;
  bool independence_degenerate = false;
  std::size_t n = 0;
};

BacktestReport backtest(const ExceedanceSeries& series);

struct EsIdentityCheck {
  double mean_score = 0.0;
  double mean_es = 0.0;
  double rel_error = 0.0;
};

/// Mean S* of the forecasts against the average closed-form lower-tail
/// expectation -(1/alpha) (mu Phi(z) - sigma phi(z)), z = (forecast - mu) / sigma,
/// of the true conditional normals.
EsIdentityCheck es_identity_check(std::span<const double> forecasts,
                                  std::span<const double> realizations,
                                  std::span<const double> mu, std::span<const double> sigma,
                                  double alpha);

}  // namespace infoval
