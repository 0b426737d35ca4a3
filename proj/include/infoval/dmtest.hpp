#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "infoval/scoring.hpp"

namespace infoval {

/// Z_n = S(F-forecast_n, Y_n) - S(G-forecast_n, Y_n) for forecasts at horizon h.
/// A positive mean favours the larger information set G.
struct ScoreDifferentialSeries {
  std::vector<double> z;
  int horizon = 1;

  std::size_t size() const noexcept { return z.size(); }
};

ScoreDifferentialSeries score_differentials(const ScoreSeries& scores_f,
                                            const ScoreSeries& scores_g, int h);

enum class LrvKernel {
  Uniform,   // lags 1..lag with weight one
  Bartlett,  // Newey-West weights 1 - k / (lag + 1)
};

struct LongRunVariance {
  double variance = 0.0;
  double gamma0 = 0.0;
  std::size_t lag = 0;
  /// Set when the weighted sum was <= 0 and gamma0 was used instead.
  bool fallback = false;
};

/// gamma0 + 2 sum_{k=1..lag} w_k gamma_k with autocovariances normalized by n.
/// Throws std::invalid_argument if n <= lag or n < 2, and
/// DegenerateVarianceError if even gamma0 is zero.
LongRunVariance long_run_variance(std::span<const double> z, std::size_t lag, bool center = true,
                                  LrvKernel kernel = LrvKernel::Uniform);

struct DmTestOptions {
  /// Defaults to 2h.
  std::optional<std::size_t> lag;
  bool center = true;
  LrvKernel kernel = LrvKernel::Uniform;
};

struct DmTestResult {
  double m_n = 0.0;
  double sigma_hat = 0.0;
  double t_stat = 0.0;
  /// One-sided upper tail 1 - Phi(t_stat).
  double p_value = 1.0;
  std::size_t n = 0;
  std::size_t truncation_lag = 0;
  bool fallback_flag = false;
  /// All differentials were exactly zero; reported with p = 1.
  bool identical_forecasts = false;

  /// T_N > q_{1-level}. A level of 1 or more always rejects.
  bool rejects(double level) const;
};

/// One-sided test of H: equal expected scores against "G scores lower".
/// Requires n >= 4h.
DmTestResult dm_test(const ScoreDifferentialSeries& differentials, const DmTestOptions& options = {});
DmTestResult dm_test(const ScoreSeries& scores_f, const ScoreSeries& scores_g, int h,
                     const DmTestOptions& options = {});

}  // namespace infoval
