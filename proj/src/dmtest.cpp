#include "infoval/dmtest.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "infoval/errors.hpp"
#include "infoval/stats.hpp"

namespace infoval {

ScoreDifferentialSeries score_differentials(const ScoreSeries& scores_f,
                                            const ScoreSeries& scores_g, int h) {
  if (h < 1) throw std::invalid_argument("score_differentials: horizon must be >= 1");
  if (scores_f.size() != scores_g.size()) {
    throw std::invalid_argument("score_differentials: score series differ in length");
  }
  ScoreDifferentialSeries out;
  out.horizon = h;
  out.z.resize(scores_f.size());
  for (std::size_t i = 0; i < out.z.size(); ++i) {
    const double d = scores_f.values[i] - scores_g.values[i];
    if (!std::isfinite(d)) throw std::invalid_argument("score_differentials: non-finite entry");
    out.z[i] = d;
  }
  return out;
}

LongRunVariance long_run_variance(std::span<const double> z, std::size_t lag, bool center,
                                  LrvKernel kernel) {
  const std::size_t n = z.size();
  if (n < 2) throw std::invalid_argument("long_run_variance: need at least two observations");
  if (n <= lag) throw std::invalid_argument("long_run_variance: lag must be below the sample size");

  const double mean = center ? compensated_mean(z) : 0.0;
  std::vector<double> dev(n);
  for (std::size_t i = 0; i < n; ++i) dev[i] = z[i] - mean;

  const auto autocov = [&](std::size_t k) {
    CompensatedSum acc;
    for (std::size_t t = k; t < n; ++t) acc.add(dev[t] * dev[t - k]);
    return acc.value() / static_cast<double>(n);
  };

  LongRunVariance out;
  out.lag = lag;
  out.gamma0 = autocov(0);
  double total = out.gamma0;
  for (std::size_t k = 1; k <= lag; ++k) {
    const double w = kernel == LrvKernel::Uniform
                         ? 1.0
                         : 1.0 - static_cast<double>(k) / static_cast<double>(lag + 1);
    total += 2.0 * w * autocov(k);
  }
  if (total > 0.0) {
    out.variance = total;
  } else {
    out.variance = out.gamma0;
    out.fallback = true;
  }
  if (!(out.variance > 0.0)) {
    throw DegenerateVarianceError("long_run_variance: series has zero variance");
  }
  return out;
}

bool DmTestResult::rejects(double level) const {
  if (level >= 1.0) return true;
  if (level <= 0.0) return false;
  return t_stat > normal_quantile(1.0 - level);
}

DmTestResult dm_test(const ScoreDifferentialSeries& differentials, const DmTestOptions& options) {
  const int h = differentials.horizon;
  if (h < 1) throw std::invalid_argument("dm_test: horizon must be >= 1");
  const std::size_t n = differentials.size();
  if (n < 4 * static_cast<std::size_t>(h)) {
    throw std::invalid_argument("dm_test: need at least 4h observations");
  }
  const std::size_t lag = options.lag.value_or(2 * static_cast<std::size_t>(h));

  DmTestResult out;
  out.n = n;
  out.truncation_lag = lag;

  if (std::all_of(differentials.z.begin(), differentials.z.end(),
                  [](double v) { return v == 0.0; })) {
    out.identical_forecasts = true;
    return out;
  }

  out.m_n = compensated_mean(differentials.z);
  const auto lrv = long_run_variance(differentials.z, lag, options.center, options.kernel);
  out.sigma_hat = std::sqrt(lrv.variance);
  out.fallback_flag = lrv.fallback;
  out.t_stat = std::sqrt(static_cast<double>(n)) * out.m_n / out.sigma_hat;
  out.p_value = normal_upper_tail(out.t_stat);
  return out;
}

DmTestResult dm_test(const ScoreSeries& scores_f, const ScoreSeries& scores_g, int h,
                     const DmTestOptions& options) {
  return dm_test(score_differentials(scores_f, scores_g, h), options);
}

}  // namespace infoval
