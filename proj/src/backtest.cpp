#include "infoval/backtest.hpp"

#include <cmath>
#include <stdexcept>

#include "infoval/errors.hpp"
#include "infoval/scoring.hpp"
#include "infoval/stats.hpp"

namespace infoval {
namespace {

constexpr std::size_t kMinCoverageSample = 30;
constexpr std::size_t kMinIndependenceSample = 100;

// count * log(p) with the convention 0 * log 0 = 0.
double xlogy(std::size_t count, double p) {
  return count == 0 ? 0.0 : static_cast<double>(count) * std::log(p);
}

}  // namespace

double ExceedanceSeries::empirical_rate() const {
  if (indicators.empty()) throw std::invalid_argument("empty exceedance series");
  std::size_t hits = 0;
  for (auto v : indicators) hits += v;
  return static_cast<double>(hits) / static_cast<double>(indicators.size());
}

ExceedanceSeries exceedance_indicators(std::span<const double> forecasts,
                                       std::span<const double> realizations,
                                       Orientation orientation, double alpha, int h) {
  if (forecasts.size() != realizations.size()) {
    throw std::invalid_argument("exceedance_indicators: length mismatch");
  }
  if (forecasts.empty()) throw std::invalid_argument("exceedance_indicators: empty input");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (h < 1) throw std::invalid_argument("horizon must be >= 1");
  ExceedanceSeries out;
  out.alpha = alpha;
  out.h = h;
  out.orientation = orientation;
  out.indicators.resize(forecasts.size());
  for (std::size_t i = 0; i < forecasts.size(); ++i) {
    const bool hit = orientation == Orientation::LowerTail ? realizations[i] < forecasts[i]
                                                           : realizations[i] > forecasts[i];
    out.indicators[i] = hit ? 1 : 0;
  }
  return out;
}

CoverageResult coverage_test(const ExceedanceSeries& series) {
  const std::size_t n = series.size();
  if (n < kMinCoverageSample) {
    throw InsufficientSampleError("coverage_test: need at least 30 observations");
  }
  const double pi0 = series.nominal_rate();
  CoverageResult out;
  out.rate = series.empirical_rate();
  out.z = std::sqrt(static_cast<double>(n)) * (out.rate - pi0) / std::sqrt(pi0 * (1.0 - pi0));
  out.p = std::min(1.0, 2.0 * normal_upper_tail(std::abs(out.z)));
  return out;
}

IndependenceResult independence_test(const ExceedanceSeries& series) {
  const std::size_t n = series.size();
  if (n < kMinIndependenceSample) {
    throw InsufficientSampleError("independence_test: need at least 100 observations");
  }
  IndependenceResult out;
  const auto& I = series.indicators;
  for (std::size_t t = 1; t < n; ++t) {
    const int from = I[t - 1], to = I[t];
    if (from == 0) (to == 0 ? out.n00 : out.n01)++;
    else (to == 0 ? out.n10 : out.n11)++;
  }
  const std::size_t hits = out.n01 + out.n11;
  const std::size_t total = out.n00 + out.n01 + out.n10 + out.n11;
  if (hits == 0 || hits == total) {
    out.degenerate = true;
    return out;
  }
  const double pi = static_cast<double>(hits) / static_cast<double>(total);
  const std::size_t from0 = out.n00 + out.n01;
  const std::size_t from1 = out.n10 + out.n11;
  const double pi01 = from0 ? static_cast<double>(out.n01) / static_cast<double>(from0) : 0.0;
  const double pi11 = from1 ? static_cast<double>(out.n11) / static_cast<double>(from1) : 0.0;

  const double log_markov = xlogy(out.n00, 1.0 - pi01) + xlogy(out.n01, pi01) +
                            xlogy(out.n10, 1.0 - pi11) + xlogy(out.n11, pi11);
  const double log_iid = xlogy(out.n00 + out.n10, 1.0 - pi) + xlogy(hits, pi);
  out.lr = std::max(0.0, 2.0 * (log_markov - log_iid));
  out.p = chi_squared1_upper_tail(out.lr);
  return out;
}

BacktestReport backtest(const ExceedanceSeries& series) {
  const auto cov = coverage_test(series);
  const auto ind = independence_test(series);
  BacktestReport r;
  r.empirical_rate = cov.rate;
  r.coverage_z = cov.z;
  r.coverage_p = cov.p;
  r.independence_lr = ind.lr;
  r.independence_p = ind.p;
  r.independence_degenerate = ind.degenerate;
  r.n = series.size();
  return r;
}

EsIdentityCheck es_identity_check(std::span<const double> forecasts,
                                  std::span<const double> realizations,
                                  std::span<const double> mu, std::span<const double> sigma,
                                  double alpha) {
  const std::size_t n = forecasts.size();
  if (realizations.size() != n || mu.size() != n || sigma.size() != n) {
    throw std::invalid_argument("es_identity_check: length mismatch");
  }
  if (n == 0) throw std::invalid_argument("es_identity_check: empty input");
  CompensatedSum es;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(sigma[i] > 0.0)) throw std::invalid_argument("es_identity_check: sigma must be positive");
    const double z = (forecasts[i] - mu[i]) / sigma[i];
    es.add(-(mu[i] * normal_cdf(z) - sigma[i] * normal_pdf(z)) / alpha);
  }
  EsIdentityCheck out;
  out.mean_score = mean_score(forecasts, realizations, QuantileScorer::sstar(alpha)).mean;
  out.mean_es = es.value() / static_cast<double>(n);
  out.rel_error = std::abs(out.mean_score - out.mean_es) / std::abs(out.mean_es);
  return out;
}

}  // namespace infoval
