#include "infoval/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>

namespace infoval {

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_upper_tail(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    throw std::invalid_argument("normal_quantile: probability outside [0, 1]");
  }
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double chi_squared1_upper_tail(double x) {
  if (x <= 0.0) return 1.0;
  return std::erfc(std::sqrt(0.5 * x));
}

void CompensatedSum::add(double v) noexcept {
  const double t = sum_ + v;
  if (std::abs(sum_) >= std::abs(v)) {
    compensation_ += (sum_ - t) + v;
  } else {
    compensation_ += (v - t) + sum_;
  }
  sum_ = t;
}

double compensated_sum(std::span<const double> values) {
  CompensatedSum acc;
  for (double v : values) acc.add(v);
  return acc.value();
}

double compensated_mean(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("mean of an empty sample");
  return compensated_sum(values) / static_cast<double>(values.size());
}

double sample_variance(std::span<const double> values, bool unbiased) {
  const std::size_t n = values.size();
  if (n < 2) throw std::invalid_argument("variance needs at least two observations");
  const double mean = compensated_mean(values);
  CompensatedSum acc;
  for (double v : values) acc.add((v - mean) * (v - mean));
  return acc.value() / static_cast<double>(unbiased ? n - 1 : n);
}

std::size_t order_statistic_rank(double alpha, std::size_t n) {
  if (n == 0) throw std::invalid_argument("order statistic of an empty sample");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("quantile level must lie in (0, 1)");
  }
  // Guard against alpha * n landing one ulp above an integer.
  const double scaled = alpha * static_cast<double>(n);
  const double rounded = std::round(scaled);
  const double target =
      std::abs(scaled - rounded) <= 1e-9 * std::max(1.0, scaled) ? rounded : std::ceil(scaled);
  const auto k = static_cast<std::size_t>(target);
  return std::clamp<std::size_t>(k, 1, n);
}

double empirical_quantile(std::span<const double> sample, double alpha) {
  std::vector<double> copy(sample.begin(), sample.end());
  const double a[] = {alpha};
  return empirical_quantiles_inplace(copy, a).front();
}

std::vector<double> empirical_quantiles_inplace(std::span<double> sample,
                                                std::span<const double> alphas) {
  if (sample.empty()) throw std::invalid_argument("empirical quantile of an empty sample");
  std::vector<double> out;
  out.reserve(alphas.size());
  for (double alpha : alphas) {
    const std::size_t k = order_statistic_rank(alpha, sample.size());
    auto nth = sample.begin() + static_cast<std::ptrdiff_t>(k - 1);
    std::nth_element(sample.begin(), nth, sample.end());
    out.push_back(*nth);
  }
  return out;
}

}  // namespace infoval
