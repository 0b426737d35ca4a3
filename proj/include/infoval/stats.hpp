#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace infoval {

// Standard normal helpers. The cdf and upper tail go through erfc so that
// tail probabilities keep full relative accuracy.
double normal_pdf(double x);
double normal_cdf(double x);
double normal_upper_tail(double x);
double normal_quantile(double p);

/// Upper-tail probability of a chi-squared variable with one degree of freedom.
double chi_squared1_upper_tail(double x);

/// Neumaier-compensated accumulator. Summation order is the insertion order.
class CompensatedSum {
 public:
  void add(double v) noexcept;
  double value() const noexcept { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

double compensated_sum(std::span<const double> values);
double compensated_mean(std::span<const double> values);

/// Variance with divisor n (population) or n-1 (unbiased).
double sample_variance(std::span<const double> values, bool unbiased = false);

/// One-based rank ceil(alpha * n), clamped to [1, n].
std::size_t order_statistic_rank(double alpha, std::size_t n);

/// Left-continuous empirical inverse: the ceil(alpha * n)-th order statistic.
double empirical_quantile(std::span<const double> sample, double alpha);

/// Several empirical quantiles of the same sample. Reorders `sample`.
std::vector<double> empirical_quantiles_inplace(std::span<double> sample,
                                                std::span<const double> alphas);

}  // namespace infoval
