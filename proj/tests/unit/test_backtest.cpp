#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "infoval/backtest.hpp"
#include "infoval/errors.hpp"
#include "infoval/garch.hpp"
#include "infoval/rng.hpp"
#include "infoval/stats.hpp"

using namespace infoval;

namespace {

ExceedanceSeries make_series(std::vector<std::uint8_t> ind, double alpha) {
  ExceedanceSeries s;
  s.indicators = std::move(ind);
  s.alpha = alpha;
  return s;
}

ExceedanceSeries bernoulli(std::size_t n, double p, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  std::bernoulli_distribution b(p);
  std::vector<std::uint8_t> v(n);
  for (auto& x : v) x = b(engine) ? 1 : 0;
  return make_series(std::move(v), p);
}

// Markov LR on transition counts, written out from the likelihoods.
double markov_lr(double n00, double n01, double n10, double n11) {
  auto xlogy = [](double x, double y) { return x == 0.0 ? 0.0 : x * std::log(y); };
  const double p01 = n01 / (n00 + n01), p11 = n11 / (n10 + n11);
  const double p = (n01 + n11) / (n00 + n01 + n10 + n11);
  const double l1 = xlogy(n00, 1 - p01) + xlogy(n01, p01) + xlogy(n10, 1 - p11) + xlogy(n11, p11);
  const double l0 = xlogy(n00 + n10, 1 - p) + xlogy(n01 + n11, p);
  return 2.0 * (l1 - l0);
}

}  // namespace

TEST(Exceedances, Orientation) {
  const std::vector<double> y{0.5, -1.0, 2.0, 0.0};
  const std::vector<double> low(4, -1e300);
  const auto up = exceedance_indicators(low, y, Orientation::UpperTail, 0.05);
  EXPECT_EQ(up.indicators, std::vector<std::uint8_t>(4, 1));
  EXPECT_NEAR(up.nominal_rate(), 0.95, 1e-15);
  const auto tie = exceedance_indicators(y, y, Orientation::UpperTail, 0.05);
  EXPECT_EQ(tie.indicators, std::vector<std::uint8_t>(4, 0));
  const auto tie_low = exceedance_indicators(y, y, Orientation::LowerTail, 0.05);
  EXPECT_EQ(tie_low.indicators, std::vector<std::uint8_t>(4, 0));
  EXPECT_EQ(tie_low.orientation, Orientation::LowerTail);
  EXPECT_THROW(exceedance_indicators(low, std::vector<double>{1.0}, Orientation::LowerTail, 0.05),
               std::invalid_argument);
}

TEST(Exceedances, IdealForecastRate) {
  const auto path = simulate_garch(garch_preset(1), 100000, 15);
  std::vector<double> f(path.size());
  for (std::size_t t = 0; t < path.size(); ++t) f[t] = std::sqrt(path.cond_var[t]) * normal_quantile(0.01);
  const auto s = exceedance_indicators(f, path.returns, Orientation::LowerTail, 0.01);
  EXPECT_NEAR(s.empirical_rate(), 0.01, 0.001);
}

TEST(CoverageTest, HandValues) {
  std::vector<std::uint8_t> exact(1000, 0);
  for (int i = 0; i < 10; ++i) exact[i * 100] = 1;
  const auto r0 = coverage_test(make_series(exact, 0.01));
  EXPECT_NEAR(r0.z, 0.0, 1e-12);
  EXPECT_NEAR(r0.p, 1.0, 1e-12);

  std::vector<std::uint8_t> twenty(1000, 0);
  for (int i = 0; i < 20; ++i) twenty[i * 50] = 1;
  const auto r = coverage_test(make_series(twenty, 0.01));
  EXPECT_NEAR(r.z, (0.02 - 0.01) / std::sqrt(0.0099 / 1000.0), 1e-12);
  EXPECT_NEAR(r.z, 3.178, 1e-3);
  EXPECT_NEAR(r.p, 2.0 * normal_upper_tail(r.z), 1e-15);
  EXPECT_THROW(coverage_test(make_series(std::vector<std::uint8_t>(29, 0), 0.01)),
               InsufficientSampleError);
}

TEST(CoverageTest, SizeOnBernoulli) {
  int rejections = 0;
  for (int r = 0; r < 500; ++r) {
    if (coverage_test(bernoulli(1000, 0.05, 3000 + r)).p < 0.05) ++rejections;
  }
  EXPECT_GE(rejections / 500.0, 0.03);
  EXPECT_LE(rejections / 500.0, 0.08);
}

TEST(IndependenceTest, AlternatingSeries) {
  std::vector<std::uint8_t> v(200);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = i % 2;
  const auto r = independence_test(make_series(v, 0.5));
  EXPECT_EQ(r.n01, 100u);
  EXPECT_EQ(r.n10, 99u);
  EXPECT_NEAR(r.lr, markov_lr(0, 100, 99, 0), 1e-9);
  EXPECT_LT(r.p, 1e-6);
}

TEST(IndependenceTest, MatchesTransitionCountOracle) {
  const auto s = bernoulli(5000, 0.1, 91);
  const auto r = independence_test(s);
  EXPECT_EQ(r.n00 + r.n01 + r.n10 + r.n11, 4999u);
  EXPECT_NEAR(r.lr, markov_lr(r.n00, r.n01, r.n10, r.n11), 1e-9);
  EXPECT_NEAR(r.p, std::erfc(std::sqrt(r.lr / 2.0)), 1e-15);
}

TEST(IndependenceTest, SizeOnBernoulli) {
  int rejections = 0;
  for (int r = 0; r < 500; ++r) {
    if (independence_test(bernoulli(10000, 0.05, 7000 + r)).p < 0.05) ++rejections;
  }
  EXPECT_GE(rejections / 500.0, 0.03);
  EXPECT_LE(rejections / 500.0, 0.08);
}

TEST(IndependenceTest, DegenerateAndShort) {
  const auto r = independence_test(make_series(std::vector<std::uint8_t>(500, 0), 0.01));
  EXPECT_TRUE(r.degenerate);
  EXPECT_EQ(r.p, 1.0);
  EXPECT_THROW(independence_test(make_series(std::vector<std::uint8_t>(99, 0), 0.01)),
               InsufficientSampleError);
}

TEST(EsIdentity, StandardNormal) {
  std::mt19937_64 engine(23);
  std::normal_distribution<double> normal;
  const std::size_t n = 300000;
  std::vector<double> y(n), f(n, normal_quantile(0.01)), mu(n, 0.0), sigma(n, 1.0);
  for (auto& v : y) v = normal(engine);
  const auto r = es_identity_check(f, y, mu, sigma, 0.01);
  EXPECT_NEAR(r.mean_es, 2.6652, 1e-4);
  EXPECT_LT(r.rel_error, 0.005);

  std::vector<double> y2(n), f2(n), sigma2(n, 2.0);
  for (std::size_t i = 0; i < n; ++i) {
    y2[i] = 2.0 * y[i];
    f2[i] = 2.0 * f[i];
  }
  const auto doubled = es_identity_check(f2, y2, mu, sigma2, 0.01);
  EXPECT_DOUBLE_EQ(doubled.mean_es, 2.0 * r.mean_es);

  sigma2[5] = 0.0;
  EXPECT_THROW(es_identity_check(f2, y2, mu, sigma2, 0.01), std::invalid_argument);
}

TEST(Backtest, CalibratedIdealForecastsPass) {
  int passes = 0;
  const int reps = 200;
  for (int r = 0; r < reps; ++r) {
    const auto path = simulate_garch(garch_preset(1), 20000, 5000 + r);
    std::vector<double> f(path.size());
    for (std::size_t t = 0; t < path.size(); ++t) {
      f[t] = std::sqrt(path.cond_var[t]) * normal_quantile(0.05);
    }
    const auto report = backtest(exceedance_indicators(f, path.returns, Orientation::LowerTail, 0.05));
    if (report.coverage_p >= 0.01 && report.independence_p >= 0.01) ++passes;
  }
  EXPECT_GE(passes, 190);
}

TEST(Backtest, HorizonTenIndicatorsDecorrelateBeyondH) {
  // Share of lags h .. 3h + 9 whose sample autocorrelation lies in the
  // Bartlett band of an (h - 1)-dependent series, pooled over 20 paths of
  // 5,000 ideal forecasts (m = 200).
  const int h = 10;
  const auto p = garch_preset(1);
  const std::size_t origins = 5000;
  int inside = 0, total = 0;
  for (std::uint64_t path_id = 0; path_id < 20; ++path_id) {
    const auto path = simulate_garch(p, origins + h, 6100 + path_id);
    const auto sums = aggregate_h_step(path.returns, h);
    std::vector<double> forecasts, realizations;
    for (std::size_t o = 1; o <= origins; ++o) {
      forecasts.push_back(forecast_quantile_mc(p, {path.cond_var[o - 1], path.returns[o - 1]}, h,
                                               0.05, 200, derive_seed(path_id, o))
                              .value);
      realizations.push_back(sums[o]);
    }
    const auto s = exceedance_indicators(forecasts, realizations, Orientation::LowerTail, 0.05, h);
    std::vector<double> x(s.indicators.begin(), s.indicators.end());
    const double n = static_cast<double>(x.size());
    const double mean = compensated_mean(x);
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    auto acf = [&](int k) {
      double c = 0.0;
      for (std::size_t t = k; t < x.size(); ++t) c += (x[t] - mean) * (x[t - k] - mean);
      return c / var;
    };
    double spread = 1.0;
    for (int k = 1; k < h; ++k) spread += 2.0 * acf(k) * acf(k);
    const double band = 2.0 * std::sqrt(spread / n);
    for (int k = h; k < 3 * h + 10; ++k, ++total) {
      if (std::abs(acf(k)) <= band) ++inside;
    }
  }
  EXPECT_GE(inside, static_cast<int>(std::ceil(0.9 * total)));
}
