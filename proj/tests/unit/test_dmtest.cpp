#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "infoval/dmtest.hpp"
#include "infoval/errors.hpp"
#include "infoval/stats.hpp"

using namespace infoval;

namespace {

ScoreSeries series(std::vector<double> v) { return ScoreSeries{std::move(v)}; }

std::vector<double> normal_sample(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> normal;
  std::vector<double> out(n);
  for (auto& v : out) v = normal(engine);
  return out;
}

// Asymptotic Kolmogorov tail P(sqrt(n) D > x).
double kolmogorov_tail(double x) {
  double p = 0.0;
  for (int k = 1; k <= 100; ++k) {
    p += (k % 2 ? 2.0 : -2.0) * std::exp(-2.0 * k * k * x * x);
  }
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace

TEST(ScoreDifferentials, ElementwiseDifference) {
  const auto a = series({1.0, 2.0, 3.0});
  EXPECT_EQ(score_differentials(a, a, 1).z, std::vector<double>(3, 0.0));
  const auto b = series({2.0, 3.0, 4.0});
  EXPECT_EQ(score_differentials(b, a, 1).z, std::vector<double>(3, 1.0));
  EXPECT_THROW(score_differentials(a, series({1.0}), 1), std::invalid_argument);
  EXPECT_THROW(score_differentials(a, a, 0), std::invalid_argument);
}

TEST(LongRunVariance, ConstantSeriesIsDegenerate) {
  const std::vector<double> z(50, 3.0);
  EXPECT_THROW(long_run_variance(z, 2), DegenerateVarianceError);
}

TEST(LongRunVariance, IidSeriesGivesMarginalVariance) {
  const auto z = normal_sample(1000000, 4);
  const auto lrv = long_run_variance(z, 2);
  EXPECT_NEAR(lrv.variance, 1.0, 0.01);
  EXPECT_FALSE(lrv.fallback);
}

TEST(LongRunVariance, AlternatingSeriesFallsBack) {
  std::vector<double> z(1000);
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = i % 2 ? -1.0 : 1.0;
  const auto lrv = long_run_variance(z, 1);
  EXPECT_TRUE(lrv.fallback);
  EXPECT_NEAR(lrv.variance, 1.0, 1e-12);
  EXPECT_NEAR(lrv.gamma0, 1.0, 1e-12);
}

TEST(LongRunVariance, HandComputedAutocovariances) {
  const std::vector<double> z{1.0, 2.0, 4.0, 3.0};
  // mean 2.5; deviations -1.5, -0.5, 1.5, 0.5
  const double g0 = (2.25 + 0.25 + 2.25 + 0.25) / 4.0;
  const double g1 = (0.75 - 0.75 + 0.75) / 4.0;
  const auto lrv = long_run_variance(z, 1);
  EXPECT_NEAR(lrv.gamma0, g0, 1e-15);
  EXPECT_NEAR(lrv.variance, g0 + 2.0 * g1, 1e-15);
  const auto bartlett = long_run_variance(z, 1, true, LrvKernel::Bartlett);
  EXPECT_NEAR(bartlett.variance, g0 + g1, 1e-15);
  EXPECT_THROW(long_run_variance(z, 4), std::invalid_argument);
}

TEST(DmTest, PValueAtNormalQuantile) {
  DmTestResult r;
  r.t_stat = 1.6449;
  EXPECT_NEAR(normal_upper_tail(r.t_stat), 0.05, 1e-5);
  r.t_stat = normal_quantile(0.95);
  EXPECT_NEAR(normal_upper_tail(r.t_stat), 0.05, 1e-12);
}

TEST(DmTest, IdenticalForecastsReportPOne) {
  const auto a = series(std::vector<double>(40, 1.5));
  const auto r = dm_test(a, a, 1);
  EXPECT_TRUE(r.identical_forecasts);
  EXPECT_EQ(r.p_value, 1.0);
  EXPECT_FALSE(r.rejects(0.05));
  EXPECT_TRUE(r.rejects(1.0));
}

TEST(DmTest, NeedsFourHObservations) {
  const auto a = series(normal_sample(7, 1));
  const auto b = series(normal_sample(7, 2));
  EXPECT_THROW(dm_test(a, b, 2), std::invalid_argument);
  EXPECT_NO_THROW(dm_test(a, b, 1));
}

TEST(DmTest, AntisymmetryAndScaleEquivariance) {
  const auto f = normal_sample(2000, 5);
  auto g = normal_sample(2000, 6);
  for (auto& v : g) v *= 0.8;
  const auto r = dm_test(series(f), series(g), 2);
  const auto s = dm_test(series(g), series(f), 2);
  EXPECT_DOUBLE_EQ(r.m_n, -s.m_n);
  EXPECT_DOUBLE_EQ(r.sigma_hat, s.sigma_hat);
  EXPECT_EQ(r.truncation_lag, 4u);

  std::vector<double> fc = f, gc = g;
  for (auto& v : fc) v *= 7.5;
  for (auto& v : gc) v *= 7.5;
  const auto scaled = dm_test(series(fc), series(gc), 2);
  EXPECT_NEAR(scaled.m_n, 7.5 * r.m_n, 1e-12 * std::abs(7.5 * r.m_n) + 1e-15);
  EXPECT_NEAR(scaled.sigma_hat, 7.5 * r.sigma_hat, 1e-12 * 7.5 * r.sigma_hat);
  EXPECT_NEAR(scaled.t_stat, r.t_stat, 1e-12);
  EXPECT_NEAR(scaled.p_value, r.p_value, 1e-12);
}

TEST(DmTest, StatisticAssembly) {
  const auto z = normal_sample(500, 9);
  std::vector<double> shifted(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) shifted[i] = z[i] + 0.2;
  const ScoreDifferentialSeries d{shifted, 1};
  const auto r = dm_test(d);
  const auto lrv = long_run_variance(shifted, 2);
  EXPECT_NEAR(r.m_n, compensated_mean(shifted), 1e-15);
  EXPECT_NEAR(r.sigma_hat, std::sqrt(lrv.variance), 1e-15);
  EXPECT_NEAR(r.t_stat, std::sqrt(500.0) * r.m_n / r.sigma_hat, 1e-12);
  EXPECT_NEAR(r.p_value, 1.0 - normal_cdf(r.t_stat), 1e-12);
  EXPECT_EQ(r.n, 500u);
}

TEST(DmTest, SizeUnderIidNull) {
  std::size_t rejections = 0;
  const std::size_t reps = 500;
  for (std::size_t r = 0; r < reps; ++r) {
    const auto z = normal_sample(1000, 1000 + r);
    if (dm_test(ScoreDifferentialSeries{z, 1}).rejects(0.05)) ++rejections;
  }
  const double rate = static_cast<double>(rejections) / reps;
  EXPECT_GE(rate, 0.03);
  EXPECT_LE(rate, 0.08);
}

TEST(DmTest, StatisticIsStandardNormalUnderIidNull) {
  const int reps = 500;
  std::vector<double> t(reps);
  for (int r = 0; r < reps; ++r) {
    ScoreDifferentialSeries d;
    d.z = normal_sample(1000, 9000 + r);
    t[r] = dm_test(d).t_stat;
  }
  std::sort(t.begin(), t.end());
  double ks = 0.0;
  for (int i = 0; i < reps; ++i) {
    const double c = normal_cdf(t[i]);
    ks = std::max({ks, (i + 1.0) / reps - c, c - static_cast<double>(i) / reps});
  }
  EXPECT_GT(kolmogorov_tail(std::sqrt(static_cast<double>(reps)) * ks), 0.01) << "D = " << ks;
  EXPECT_NEAR(kolmogorov_tail(1.358), 0.05, 1e-3);
}
