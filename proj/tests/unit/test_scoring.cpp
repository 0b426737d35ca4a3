#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "infoval/scoring.hpp"
#include "infoval/stats.hpp"

using namespace infoval;

namespace {

std::vector<double> normal_sample(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> normal;
  std::vector<double> out(n);
  for (auto& v : out) v = normal(engine);
  return out;
}

}  // namespace

TEST(QuantileScoreSStar, HandValues) {
  EXPECT_DOUBLE_EQ(quantile_score_sstar(1.0, 0.0, 0.5), 1.0);
  EXPECT_DOUBLE_EQ(quantile_score_sstar(0.0, 0.0, 0.1), 0.0);
  EXPECT_NEAR(quantile_score_sstar(-2.3263, 0.0, 0.01), 2.3263, 1e-12);
}

TEST(QuantileScoreSStar, TieUsesWeakInequality) {
  // x = y = 2: indicator is one, score = 2 (1/alpha - 1) - 2 / alpha = -2.
  EXPECT_DOUBLE_EQ(quantile_score_sstar(2.0, 2.0, 0.25), -2.0);
}

TEST(QuantileScoreSStar, RejectsNonFinite) {
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_THROW(quantile_score_sstar(inf, 0.0, 0.1), std::invalid_argument);
  EXPECT_THROW(quantile_score_sstar(0.0, std::nan(""), 0.1), std::invalid_argument);
  EXPECT_THROW(quantile_score_sstar(0.0, 0.0, 1.0), std::invalid_argument);
}

TEST(QuantileScoreGeneral, HandValues) {
  const auto id = MonotoneFunction::identity();
  EXPECT_DOUBLE_EQ(quantile_score_general(1.7, 1.7, 0.3, id), 0.0);
  EXPECT_NEAR(quantile_score_general(2.0, 1.0, 0.05, id), 0.95, 1e-15);
  EXPECT_NEAR(quantile_score_general(0.0, 1.0, 0.05, id), 0.05, 1e-15);
}

TEST(QuantileScoreGeneral, DiffersFromSStarByRealization) {
  std::mt19937_64 engine(11);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (double alpha : {0.01, 0.05, 0.2, 0.5, 0.9}) {
    const auto g = MonotoneFunction::scaled(1.0 / alpha);
    for (int i = 0; i < 1000; ++i) {
      const double x = u(engine), y = u(engine);
      EXPECT_NEAR(quantile_score_general(x, y, alpha, g) - quantile_score_sstar(x, y, alpha), y,
                  1e-9 * (1.0 + std::abs(y) / alpha));
    }
  }
}

TEST(QuantileScoreGeneral, NonnegativeAndZeroOnlyAtEquality) {
  std::mt19937_64 engine(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const auto g = MonotoneFunction::exponential();
  for (int i = 0; i < 2000; ++i) {
    const double x = u(engine), y = u(engine);
    const double s = quantile_score_general(x, y, 0.1, g);
    EXPECT_GE(s, 0.0);
    if (x != y) EXPECT_GT(s, 0.0);
    EXPECT_GT(expectile_score(x, y, 0.3), 0.0);
  }
}

TEST(MonotoneFunction, RejectsNonIncreasingTable) {
  EXPECT_THROW(QuantileScorer::general(0.1, MonotoneFunction::tabulated({0, 1, 2}, {0, 2, 1})),
               std::invalid_argument);
  EXPECT_THROW(MonotoneFunction::scaled(-1.0), std::invalid_argument);
  const auto table = MonotoneFunction::tabulated({0, 1, 2}, {0, 1, 3});
  EXPECT_TRUE(table.strictly_increasing_on_support());
  EXPECT_DOUBLE_EQ(table(1.5), 2.0);
  EXPECT_DOUBLE_EQ(table(3.0), 5.0);
  EXPECT_DOUBLE_EQ(table(-1.0), -1.0);
}

TEST(ExpectileScore, HandValues) {
  EXPECT_DOUBLE_EQ(expectile_score(3.0, 3.0, 0.9), 0.0);
  EXPECT_DOUBLE_EQ(expectile_score(0.0, 1.0, 0.5), 0.5);
  EXPECT_DOUBLE_EQ(expectile_score(1.0, 0.0, 0.25), 0.75);
  EXPECT_DOUBLE_EQ(expectile_score(2.0, -1.0, 0.5), 0.5 * 9.0);
}

TEST(LogScoreGaussian, ClosedForms) {
  const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
  EXPECT_NEAR(log_score_gaussian(0.0, 1.0, 0.0), half_log_2pi, 1e-15);
  EXPECT_NEAR(log_score_gaussian(5.0, 1.0, 5.0), 0.91894, 1e-5);
  EXPECT_NEAR(log_score_gaussian(0.0, 4.0, 0.0), 1.61209, 1e-5);
  EXPECT_THROW(log_score_gaussian(0.0, 0.0, 0.0), std::invalid_argument);
}

TEST(LogScoreGaussian, MixtureOfOneComponentMatches) {
  const GaussianComponent one[] = {{1.0, 0.3, 2.0}};
  EXPECT_NEAR(log_score_gaussian_mixture(one, 1.1), log_score_gaussian(0.3, 2.0, 1.1), 1e-14);
  const GaussianComponent bad[] = {{0.5, 0.0, 1.0}, {0.4, 0.0, 1.0}};
  EXPECT_THROW(log_score_gaussian_mixture(bad, 0.0), std::invalid_argument);
}

TEST(LogScoreGaussian, ProperAtTrueParameters) {
  const auto y = normal_sample(100000, 21);
  double best = std::numeric_limits<double>::infinity();
  double best_mu = 99, best_var = 99;
  for (double mu : {-0.1, 0.0, 0.1}) {
    for (double var : {0.9, 1.0, 1.1}) {
      CompensatedSum s;
      for (double v : y) s.add(log_score_gaussian(mu, var, v));
      if (s.value() < best) {
        best = s.value();
        best_mu = mu;
        best_var = var;
      }
    }
  }
  EXPECT_EQ(best_mu, 0.0);
  EXPECT_EQ(best_var, 1.0);
}

TEST(ComputeExpectile, SmallSamples) {
  const std::vector<double> pm{-1.0, 1.0};
  EXPECT_NEAR(compute_expectile(pm, 0.5), 0.0, 1e-12);
  const std::vector<double> zeros{0.0, 0.0, 0.0};
  EXPECT_EQ(compute_expectile(zeros, 0.3), 0.0);
  EXPECT_THROW(compute_expectile(std::vector<double>{}, 0.3), std::invalid_argument);
}

TEST(ComputeExpectile, MatchesGridMinimizer) {
  const auto y = normal_sample(1000000, 3);
  const double tau = compute_expectile(y, 0.9);
  // The mean expectile score is a convex quadratic spline in tau; locate the
  // grid minimizer by golden-section-free ternary refinement on step 1e-4.
  auto mean_loss = [&](double t) {
    CompensatedSum s;
    for (double v : y) s.add(expectile_score(t, v, 0.9));
    return s.value();
  };
  long lo = -50000, hi = 50000;  // units of 1e-4
  while (hi - lo > 2) {
    const long m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
    if (mean_loss(m1 * 1e-4) < mean_loss(m2 * 1e-4)) {
      hi = m2;
    } else {
      lo = m1;
    }
  }
  long best = lo;
  for (long k = lo; k <= hi; ++k) {
    if (mean_loss(k * 1e-4) < mean_loss(best * 1e-4)) best = k;
  }
  EXPECT_NEAR(tau, best * 1e-4, 1e-3);
}

TEST(MeanScore, TrivialCases) {
  const std::vector<double> y{0.5, -1.0, 2.0};
  const auto scorer = QuantileScorer::general(0.1, MonotoneFunction::identity());
  EXPECT_EQ(mean_score(y, y, scorer).mean, 0.0);
  const std::vector<double> x1{0.3}, y1{-0.2};
  EXPECT_DOUBLE_EQ(mean_score(x1, y1, QuantileScorer::sstar(0.05)).mean,
                   quantile_score_sstar(0.3, -0.2, 0.05));
  EXPECT_THROW(mean_score(x1, y, scorer), std::invalid_argument);
}

TEST(MeanScore, IdealNormalForecastsMatchTailExpectation) {
  const auto y = normal_sample(300000, 17);
  const double q = normal_quantile(0.01);
  const std::vector<double> x(y.size(), q);
  const double oracle = normal_pdf(q) / 0.01;
  EXPECT_NEAR(oracle, 2.6652, 1e-4);
  EXPECT_NEAR(mean_score(x, y, QuantileScorer::sstar(0.01)).mean, oracle, 0.05);
}

TEST(MeanScore, QuantileIsGridMinimizer) {
  const auto y = normal_sample(100000, 8);
  for (double alpha : {0.05, 0.5}) {
    std::vector<double> copy = y;
    const double q = empirical_quantile(copy, alpha);
    const double step = 1e-3;
    double best_x = 0.0, best = std::numeric_limits<double>::infinity();
    for (double x = q - 0.05; x <= q + 0.05; x += step) {
      CompensatedSum s;
      for (double v : y) s.add(quantile_score_sstar(x, v, alpha));
      if (s.value() < best) {
        best = s.value();
        best_x = x;
      }
    }
    EXPECT_NEAR(best_x, q, step) << "alpha " << alpha;
  }
}

TEST(PointScorer, DispatchesByType) {
  const PointScorer q = QuantileScorer::sstar(0.5);
  const PointScorer e = ExpectileScorer(0.5);
  EXPECT_DOUBLE_EQ(score(q, 1.0, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(score(e, 1.0, 0.0), 0.5);
}
