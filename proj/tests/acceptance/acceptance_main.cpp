#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <exception>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "infoval/backtest.hpp"
#include "infoval/dmtest.hpp"
#include "infoval/experiments.hpp"
#include "infoval/garch.hpp"
#include "infoval/rng.hpp"
#include "infoval/scoring.hpp"
#include "infoval/stats.hpp"

using namespace infoval;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

bool paper_scale = false;

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool within(double v, double target, double tol) { return std::abs(v - target) <= tol; }

ExperimentConfig table2_config() {
  ExperimentConfig c;
  c.dgp = garch_preset(1);
  c.horizons = {1};
  c.alphas = {0.01, 0.05, 0.20};
  c.n_h1 = 300000;
  c.seed = 1;
  return c;
}

Outcome criterion1() {
  const auto report = run_mean_score_experiment(table2_config());
  const double mf[] = {3.627, 2.225, 1.354};
  const double mg[] = {2.511, 1.895, 1.303};
  const double tol = 0.05;
  Outcome o{true, ""};
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const auto& r = report.rows[i];
    const bool ok = within(r.m_f, mf[i], tol) && within(r.m_g, mg[i], tol);
    o.pass = o.pass && ok;
    o.detail += fmt("alpha=%.2f m_F=%.4f (%.3f) m_G=%.4f (%.3f)%s; ", r.alpha, r.m_f, mf[i], r.m_g,
                    mg[i], ok ? "" : " out");
  }
  return o;
}

Outcome criterion2() {
  auto config = table2_config();
  config.alphas = {0.01};
  const auto report = run_mean_score_experiment(config);
  const double rel = report.rows.front().rel_diff;
  return {rel >= 0.29 && rel <= 0.33, fmt("rel_diff=%.4f, band [0.29, 0.33]", rel)};
}

Outcome criterion3() {
  std::mt19937_64 engine(23);
  std::normal_distribution<double> normal;
  const std::size_t n = 300000;
  const double alpha = 0.01;
  std::vector<double> y(n), f(n, normal_quantile(alpha)), mu(n, 0.0), sigma(n, 1.0);
  for (auto& v : y) v = normal(engine);
  const auto r = es_identity_check(f, y, mu, sigma, alpha);
  const double target = normal_pdf(normal_quantile(alpha)) / alpha;
  const double rel = std::abs(r.mean_score - target) / target;
  return {rel < 0.005, fmt("mean S*=%.5f, target %.5f, rel=%.5f", r.mean_score, target, rel)};
}

Outcome criterion4() {
  const int reps = 500;
  const std::size_t n = 1000;
  int rejections = 0;
  for (int r = 0; r < reps; ++r) {
    NormalStream normal(derive_seed(4, static_cast<std::uint64_t>(r)));
    ScoreDifferentialSeries z;
    z.z.resize(n);
    for (auto& v : z.z) v = normal();
    if (dm_test(z).rejects(0.05)) ++rejections;
  }
  const double rate = static_cast<double>(rejections) / reps;
  return {rate >= 0.03 && rate <= 0.08, fmt("rejection rate %.3f over %d, band [0.03, 0.08]", rate, reps)};
}

Outcome criterion5() {
  ExperimentConfig c;
  c.dgp = garch_preset(1);
  c.horizons = {1};
  c.alphas = {0.01};
  c.sample_sizes = {1000};
  c.levels = {0.05};
  c.replications = 200;
  c.seed = 1;
  const auto report = run_power_study(c);
  const auto& cell = report.power.front();
  return {within(cell.power, 0.863, 0.08) && !cell.flagged,
          fmt("power=%.3f over %zu (failures %zu), target 0.863 +- 0.08", cell.power,
              cell.replications, cell.failures)};
}

Outcome criterion6() {
  ExperimentConfig c;
  c.dgp = dcc_preset(1);
  c.horizons = {1};
  c.alphas = {0.01};
  c.n = paper_scale ? 500000 : 100000;
  c.seed = 1;
  const double tol = paper_scale ? 0.005 : 0.010;
  const auto& r = run_mean_score_experiment(c).rows.front();
  return {within(r.diff, 0.031, tol),
          fmt("N=%zu diff=%.4f (m_F=%.4f m_G=%.4f), target 0.031 +- %.3f", r.n, r.diff, r.m_f,
              r.m_g, tol)};
}

Outcome criterion7() {
  const int reps = 200;
  const std::size_t n = 100000;
  const double alpha = 0.01;
  const auto p = garch_preset(1);
  std::vector<int> pass(reps, 0);
  for (int r = 0; r < reps; ++r) {
    const auto path = simulate_garch(p, n, derive_seed(7, static_cast<std::uint64_t>(r)));
    std::vector<double> f(n);
    for (std::size_t t = 0; t < n; ++t) f[t] = std::sqrt(path.cond_var[t]) * normal_quantile(alpha);
    const auto b = backtest(exceedance_indicators(f, path.returns, Orientation::LowerTail, alpha));
    pass[r] = b.coverage_p >= 0.01 && b.independence_p >= 0.01;
  }
  const int passes = static_cast<int>(std::count(pass.begin(), pass.end(), 1));
  const double share = static_cast<double>(passes) / reps;
  return {share >= 0.98, fmt("both tests pass in %d/%d = %.3f, need >= 0.98", passes, reps, share)};
}

Outcome criterion8() {
  // alpha = 0.99: 99 forecasts far above every realization, then one far below.
  const std::size_t n = 10000;
  const double alpha = 0.99;
  NormalStream normal(8);
  std::vector<double> f(n), y(n);
  for (std::size_t t = 0; t < n; ++t) {
    f[t] = t % 100 < 99 ? 1e6 : -1e6;
    y[t] = normal();
  }
  const auto s = exceedance_indicators(f, y, Orientation::UpperTail, alpha);
  const double rate = s.empirical_rate();
  const auto ind = independence_test(s);
  return {within(rate, 0.01, 0.002) && ind.p < 1e-6,
          fmt("rate=%.4f, independence LR=%.3f p=%.3g (n01=%zu n10=%zu n11=%zu), need p < 1e-6",
              rate, ind.lr, ind.p, ind.n01, ind.n10, ind.n11)};
}

double mean_sstar(const std::vector<double>& y, double x, double alpha) {
  CompensatedSum s;
  for (double v : y) s.add(quantile_score_sstar(x, v, alpha));
  return s.value() / static_cast<double>(y.size());
}

Outcome criterion9() {
  const std::size_t n = 100000;
  const int grid_points = 2001;
  std::mt19937_64 engine(9);
  std::normal_distribution<double> normal;
  std::student_t_distribution<double> student(5.0);
  std::lognormal_distribution<double> lognormal(0.0, 1.0);
  struct Sample {
    const char* name;
    std::vector<double> y;
  };
  std::vector<Sample> samples{{"normal", {}}, {"t5", {}}, {"lognormal", {}}};
  for (std::size_t i = 0; i < n; ++i) {
    samples[0].y.push_back(normal(engine));
    samples[1].y.push_back(student(engine));
    samples[2].y.push_back(lognormal(engine));
  }
  Outcome o{true, ""};
  for (const auto& s : samples) {
    auto sorted = s.y;
    std::sort(sorted.begin(), sorted.end());
    for (double alpha : {0.01, 0.05, 0.5}) {
      const double lo = sorted[order_statistic_rank(alpha / 4.0, n) - 1];
      const double hi = sorted[order_statistic_rank(std::min(0.99, alpha * 4.0 + 0.02), n) - 1];
      const double step = (hi - lo) / (grid_points - 1);
      double best_x = lo, best = mean_sstar(s.y, lo, alpha);
      for (int k = 1; k < grid_points; ++k) {
        const double x = lo + k * step;
        const double m = mean_sstar(s.y, x, alpha);
        if (m < best) best = m, best_x = x;
      }
      const double q = empirical_quantile(s.y, alpha);
      const bool ok = std::abs(best_x - q) <= step * (1.0 + 1e-9);
      o.pass = o.pass && ok;
      if (!ok) o.detail += fmt("%s alpha=%.2f argmin=%.5f q=%.5f step=%.5f; ", s.name, alpha, best_x, q, step);
    }
  }
  if (o.pass) o.detail = "9 cells, argmin within one grid step of the empirical quantile";
  return o;
}

Outcome criterion10() {
  const auto m = run_mixture_demo({0.05, 2.0}, 1000000, 7);
  const auto& q = m.quantile_score;
  const auto& l = m.log_score;
  const bool indistinguishable = q.diff == 0.0 || std::abs(q.diff) < 3.0 * q.se;
  const bool separates = l.diff > 3.0 * l.se;
  return {indistinguishable && separates,
          fmt("quantile diff=%.3g se=%.3g (forecasts %.5f, %.5f, %.5f); log diff=%.4f se=%.2g",
              q.diff, q.se, m.forecast_f, m.forecast_g_b1, m.forecast_g_b0, l.diff, l.se)};
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--paper-scale") == 0) {
      paper_scale = true;
    } else {
      only.push_back(std::atoi(argv[i]));
    }
  }
  const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4,
                                                       criterion5, criterion6, criterion7, criterion8,
                                                       criterion9, criterion10};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %2d: %s  %s [%.1fs]\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d failed\n", failed);
  return failed == 0 ? 0 : 1;
}
