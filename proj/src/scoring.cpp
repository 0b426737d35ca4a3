#include "infoval/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "infoval/stats.hpp"

namespace infoval {
namespace {

constexpr int kMonotonicityGrid = 1001;

void require_level(double alpha, const char* what) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument(std::string(what) + ": alpha must lie in (0, 1)");
  }
}

void require_finite(double x, double y, const char* what) {
  if (!std::isfinite(x) || !std::isfinite(y)) {
    throw std::invalid_argument(std::string(what) + ": non-finite input");
  }
}

}  // namespace

MonotoneFunction MonotoneFunction::identity() { return MonotoneFunction(); }

MonotoneFunction MonotoneFunction::scaled(double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    throw std::invalid_argument("scaled transform needs a positive finite factor");
  }
  MonotoneFunction f;
  f.family_ = Family::Scaled;
  f.factor_ = factor;
  return f;
}

MonotoneFunction MonotoneFunction::exponential() {
  MonotoneFunction f;
  f.family_ = Family::Exp;
  return f;
}

MonotoneFunction MonotoneFunction::tabulated(std::vector<double> x, std::vector<double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("tabulated transform needs >= 2 (x, y) pairs of equal length");
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
      throw std::invalid_argument("tabulated transform has non-finite entries");
    }
    if (i > 0 && !(x[i] > x[i - 1])) {
      throw std::invalid_argument("tabulated transform abscissae must increase strictly");
    }
  }
  MonotoneFunction f;
  f.family_ = Family::Tabulated;
  f.xs_ = std::move(x);
  f.ys_ = std::move(y);
  return f;
}

double MonotoneFunction::operator()(double x) const {
  switch (family_) {
    case Family::Identity:
      return x;
    case Family::Scaled:
      return factor_ * x;
    case Family::Exp:
      return std::exp(x);
    case Family::Tabulated: {
      // Locate the segment; the end segments extend linearly.
      auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
      std::size_t hi = static_cast<std::size_t>(it - xs_.begin());
      hi = std::clamp<std::size_t>(hi, 1, xs_.size() - 1);
      const std::size_t lo = hi - 1;
      const double slope = (ys_[hi] - ys_[lo]) / (xs_[hi] - xs_[lo]);
      return ys_[lo] + slope * (x - xs_[lo]);
    }
  }
  return x;
}

std::pair<double, double> MonotoneFunction::support() const {
  switch (family_) {
    case Family::Identity:
    case Family::Scaled:
      return {-100.0, 100.0};
    case Family::Exp:
      return {-50.0, 50.0};
    case Family::Tabulated:
      return {xs_.front(), xs_.back()};
  }
  return {-100.0, 100.0};
}

bool MonotoneFunction::strictly_increasing_on_support() const {
  const auto [lo, hi] = support();
  const double step = (hi - lo) / (kMonotonicityGrid - 1);
  double prev = (*this)(lo);
  for (int i = 1; i < kMonotonicityGrid; ++i) {
    const double x = (i == kMonotonicityGrid - 1) ? hi : lo + step * i;
    const double cur = (*this)(x);
    if (!(cur > prev)) return false;
    prev = cur;
  }
  return true;
}

QuantileScorer::QuantileScorer(double alpha, Form form, MonotoneFunction g)
    : alpha_(alpha), form_(form), g_(std::move(g)) {
  require_level(alpha, "QuantileScorer");
}

QuantileScorer QuantileScorer::sstar(double alpha) {
  return QuantileScorer(alpha, Form::SStar, MonotoneFunction::identity());
}

QuantileScorer QuantileScorer::general(double alpha, MonotoneFunction g) {
  if (!g.strictly_increasing_on_support()) {
    throw std::invalid_argument("QuantileScorer: g is not strictly increasing on its support");
  }
  return QuantileScorer(alpha, Form::General, std::move(g));
}

double QuantileScorer::operator()(double forecast, double realization) const {
  if (form_ == Form::SStar) return quantile_score_sstar(forecast, realization, alpha_);
  return quantile_score_general(forecast, realization, alpha_, g_);
}

ExpectileScorer::ExpectileScorer(double alpha) : alpha_(alpha) {
  require_level(alpha, "ExpectileScorer");
}

double ExpectileScorer::operator()(double forecast, double realization) const {
  return expectile_score(forecast, realization, alpha_);
}

double score(const PointScorer& scorer, double forecast, double realization) {
  return std::visit([&](const auto& s) { return s(forecast, realization); }, scorer);
}

double quantile_score_sstar(double x, double y, double alpha) {
  require_level(alpha, "quantile_score_sstar");
  require_finite(x, y, "quantile_score_sstar");
  if (x >= y) return x * (1.0 / alpha - 1.0) - y / alpha;
  return -x;
}

double quantile_score_general(double x, double y, double alpha, const MonotoneFunction& g) {
  require_level(alpha, "quantile_score_general");
  require_finite(x, y, "quantile_score_general");
  const double indicator = x >= y ? 1.0 : 0.0;
  return (indicator - alpha) * (g(x) - g(y));
}

double expectile_score(double tau, double y, double alpha) {
  require_level(alpha, "expectile_score");
  require_finite(tau, y, "expectile_score");
  const double weight = std::abs((tau >= y ? 1.0 : 0.0) - alpha);
  const double e = y - tau;
  return weight * e * e;
}

double log_score_gaussian(double mu, double var, double y) {
  if (!(var > 0.0) || !std::isfinite(var)) {
    throw std::invalid_argument("log_score_gaussian: variance must be positive");
  }
  require_finite(mu, y, "log_score_gaussian");
  const double z2 = (y - mu) * (y - mu) / var;
  return 0.5 * std::log(2.0 * std::numbers::pi) + 0.5 * std::log(var) + 0.5 * z2;
}

double log_score_gaussian_mixture(std::span<const GaussianComponent> components, double y) {
  if (components.empty()) throw std::invalid_argument("mixture needs at least one component");
  // log-sum-exp over the weighted component densities
  std::vector<double> logs;
  logs.reserve(components.size());
  double weight_total = 0.0;
  for (const auto& c : components) {
    if (!(c.weight > 0.0)) throw std::invalid_argument("mixture weights must be positive");
    weight_total += c.weight;
    logs.push_back(std::log(c.weight) - log_score_gaussian(c.mean, c.variance, y));
  }
  if (std::abs(weight_total - 1.0) > 1e-12) {
    throw std::invalid_argument("mixture weights must sum to one");
  }
  const double top = *std::max_element(logs.begin(), logs.end());
  double acc = 0.0;
  for (double l : logs) acc += std::exp(l - top);
  return -(top + std::log(acc));
}

double compute_expectile(std::span<const double> sample, double alpha) {
  if (sample.empty()) throw std::invalid_argument("compute_expectile: empty sample");
  require_level(alpha, "compute_expectile");
  for (double v : sample) {
    if (!std::isfinite(v)) throw std::invalid_argument("compute_expectile: non-finite value");
  }
  if (alpha == 0.5) return compensated_mean(sample);

  // Decreasing in tau: positive at the sample minimum, negative at the maximum.
  const auto excess = [&](double tau) {
    CompensatedSum upper, lower;
    for (double v : sample) {
      if (v > tau) upper.add(v - tau);
      else lower.add(tau - v);
    }
    return alpha * upper.value() - (1.0 - alpha) * lower.value();
  };

  auto [min_it, max_it] = std::minmax_element(sample.begin(), sample.end());
  double lo = *min_it;
  double hi = *max_it;
  if (lo == hi) return lo;
  constexpr double kTolerance = 1e-10;
  while (hi - lo > kTolerance) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double f = excess(mid);
    if (f == 0.0) return mid;
    (f > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double ScoreSeries::mean() const { return compensated_mean(values); }

MeanScore mean_score(std::span<const double> forecasts, std::span<const double> realizations,
                     const PointScorer& scorer) {
  if (forecasts.size() != realizations.size()) {
    throw std::invalid_argument("mean_score: forecasts and realizations differ in length");
  }
  if (forecasts.empty()) throw std::invalid_argument("mean_score: empty input");
  MeanScore out;
  out.series.values.resize(forecasts.size());
  CompensatedSum acc;
  for (std::size_t i = 0; i < forecasts.size(); ++i) {
    const double s = score(scorer, forecasts[i], realizations[i]);
    if (!std::isfinite(s)) throw std::invalid_argument("mean_score: non-finite score");
    out.series.values[i] = s;
    acc.add(s);
  }
  out.mean = acc.value() / static_cast<double>(forecasts.size());
  return out;
}

}  // namespace infoval
