#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace infoval {

/// Strictly increasing transform used by the generalized quantile score.
/// Either a named family or a piecewise-linear table (linearly extrapolated
/// beyond its end points).
class MonotoneFunction {
 public:
  enum class Family { Identity, Scaled, Exp, Tabulated };

  static MonotoneFunction identity();
  /// x -> factor * x, factor > 0. The "x / alpha" family is scaled(1 / alpha).
  static MonotoneFunction scaled(double factor);
  static MonotoneFunction exponential();
  static MonotoneFunction tabulated(std::vector<double> x, std::vector<double> y);

  double operator()(double x) const;

  Family family() const noexcept { return family_; }
  double factor() const noexcept { return factor_; }
  const std::vector<double>& table_x() const noexcept { return xs_; }
  const std::vector<double>& table_y() const noexcept { return ys_; }

  /// Interval on which strict monotonicity is checked.
  std::pair<double, double> support() const;

  /// True when the function increases strictly across 1001 equispaced points
  /// of its support.
  bool strictly_increasing_on_support() const;

 private:
  MonotoneFunction() = default;

  Family family_ = Family::Identity;
  double factor_ = 1.0;
  std::vector<double> xs_;
  std::vector<double> ys_;
};

/// Quantile scoring function at level alpha.
///
/// SStar form:    S*(x, y) = x (1{x>=y}/alpha - 1) - y 1{x>=y}/alpha
/// General form:  S(x, y)  = (1{x>=y} - alpha) (g(x) - g(y))
///
/// The general form with g(x) = x / alpha equals S*(x, y) + y, so both rank
/// forecasts identically; S* has the expected-shortfall interpretation for
/// ideal forecasts.
class QuantileScorer {
 public:
  enum class Form { SStar, General };

  static QuantileScorer sstar(double alpha);
  /// Throws std::invalid_argument if g is not strictly increasing.
  static QuantileScorer general(double alpha, MonotoneFunction g);

  double alpha() const noexcept { return alpha_; }
  Form form() const noexcept { return form_; }
  /// Only meaningful for the general form.
  const MonotoneFunction& g() const noexcept { return g_; }

  double operator()(double forecast, double realization) const;

 private:
  QuantileScorer(double alpha, Form form, MonotoneFunction g);

  double alpha_;
  Form form_;
  MonotoneFunction g_;
};

/// Asymmetric squared loss |1{tau>=y} - alpha| (y - tau)^2.
class ExpectileScorer {
 public:
  explicit ExpectileScorer(double alpha);
  double alpha() const noexcept { return alpha_; }
  double operator()(double forecast, double realization) const;

 private:
  double alpha_;
};

using PointScorer = std::variant<QuantileScorer, ExpectileScorer>;

double score(const PointScorer& scorer, double forecast, double realization);

double quantile_score_sstar(double x, double y, double alpha);
double quantile_score_general(double x, double y, double alpha, const MonotoneFunction& g);
double expectile_score(double tau, double y, double alpha);

/// Negative log density of N(mu, var) at y.
double log_score_gaussian(double mu, double var, double y);

struct GaussianComponent {
  double weight;
  double mean;
  double variance;
};

/// Negative log density of a finite Gaussian mixture at y.
double log_score_gaussian_mixture(std::span<const GaussianComponent> components, double y);

/// Empirical alpha-expectile: the root of
///   alpha * sum (y_i - tau)^+ = (1 - alpha) * sum (tau - y_i)^+,
/// bracketed by the sample extremes and bisected to 1e-10.
double compute_expectile(std::span<const double> sample, double alpha);

/// Per-observation scores of one forecast stream.
struct ScoreSeries {
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  double mean() const;
};

struct MeanScore {
  double mean;
  ScoreSeries series;
};

/// Mean score (compensated summation) and the underlying series.
MeanScore mean_score(std::span<const double> forecasts, std::span<const double> realizations,
                     const PointScorer& scorer);

}  // namespace infoval
