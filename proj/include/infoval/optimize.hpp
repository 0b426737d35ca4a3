#pragma once

#include <functional>
#include <span>
#include <vector>

namespace infoval {

/// Objective evaluated at x. When `gradient` is non-empty it must be filled.
using Objective = std::function<double(std::span<const double> x, std::span<double> gradient)>;

struct MinimizeOptions {
  /// Stop once an iteration improves the objective by less than this.
  double f_tolerance = 1e-8;
  double gradient_tolerance = 1e-7;
  int max_iterations = 500;
  double initial_step = 0.1;
  double line_search_tolerance = 0.1;
  /// Objective supplies its own gradient; otherwise central differences.
  bool analytic_gradient = true;
  double difference_step = 1e-6;
};

struct MinimizeResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Unconstrained quasi-Newton minimization (GSL vector BFGS2).
MinimizeResult minimize(const Objective& objective, std::vector<double> start,
                        const MinimizeOptions& options = {});

}  // namespace infoval
