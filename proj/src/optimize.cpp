#include "infoval/optimize.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>
#include <gsl/gsl_vector.h>

namespace infoval {
namespace {

// Stand-in for non-finite objective values; the line search backs off from it.
constexpr double kPenalty = 1e300;

struct Context {
  const Objective* objective;
  const MinimizeOptions* options;
  std::vector<double> x;
  std::vector<double> grad;
};

double evaluate(Context& ctx, std::span<double> grad) {
  double f;
  try {
    f = (*ctx.objective)(ctx.x, grad);
  } catch (...) {
    f = kPenalty;
  }
  if (!std::isfinite(f)) f = kPenalty;
  return f;
}

void load(Context& ctx, const gsl_vector* v) {
  for (std::size_t i = 0; i < ctx.x.size(); ++i) ctx.x[i] = gsl_vector_get(v, i);
}

double value_only(Context& ctx) { return evaluate(ctx, {}); }

void fill_gradient(Context& ctx, double f_at_x) {
  if (ctx.options->analytic_gradient) {
    evaluate(ctx, ctx.grad);
    return;
  }
  (void)f_at_x;
  const double h = ctx.options->difference_step;
  for (std::size_t i = 0; i < ctx.x.size(); ++i) {
    const double xi = ctx.x[i];
    ctx.x[i] = xi + h;
    const double up = value_only(ctx);
    ctx.x[i] = xi - h;
    const double down = value_only(ctx);
    ctx.x[i] = xi;
    ctx.grad[i] = (up - down) / (2.0 * h);
  }
}

double gsl_f(const gsl_vector* v, void* params) {
  auto& ctx = *static_cast<Context*>(params);
  load(ctx, v);
  return value_only(ctx);
}

void gsl_df(const gsl_vector* v, void* params, gsl_vector* df) {
  auto& ctx = *static_cast<Context*>(params);
  load(ctx, v);
  if (ctx.options->analytic_gradient) {
    evaluate(ctx, ctx.grad);
  } else {
    fill_gradient(ctx, 0.0);
  }
  for (std::size_t i = 0; i < ctx.grad.size(); ++i) {
    gsl_vector_set(df, i, std::isfinite(ctx.grad[i]) ? ctx.grad[i] : 0.0);
  }
}

void gsl_fdf(const gsl_vector* v, void* params, double* f, gsl_vector* df) {
  auto& ctx = *static_cast<Context*>(params);
  load(ctx, v);
  if (ctx.options->analytic_gradient) {
    *f = evaluate(ctx, ctx.grad);
  } else {
    *f = value_only(ctx);
    fill_gradient(ctx, *f);
  }
  for (std::size_t i = 0; i < ctx.grad.size(); ++i) {
    gsl_vector_set(df, i, std::isfinite(ctx.grad[i]) ? ctx.grad[i] : 0.0);
  }
}

struct VectorDeleter {
  void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};
struct MinimizerDeleter {
  void operator()(gsl_multimin_fdfminimizer* m) const { gsl_multimin_fdfminimizer_free(m); }
};

}  // namespace

MinimizeResult minimize(const Objective& objective, std::vector<double> start,
                        const MinimizeOptions& options) {
  if (start.empty()) throw std::invalid_argument("minimize: empty start vector");
  // GSL's default handler aborts; errors are reported through return codes.
  static const auto previous_handler = gsl_set_error_handler_off();
  (void)previous_handler;

  const std::size_t dim = start.size();
  Context ctx{&objective, &options, start, std::vector<double>(dim, 0.0)};

  gsl_multimin_function_fdf fdf;
  fdf.n = dim;
  fdf.f = &gsl_f;
  fdf.df = &gsl_df;
  fdf.fdf = &gsl_fdf;
  fdf.params = &ctx;

  std::unique_ptr<gsl_vector, VectorDeleter> x0(gsl_vector_alloc(dim));
  for (std::size_t i = 0; i < dim; ++i) gsl_vector_set(x0.get(), i, start[i]);

  std::unique_ptr<gsl_multimin_fdfminimizer, MinimizerDeleter> solver(
      gsl_multimin_fdfminimizer_alloc(gsl_multimin_fdfminimizer_vector_bfgs2, dim));
  gsl_multimin_fdfminimizer_set(solver.get(), &fdf, x0.get(), options.initial_step,
                                options.line_search_tolerance);

  MinimizeResult result;
  double previous = solver->f;
  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    result.iterations = iter;
    const int status = gsl_multimin_fdfminimizer_iterate(solver.get());
    const double current = solver->f;
    if (status != GSL_SUCCESS) {
      // No further progress possible along the search direction.
      result.converged =
          gsl_multimin_test_gradient(solver->gradient, 1e3 * options.gradient_tolerance) ==
              GSL_SUCCESS ||
          std::abs(previous - current) < options.f_tolerance;
      break;
    }
    if (std::abs(previous - current) < options.f_tolerance ||
        gsl_multimin_test_gradient(solver->gradient, options.gradient_tolerance) == GSL_SUCCESS) {
      result.converged = true;
      break;
    }
    previous = current;
  }

  result.value = solver->f;
  result.x.resize(dim);
  for (std::size_t i = 0; i < dim; ++i) result.x[i] = gsl_vector_get(solver->x, i);
  return result;
}

}  // namespace infoval
