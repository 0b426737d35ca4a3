#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "infoval/backtest.hpp"
#include "infoval/dcc.hpp"
#include "infoval/dmtest.hpp"
#include "infoval/errors.hpp"
#include "infoval/experiments.hpp"
#include "infoval/garch.hpp"
#include "infoval/scoring.hpp"
#include "infoval/serialization.hpp"

namespace py = pybind11;
using namespace infoval;

namespace {

py::object to_python(const Json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

Orientation orientation_from(const std::string& s) {
  if (s == "lower") return Orientation::LowerTail;
  if (s == "upper") return Orientation::UpperTail;
  throw std::invalid_argument("orientation must be 'lower' or 'upper'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Scoring, testing and simulation core";
  m.attr("__version__") = INFOVAL_VERSION;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<DegenerateVarianceError>(m, "DegenerateVarianceError", PyExc_ArithmeticError);

  m.def("quantile_score_sstar", &quantile_score_sstar, py::arg("x"), py::arg("y"), py::arg("alpha"));
  m.def("expectile_score", &expectile_score, py::arg("tau"), py::arg("y"), py::arg("alpha"));
  m.def(
      "mean_sstar",
      [](const std::vector<double>& forecasts, const std::vector<double>& realizations, double alpha) {
        return mean_score(forecasts, realizations, QuantileScorer::sstar(alpha)).mean;
      },
      py::arg("forecasts"), py::arg("realizations"), py::arg("alpha"));

  py::class_<DmTestResult>(m, "DmTestResult")
      .def_readonly("m_n", &DmTestResult::m_n)
      .def_readonly("sigma_hat", &DmTestResult::sigma_hat)
      .def_readonly("t_stat", &DmTestResult::t_stat)
      .def_readonly("p_value", &DmTestResult::p_value)
      .def_readonly("n", &DmTestResult::n)
      .def_readonly("truncation_lag", &DmTestResult::truncation_lag)
      .def_readonly("fallback_flag", &DmTestResult::fallback_flag)
      .def_readonly("identical_forecasts", &DmTestResult::identical_forecasts)
      .def("rejects", &DmTestResult::rejects, py::arg("level"));
  m.def(
      "dm_test",
      [](std::vector<double> z, int h) {
        ScoreDifferentialSeries s;
        s.z = std::move(z);
        s.horizon = h;
        return dm_test(s);
      },
      py::arg("differentials"), py::arg("h") = 1);

  py::class_<GarchParams>(m, "GarchParams")
      .def(py::init([](double kappa, double phi, double beta) { return GarchParams{kappa, phi, beta}; }),
           py::arg("kappa"), py::arg("phi"), py::arg("beta"))
      .def_readwrite("kappa", &GarchParams::kappa)
      .def_readwrite("phi", &GarchParams::phi)
      .def_readwrite("beta", &GarchParams::beta)
      .def("unconditional_variance", &GarchParams::unconditional_variance)
      .def("__repr__", [](const GarchParams& p) { return "GarchParams(" + to_json(p).dump() + ")"; });
  m.def("garch_preset", &garch_preset, py::arg("config"));
  m.def(
      "simulate_garch",
      [](const GarchParams& p, std::size_t n, std::uint64_t seed) {
        auto path = simulate_garch(p, n, seed);
        return py::make_tuple(path.returns, path.cond_var);
      },
      py::arg("params"), py::arg("n"), py::arg("seed"), "Returns (returns, conditional variances).");
  m.def(
      "fit_garch",
      [](const std::vector<double>& r) {
        const auto fit = fit_garch_qmle(r);
        py::dict d;
        d["params"] = fit.params;
        d["next_var"] = fit.next_var;
        d["loglik"] = fit.loglik;
        d["boundary"] = fit.boundary;
        d["converged"] = fit.converged;
        return d;
      },
      py::arg("returns"));

  m.def(
      "simulate_dcc",
      [](int config, std::size_t n, std::uint64_t seed) {
        return simulate_dcc(dcc_preset(config), n, seed).returns;
      },
      py::arg("config"), py::arg("n"), py::arg("seed"), "Bivariate returns of a preset as an (n, 2) array.");

  m.def(
      "backtest",
      [](const std::vector<double>& forecasts, const std::vector<double>& realizations, double alpha,
         const std::string& orientation) {
        return to_python(to_json(
            backtest(exceedance_indicators(forecasts, realizations, orientation_from(orientation), alpha))));
      },
      py::arg("forecasts"), py::arg("realizations"), py::arg("alpha"), py::arg("orientation") = "lower");

  m.def(
      "run_experiment",
      [](const std::string& config_text, const std::string& kind) {
        const auto config = parse_config(config_text);
        ExperimentReport report;
        {
          py::gil_scoped_release release;
          if (kind == "mean-scores") {
            report = run_mean_score_experiment(config);
          } else if (kind == "power") {
            report = run_power_study(config);
          } else {
            throw std::invalid_argument("kind must be 'mean-scores' or 'power'");
          }
        }
        return to_python(to_json(report));
      },
      py::arg("config"), py::arg("kind") = "mean-scores", "Runs a YAML configuration; returns the report as a dict.");

  m.def(
      "mixture_demo",
      [](double alpha, double sigma, std::size_t n, std::uint64_t seed) {
        return to_python(to_json(run_mixture_demo({alpha, sigma}, n, seed)));
      },
      py::arg("alpha") = 0.05, py::arg("sigma") = 2.0, py::arg("n") = 1000000, py::arg("seed") = 7);
}
