#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <string>
#include <vector>

#include "contagion/cascade.hpp"
#include "contagion/errors.hpp"
#include "contagion/ingest.hpp"
#include "contagion/model.hpp"
#include "contagion/netstats.hpp"
#include "contagion/pipeline.hpp"
#include "contagion/reconstruct.hpp"
#include "contagion/version.hpp"

namespace py = pybind11;
using namespace contagion;

namespace {

Marginals make_marginals(const Eigen::VectorXd& assets, const Eigen::VectorXd& liabilities) {
  Marginals m;
  m.assets = assets;
  m.liabilities = liabilities;
  m.validate();
  return m;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Stress-testing engine for interdependent bank networks";
  m.attr("__version__") = kVersion;

  // Specific translators are registered after the base so they win.
  const py::exception<Error> base_exc(m, "Error");
  py::register_exception<ValidationError>(m, "ValidationError", base_exc);
  py::register_exception<NumericError>(m, "NumericError", base_exc);
  py::register_exception<IoError>(m, "IoError", base_exc);

  m.def(
      "reconstruct_maxe",
      [](const Eigen::VectorXd& assets, const Eigen::VectorXd& liabilities, double tol,
         int max_iter) { return reconstruct_maxe(make_marginals(assets, liabilities), tol, max_iter).x; },
      py::arg("assets"), py::arg("liabilities"), py::arg("tol") = 1e-10,
      py::arg("max_iter") = 10000,
      "Entropy-style dense reconstruction via alternating proportional fitting.");

  m.def(
      "reconstruct_hala",
      [](const Eigen::VectorXd& assets, const Eigen::VectorXd& liabilities, std::uint64_t seed,
         double eps) { return reconstruct_hala(make_marginals(assets, liabilities), seed, eps).x; },
      py::arg("assets"), py::arg("liabilities"), py::arg("seed"), py::arg("eps") = 1e-6,
      "Randomized sequential fill; deterministic for a fixed seed.");

  m.def(
      "reconstruct_anan",
      [](const Eigen::VectorXd& assets, const Eigen::VectorXd& liabilities) {
        return reconstruct_anan(make_marginals(assets, liabilities)).x;
      },
      py::arg("assets"), py::arg("liabilities"), "Sparse greedy max-min reconstruction.");

  m.def(
      "marginal_check",
      [](const Eigen::MatrixXd& x, const Eigen::VectorXd& assets,
         const Eigen::VectorXd& liabilities, double tol) {
        ExposureMatrix wrapped;
        wrapped.x = x;
        const MarginalReport rep = validate_marginals(wrapped, make_marginals(assets, liabilities), tol);
        py::dict d;
        d["row_residual"] = rep.row_residual;
        d["col_residual"] = rep.col_residual;
        d["max_residual"] = rep.max_residual;
        d["pass"] = rep.pass;
        return d;
      },
      py::arg("x"), py::arg("assets"), py::arg("liabilities"), py::arg("tol") = 1e-8);

  m.def("count_links", &count_links, py::arg("x"), py::arg("threshold") = 0.0);

  py::class_<NetworkStats>(m, "NetworkStats")
      .def_readonly("links", &NetworkStats::links)
      .def_readonly("density_pct", &NetworkStats::density_pct)
      .def_readonly("avg_degree", &NetworkStats::avg_degree)
      .def_readonly("med_degree", &NetworkStats::med_degree)
      .def_readonly("assortativity", &NetworkStats::assortativity)
      .def_readonly("clustering_pct", &NetworkStats::clustering_pct)
      .def_readonly("lender_dependency_pct", &NetworkStats::lender_dependency_pct)
      .def_readonly("borrower_dependency_pct", &NetworkStats::borrower_dependency_pct)
      .def_readonly("hhi_assets_mean", &NetworkStats::hhi_assets_mean)
      .def_readonly("hhi_assets_median", &NetworkStats::hhi_assets_median)
      .def_readonly("hhi_liabilities_mean", &NetworkStats::hhi_liabilities_mean)
      .def_readonly("hhi_liabilities_median", &NetworkStats::hhi_liabilities_median)
      .def_readonly("core_size_pct", &NetworkStats::core_size_pct)
      .def("__repr__", [](const NetworkStats& s) {
        return "NetworkStats(links=" + std::to_string(s.links) + ")";
      });

  m.def("network_statistics", &network_statistics, py::arg("x"), py::arg("link_threshold") = 0.0);

  m.def(
      "core_periphery_fit",
      [](const Eigen::MatrixXd& x, double link_threshold) {
        const CorePeriphery cp = core_periphery_fit(x, link_threshold);
        return py::make_tuple(cp.core, cp.error);
      },
      py::arg("x"), py::arg("link_threshold") = 0.0,
      "Returns (core bank indices, tiering error score).");

  m.def(
      "interdependency_matrix",
      [](const Eigen::MatrixXd& exposures, const Eigen::VectorXd& total_values,
         const Eigen::VectorXd& l_ext) {
        const FractionMatrix c = to_fraction_matrix(exposures, total_values);
        return interdependency(c, capital_ratios(c, l_ext)).a;
      },
      py::arg("exposures"), py::arg("total_values"), py::arg("l_ext"),
      "Chat (I - C)^-1 from nominal exposures, total values, and external liability ratios.");

  m.def("failure_thresholds", &failure_thresholds, py::arg("baseline_equity"), py::arg("theta"));

  m.def(
      "apply_shock",
      [](const Eigen::MatrixXd& d, const Eigen::VectorXd& p, const Eigen::VectorXd& factors) {
        PortfolioMatrix port;
        port.d = d;
        port.p = p;
        port.validate();
        ShockScenario shock;
        shock.factors = factors;
        return apply_shock(port, shock);
      },
      py::arg("d"), py::arg("p"), py::arg("factors"));

  py::class_<CascadeResult>(m, "CascadeResult")
      .def_readonly("hierarchy", &CascadeResult::hierarchy)
      .def_readonly("failed", &CascadeResult::failed)
      .def_readonly("equity", &CascadeResult::equity)
      .def_readonly("failure_costs", &CascadeResult::failure_costs)
      .def_readonly("rounds", &CascadeResult::rounds)
      .def("__repr__", [](const CascadeResult& r) {
        return "CascadeResult(rounds=" + std::to_string(r.rounds) +
               ", failed=" + std::to_string(r.failed.size()) + ")";
      });

  m.def(
      "run_cascade",
      [](const Eigen::MatrixXd& a, const Eigen::VectorXd& shocked_external,
         const Eigen::VectorXd& thresholds, double beta) {
        InterdependencyMatrix interdep;
        interdep.a = a;
        return run_cascade(interdep, shocked_external, thresholds, beta);
      },
      py::arg("a"), py::arg("shocked_external"), py::arg("thresholds"), py::arg("beta"));

  m.def(
      "run_pipeline",
      [](const std::string& banks, const std::string& output_dir,
         const std::optional<std::string>& scenario, const std::vector<std::string>& methods,
         const std::vector<double>& thetas, const std::vector<double>& betas, std::uint64_t seed,
         int ensemble, const std::string& threshold_basis, double link_threshold,
         const std::vector<std::string>& exports) {
        RunConfig cfg;
        cfg.banks_path = banks;
        if (scenario) cfg.scenario_path = *scenario;
        cfg.methods.clear();
        for (const auto& name : methods) {
          const auto parsed = method_from_name(name);
          if (!parsed) throw ValidationError("unknown reconstruction method '" + name + "'");
          cfg.methods.push_back(*parsed);
        }
        const auto basis = threshold_basis_from_name(threshold_basis);
        if (!basis) throw ValidationError("unknown threshold basis '" + threshold_basis + "'");
        cfg.threshold_basis = *basis;
        cfg.hala_seed = seed;
        cfg.hala_ensemble = ensemble;
        cfg.theta_grid = thetas;
        cfg.beta_grid = betas;
        cfg.link_threshold = link_threshold;
        cfg.output_dir = output_dir;
        cfg.export_formats = exports;
        return run_pipeline(cfg).to_json();
      },
      py::arg("banks"), py::arg("output_dir"), py::kw_only(),
      py::arg("scenario") = std::nullopt,
      py::arg("methods") = std::vector<std::string>{"anan", "hala", "maxe"},
      py::arg("thetas") = std::vector<double>{0.971, 0.973},
      py::arg("betas") = std::vector<double>{0.3, 0.8}, py::arg("seed") = 1,
      py::arg("ensemble") = 1, py::arg("threshold_basis") = "reported",
      py::arg("link_threshold") = 0.0, py::arg("exports") = std::vector<std::string>{},
      "Full run; writes report files into output_dir and returns the report JSON.");
}
