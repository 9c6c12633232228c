#include "contagion/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

#include "contagion/detail/format.hpp"
#include "contagion/errors.hpp"
#include "contagion/log.hpp"
#include "contagion/model.hpp"
#include "contagion/version.hpp"

namespace contagion {

namespace {

using nlohmann::json;

constexpr double kMarginalTol = 1e-8;

json stats_to_json(const NetworkStats& s) {
  json j;
  j["links"] = s.links;
  j["density_pct"] = s.density_pct;
  j["avg_degree"] = s.avg_degree;
  j["med_degree"] = s.med_degree;
  if (s.assortativity)
    j["assortativity"] = *s.assortativity;
  else
    j["assortativity"] = nullptr;
  j["clustering_pct"] = s.clustering_pct;
  j["lender_dependency_pct"] = s.lender_dependency_pct;
  j["borrower_dependency_pct"] = s.borrower_dependency_pct;
  j["hhi_assets_mean"] = s.hhi_assets_mean;
  j["hhi_assets_median"] = s.hhi_assets_median;
  j["hhi_liabilities_mean"] = s.hhi_liabilities_mean;
  j["hhi_liabilities_median"] = s.hhi_liabilities_median;
  j["core_size_pct"] = s.core_size_pct;
  return j;
}

std::vector<std::string> round_names(const std::vector<int>& banks,
                                     const std::vector<BankRecord>& roster) {
  std::vector<std::string> names;
  names.reserve(banks.size());
  for (int k : banks) names.push_back(roster[static_cast<std::size_t>(k)].bank_id);
  return names;
}

json cascade_to_json(const std::string& method, const CascadeEntry& entry,
                     const std::vector<BankRecord>& roster) {
  json j;
  j["method"] = method;
  j["theta"] = entry.theta;
  j["beta"] = entry.beta;
  j["rounds"] = entry.result.rounds;
  j["hierarchy"] = json::array();
  for (const auto& round : entry.result.hierarchy) j["hierarchy"].push_back(round_names(round, roster));
  j["failed"] = round_names(entry.result.failed, roster);
  j["n_failed"] = entry.result.failed.size();
  return j;
}

std::string joined_failure_set(const CascadeEntry& entry, const std::vector<BankRecord>& roster) {
  if (entry.result.failed.empty()) return "(none)";
  std::string out;
  for (int k : entry.result.failed) {
    if (!out.empty()) out += "|";
    out += roster[static_cast<std::size_t>(k)].bank_id;
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("failed while writing " + path.string());
}

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

// One reconstructed network taken through calibration and the full grid.
MethodRun evaluate_network(ExposureMatrix&& exposures, const RunConfig& config,
                           const std::vector<BankRecord>& records, const Marginals& marginals,
                           const PortfolioMatrix& port, const Eigen::VectorXd& l_ext,
                           const Eigen::VectorXd& equity_rep,
                           const Eigen::VectorXd& shocked_external_base) {
  MethodRun run;
  run.method = exposures.method;
  run.seed = exposures.seed;
  run.exposures = std::move(exposures);

  run.marginal_check = validate_marginals(run.exposures, marginals, kMarginalTol);
  if (!run.marginal_check.pass)
    log::warn(method_name(run.method) + ": reconstructed marginals off by " +
              detail::format_double(run.marginal_check.max_residual));

  const FractionMatrix c = to_fraction_matrix(run.exposures.x, total_asset_values(records));
  const CapitalRatios ratios = capital_ratios(c, l_ext);
  const InterdependencyMatrix a = interdependency(c, ratios);
  run.model_equity = equity_values(a, port, Eigen::VectorXd::Zero(port.banks()));

  run.stats = network_statistics(run.exposures.x, config.link_threshold);

  const Eigen::VectorXd& baseline =
      config.threshold_basis == ThresholdBasis::reported ? equity_rep : run.model_equity;
  for (double theta : config.theta_grid) {
    const Eigen::VectorXd thresholds = failure_thresholds(baseline, theta);
    for (double beta : config.beta_grid) {
      CascadeEntry entry;
      entry.theta = theta;
      entry.beta = beta;
      entry.result = run_cascade(a, shocked_external_base, thresholds, beta);
      run.cascades.push_back(std::move(entry));
    }
  }
  return run;
}

}  // namespace

std::string threshold_basis_name(ThresholdBasis basis) {
  return basis == ThresholdBasis::reported ? "reported" : "model";
}

std::optional<ThresholdBasis> threshold_basis_from_name(const std::string& name) {
  if (name == "reported") return ThresholdBasis::reported;
  if (name == "model") return ThresholdBasis::model;
  return std::nullopt;
}

void RunConfig::validate() const {
  if (banks_path.empty()) throw ValidationError("banks path is required");
  if (methods.empty()) throw ValidationError("at least one reconstruction method is required");
  std::set<Method> seen(methods.begin(), methods.end());
  if (seen.size() != methods.size()) throw ValidationError("duplicate reconstruction method");
  if (theta_grid.empty() || beta_grid.empty())
    throw ValidationError("theta and beta grids must be non-empty");
  for (double theta : theta_grid)
    if (!(theta > 0.0 && theta <= 1.0))
      throw ValidationError("theta must lie in (0,1], got " + detail::format_double(theta));
  for (double beta : beta_grid)
    if (!(beta >= 0.0 && beta <= 1.0))
      throw ValidationError("beta must lie in [0,1], got " + detail::format_double(beta));
  if (hala_ensemble < 1) throw ValidationError("ensemble size must be at least 1");
  if (!(link_threshold >= 0.0)) throw ValidationError("link threshold must be nonnegative");
  for (const auto& fmt : export_formats)
    if (fmt != "graphml" && fmt != "dot")
      throw ValidationError("unknown export format '" + fmt + "'");
}

std::string StressReport::to_json() const {
  json j;
  j["version"] = kVersion;

  j["banks"] = json::array();
  for (const auto& rec : banks) {
    json b;
    b["id"] = rec.bank_id;
    b["country"] = rec.country;
    b["total_assets"] = rec.total_assets;
    b["equity"] = rec.equity;
    b["interbank"] = rec.interbank;
    j["banks"].push_back(std::move(b));
  }

  json cfg;
  cfg["banks"] = config.banks_path.string();
  cfg["scenario"] = config.scenario_path ? json(config.scenario_path->string()) : json(nullptr);
  cfg["methods"] = json::array();
  for (Method m : config.methods) cfg["methods"].push_back(method_name(m));
  cfg["hala_seed"] = config.hala_seed;
  cfg["hala_ensemble"] = config.hala_ensemble;
  cfg["theta_grid"] = config.theta_grid;
  cfg["beta_grid"] = config.beta_grid;
  cfg["threshold_basis"] = threshold_basis_name(config.threshold_basis);
  cfg["link_threshold"] = config.link_threshold;
  cfg["exports"] = config.export_formats;
  j["config"] = std::move(cfg);

  j["network_stats"] = json::object();
  j["calibration"] = json::object();
  j["cascades"] = json::array();
  for (const auto& run : runs) {
    const std::string name = method_name(run.method);
    j["network_stats"][name] = stats_to_json(run.stats);

    double max_gap = 0.0;
    for (std::size_t i = 0; i < banks.size(); ++i)
      max_gap = std::max(max_gap, std::abs(run.model_equity(static_cast<Eigen::Index>(i)) -
                                           banks[i].equity) /
                                      banks[i].equity);
    json cal;
    cal["max_rel_equity_gap"] = max_gap;
    cal["marginal_residual"] = run.marginal_check.max_residual;
    cal["marginal_pass"] = run.marginal_check.pass;
    if (run.seed) cal["seed"] = *run.seed;
    j["calibration"][name] = std::move(cal);

    for (const auto& entry : run.cascades) j["cascades"].push_back(cascade_to_json(name, entry, banks));
  }

  if (config.hala_ensemble > 1) {
    json ens;
    ens["runs"] = json::array();
    // frequency of terminal failure sets per grid point, over all hala seeds
    std::map<std::pair<double, double>, std::map<std::string, int>> freq;
    auto tally = [&](const MethodRun& run) {
      json r;
      r["seed"] = run.seed ? json(*run.seed) : json(nullptr);
      r["cascades"] = json::array();
      for (const auto& entry : run.cascades) {
        r["cascades"].push_back(cascade_to_json("hala", entry, banks));
        ++freq[{entry.theta, entry.beta}][joined_failure_set(entry, banks)];
      }
      ens["runs"].push_back(std::move(r));
    };
    for (const auto& run : runs)
      if (run.method == Method::hala) tally(run);
    for (const auto& run : ensemble_runs) tally(run);

    ens["frequency"] = json::array();
    for (const auto& [grid_point, sets] : freq) {
      json f;
      f["theta"] = grid_point.first;
      f["beta"] = grid_point.second;
      f["sets"] = sets;
      ens["frequency"].push_back(std::move(f));
    }
    j["ensemble"] = std::move(ens);
  }

  return j.dump(2) + "\n";
}

std::string StressReport::stats_csv() const {
  std::ostringstream out;
  out << "method,links,density_pct,avg_degree,med_degree,assortativity,clustering_pct,"
         "lender_dependency_pct,borrower_dependency_pct,hhi_assets_mean,hhi_assets_median,"
         "hhi_liabilities_mean,hhi_liabilities_median,core_size_pct\n";
  for (const auto& run : runs) {
    const NetworkStats& s = run.stats;
    out << method_name(run.method) << "," << s.links << ","
        << detail::format_fixed(s.density_pct, 3) << "," << detail::format_fixed(s.avg_degree, 3)
        << "," << detail::format_fixed(s.med_degree, 3) << ","
        << (s.assortativity ? detail::format_fixed(*s.assortativity, 3) : std::string("NaN"))
        << "," << detail::format_fixed(s.clustering_pct, 3) << ","
        << detail::format_fixed(s.lender_dependency_pct, 3) << ","
        << detail::format_fixed(s.borrower_dependency_pct, 3) << ","
        << detail::format_fixed(s.hhi_assets_mean, 3) << ","
        << detail::format_fixed(s.hhi_assets_median, 3) << ","
        << detail::format_fixed(s.hhi_liabilities_mean, 3) << ","
        << detail::format_fixed(s.hhi_liabilities_median, 3) << ","
        << detail::format_fixed(s.core_size_pct, 3) << "\n";
  }
  return out.str();
}

std::string StressReport::hierarchies_csv() const {
  std::ostringstream out;
  out << "method,theta,beta,round,banks\n";
  for (const auto& run : runs) {
    for (const auto& entry : run.cascades) {
      for (std::size_t r = 0; r < entry.result.hierarchy.size(); ++r) {
        out << method_name(run.method) << "," << detail::format_double(entry.theta) << ","
            << detail::format_double(entry.beta) << "," << (r + 1) << ",";
        const auto names = round_names(entry.result.hierarchy[r], banks);
        for (std::size_t k = 0; k < names.size(); ++k) out << (k ? "|" : "") << names[k];
        out << "\n";
      }
    }
  }
  return out.str();
}

StressReport run_pipeline(const RunConfig& config) {
  config.validate();

  StressReport report;
  report.config = config;
  report.banks = parse_banks(config.banks_path);
  const std::vector<BankRecord>& records = report.banks;

  const Marginals marginals = derive_marginals(records);
  const PortfolioMatrix port = build_portfolio(records);
  const Eigen::VectorXd l_ext = derive_liability_ratios(records);
  const Eigen::VectorXd equity_rep = reported_equity(records);

  ShockScenario scenario;
  if (config.scenario_path) {
    scenario = parse_scenario(*config.scenario_path);
  } else {
    scenario.factors = Eigen::VectorXd::Ones(port.classes());
    log::info("no scenario supplied; running at baseline prices");
  }
  const Eigen::VectorXd shocked_external = apply_shock(port, scenario);

  for (Method method : config.methods) {
    switch (method) {
      case Method::anan:
        report.runs.push_back(evaluate_network(reconstruct_anan(marginals), config, records,
                                               marginals, port, l_ext, equity_rep,
                                               shocked_external));
        break;
      case Method::maxe:
        report.runs.push_back(evaluate_network(reconstruct_maxe(marginals), config, records,
                                               marginals, port, l_ext, equity_rep,
                                               shocked_external));
        break;
      case Method::hala: {
        report.runs.push_back(
            evaluate_network(reconstruct_hala(marginals, config.hala_seed), config, records,
                             marginals, port, l_ext, equity_rep, shocked_external));
        for (int k = 1; k < config.hala_ensemble; ++k)
          report.ensemble_runs.push_back(
              evaluate_network(reconstruct_hala(marginals, config.hala_seed + static_cast<std::uint64_t>(k)),
                               config, records, marginals, port, l_ext, equity_rep,
                               shocked_external));
        break;
      }
    }
  }

  std::filesystem::create_directories(config.output_dir);
  write_file(config.output_dir / "report.json", report.to_json());
  write_file(config.output_dir / "network_stats.csv", report.stats_csv());
  write_file(config.output_dir / "hierarchies.csv", report.hierarchies_csv());
  for (const auto& fmt : config.export_formats)
    for (const auto& run : report.runs) {
      const std::string ext = fmt == "graphml" ? ".graphml" : ".dot";
      export_graph(config.output_dir / ("network_" + method_name(run.method) + ext), fmt,
                   run.exposures.x, records, equity_rep, config.link_threshold);
    }
  return report;
}

void export_graph(const std::filesystem::path& path, const std::string& format,
                  const Eigen::MatrixXd& x, const std::vector<BankRecord>& banks,
                  const Eigen::VectorXd& equity, double link_threshold) {
  if (x.rows() != x.cols() || x.rows() != static_cast<Eigen::Index>(banks.size()) ||
      equity.size() != x.rows())
    throw DimensionMismatch("graph export inputs disagree on the bank count");

  std::ostringstream out;
  if (format == "graphml") {
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
        << "  <key id=\"equity\" for=\"node\" attr.name=\"equity\" attr.type=\"double\"/>\n"
        << "  <key id=\"country\" for=\"node\" attr.name=\"country\" attr.type=\"string\"/>\n"
        << "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n"
        << "  <graph id=\"G\" edgedefault=\"directed\">\n";
    for (std::size_t i = 0; i < banks.size(); ++i)
      out << "    <node id=\"" << xml_escape(banks[i].bank_id) << "\">"
          << "<data key=\"equity\">" << detail::format_double(equity(static_cast<Eigen::Index>(i)))
          << "</data><data key=\"country\">" << xml_escape(banks[i].country)
          << "</data></node>\n";
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      for (Eigen::Index j = 0; j < x.cols(); ++j)
        if (i != j && x(i, j) > link_threshold)
          out << "    <edge source=\"" << xml_escape(banks[static_cast<std::size_t>(i)].bank_id)
              << "\" target=\"" << xml_escape(banks[static_cast<std::size_t>(j)].bank_id)
              << "\"><data key=\"weight\">" << detail::format_double(x(i, j))
              << "</data></edge>\n";
    out << "  </graph>\n</graphml>\n";
  } else if (format == "dot") {
    out << "digraph interbank {\n";
    for (std::size_t i = 0; i < banks.size(); ++i)
      out << "  \"" << banks[i].bank_id << "\" [equity="
          << detail::format_double(equity(static_cast<Eigen::Index>(i))) << ", country=\""
          << banks[i].country << "\"];\n";
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      for (Eigen::Index j = 0; j < x.cols(); ++j)
        if (i != j && x(i, j) > link_threshold)
          out << "  \"" << banks[static_cast<std::size_t>(i)].bank_id << "\" -> \""
              << banks[static_cast<std::size_t>(j)].bank_id
              << "\" [weight=" << detail::format_double(x(i, j)) << "];\n";
    out << "}\n";
  } else {
    throw ValidationError("unknown export format '" + format + "'");
  }
  write_file(path, out.str());
}

}  // namespace contagion
