#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "contagion/cascade.hpp"
#include "contagion/ingest.hpp"
#include "contagion/netstats.hpp"
#include "contagion/reconstruct.hpp"

namespace contagion {

enum class ThresholdBasis { reported, model };

std::string threshold_basis_name(ThresholdBasis basis);
std::optional<ThresholdBasis> threshold_basis_from_name(const std::string& name);

struct RunConfig {
  std::filesystem::path banks_path;
  std::optional<std::filesystem::path> scenario_path;  // absent = no repricing
  std::vector<Method> methods{Method::anan, Method::hala, Method::maxe};
  std::uint64_t hala_seed = 1;
  int hala_ensemble = 1;  // extra seeds are hala_seed+1, hala_seed+2, ...
  std::vector<double> theta_grid;
  std::vector<double> beta_grid;
  ThresholdBasis threshold_basis = ThresholdBasis::reported;
  double link_threshold = 0.0;
  std::filesystem::path output_dir = "out";
  std::vector<std::string> export_formats;  // subset of {graphml, dot}

  void validate() const;
};

struct CascadeEntry {
  double theta = 0.0;
  double beta = 0.0;
  CascadeResult result;
};

// Everything derived from one reconstructed network.
struct MethodRun {
  Method method = Method::anan;
  std::optional<std::uint64_t> seed;  // set for hala
  ExposureMatrix exposures;
  MarginalReport marginal_check;
  NetworkStats stats;
  Eigen::VectorXd model_equity;        // baseline equity implied by the network
  std::vector<CascadeEntry> cascades;  // theta-major, beta-minor grid order
};

struct StressReport {
  std::vector<BankRecord> banks;
  RunConfig config;
  std::vector<MethodRun> runs;           // one per configured method
  std::vector<MethodRun> ensemble_runs;  // hala seeds beyond the first

  std::string to_json() const;  // deterministic: sorted keys, no timestamps
  std::string stats_csv() const;
  std::string hierarchies_csv() const;
};

// Full run: ingest, reconstruct each method, calibrate, sweep the theta/beta
// grid, write report.json + network_stats.csv + hierarchies.csv (+ graph
// exports) into config.output_dir.
StressReport run_pipeline(const RunConfig& config);

// Weighted directed graph dump; nodes carry equity and country, entries at or
// below link_threshold are omitted. format is "graphml" or "dot".
void export_graph(const std::filesystem::path& path, const std::string& format,
                  const Eigen::MatrixXd& x, const std::vector<BankRecord>& banks,
                  const Eigen::VectorXd& equity, double link_threshold = 0.0);

}  // namespace contagion
