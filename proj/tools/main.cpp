#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "contagion/errors.hpp"
#include "contagion/pipeline.hpp"
#include "contagion/version.hpp"

namespace {

// 0 success, 2 bad input, 3 numerical failure, 4 I/O failure.
constexpr int kExitValidation = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitIo = 4;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stress-testing engine for interdependent bank networks"};
  app.set_version_flag("--version", std::string(contagion::kVersion));

  std::string banks, scenario, out = "out", basis = "reported";
  std::vector<std::string> methods = {"anan", "hala", "maxe"};
  std::vector<std::string> exports;
  std::vector<double> thetas = {0.971, 0.973};
  std::vector<double> betas = {0.3, 0.8};
  std::uint64_t seed = 1;
  int ensemble = 1;
  double link_threshold = 0.0;

  app.add_option("--banks", banks, "Balance-sheet CSV (bank_id,country,total_assets,equity,c2100,...)")
      ->required();
  app.add_option("--scenario", scenario, "Price-factor CSV (asset_code,factor); omit for baseline prices");
  app.add_option("--methods", methods, "Reconstruction methods to run")
      ->delimiter(',')
      ->check(CLI::IsMember({"anan", "hala", "maxe"}));
  app.add_option("--theta", thetas, "Failure thresholds as fractions of baseline equity")
      ->delimiter(',');
  app.add_option("--beta", betas, "Failure cost fractions")->delimiter(',');
  app.add_option("--seed", seed, "Seed for the randomized reconstruction");
  app.add_option("--ensemble", ensemble, "Number of seeds for the randomized reconstruction");
  app.add_option("--threshold-basis", basis, "Equity baseline for thresholds")
      ->check(CLI::IsMember({"reported", "model"}));
  app.add_option("--link-threshold", link_threshold, "Exposure cutoff below which links are ignored");
  app.add_option("--out", out, "Output directory");
  app.add_option("--export", exports, "Graph export formats")
      ->delimiter(',')
      ->check(CLI::IsMember({"graphml", "dot"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  contagion::RunConfig config;
  config.banks_path = banks;
  if (!scenario.empty()) config.scenario_path = scenario;
  config.methods.clear();
  for (const auto& name : methods) config.methods.push_back(*contagion::method_from_name(name));
  config.hala_seed = seed;
  config.hala_ensemble = ensemble;
  config.theta_grid = thetas;
  config.beta_grid = betas;
  config.threshold_basis = *contagion::threshold_basis_from_name(basis);
  config.link_threshold = link_threshold;
  config.output_dir = out;
  config.export_formats = exports;

  try {
    const contagion::StressReport report = contagion::run_pipeline(config);
    std::size_t failures = 0;
    for (const auto& run : report.runs)
      for (const auto& entry : run.cascades) failures = std::max(failures, entry.result.failed.size());
    std::cerr << "wrote " << (config.output_dir / "report.json").string() << " ("
              << report.runs.size() << " networks, worst case " << failures
              << " failed banks)\n";
    return 0;
  } catch (const contagion::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const contagion::NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const contagion::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 1;
  }
}
