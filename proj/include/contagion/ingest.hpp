#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "contagion/cascade.hpp"
#include "contagion/model.hpp"
#include "contagion/reconstruct.hpp"

namespace contagion {

// One balance-sheet row. Currency figures share one unit (millions).
struct BankRecord {
  std::string bank_id;
  std::string country;                // ISO-2
  double total_assets = 0.0;
  double equity = 0.0;                // restated / Tier-1 figure
  double interbank = 0.0;             // claims on credit institutions (class 2100)
  std::map<int, double> external;     // asset-class code -> exposure, 20 external codes

  void validate() const;
};

struct AssetClassCatalog {
  struct Entry {
    int code;
    std::string name;
  };

  std::vector<Entry> entries;  // all 21 codes in fixed column order
  int interbank_code = 2100;

  static const AssetClassCatalog& standard();

  std::vector<int> external_codes() const;  // the 20 non-interbank codes, in order
  bool contains(int code) const;
  void validate() const;
};

// banks.csv: header `bank_id,country,total_assets,equity,c2100,c1100,...,c6700`.
// Missing asset-code columns are zero-filled with a warning; unknown columns,
// malformed numbers, and duplicate bank ids are rejected.
std::vector<BankRecord> parse_banks(const std::filesystem::path& path);
std::vector<BankRecord> parse_banks(std::istream& in, const std::string& source_name);
void write_banks(const std::filesystem::path& path, const std::vector<BankRecord>& records);
std::string banks_csv_header();

// D_ik = external exposure of bank i in catalog class k; baseline prices p = 1.
PortfolioMatrix build_portfolio(const std::vector<BankRecord>& records,
                                const AssetClassCatalog& catalog = AssetClassCatalog::standard());

// Interbank assets are mirrored as liabilities, so the marginals balance by
// construction.
Marginals derive_marginals(const std::vector<BankRecord>& records);

// l_ext_i = (total_assets - equity - interbank) / total_assets, in [0, 1).
Eigen::VectorXd derive_liability_ratios(const std::vector<BankRecord>& records);

Eigen::VectorXd reported_equity(const std::vector<BankRecord>& records);
Eigen::VectorXd total_asset_values(const std::vector<BankRecord>& records);

// scenario.csv: header `asset_code,factor`, one row per external class;
// absent classes keep factor 1.0 (warned). Factors align with
// catalog.external_codes() order.
ShockScenario parse_scenario(const std::filesystem::path& path,
                             const AssetClassCatalog& catalog = AssetClassCatalog::standard());
ShockScenario parse_scenario(std::istream& in, const std::string& source_name,
                             const AssetClassCatalog& catalog = AssetClassCatalog::standard());

}  // namespace contagion
