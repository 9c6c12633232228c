#include "contagion/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "contagion/detail/format.hpp"
#include "contagion/errors.hpp"
#include "contagion/log.hpp"

namespace contagion {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

double parse_double(const std::string& field, const std::string& source, int line, int col) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc{} || res.ptr != end)
    throw ParseError(source, line, col, "expected a number, got '" + field + "'");
  if (!std::isfinite(value))
    throw ParseError(source, line, col, "non-finite number '" + field + "'");
  return value;
}

int parse_asset_code(const std::string& field, const std::string& source, int line, int col) {
  int code = 0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto res = std::from_chars(begin, end, code);
  if (res.ec != std::errc{} || res.ptr != end)
    throw ParseError(source, line, col, "expected an asset-class code, got '" + field + "'");
  return code;
}

}  // namespace

void BankRecord::validate() const {
  if (bank_id.empty()) throw ValidationError("bank record with empty bank_id");
  if (!(total_assets > 0.0))
    throw ValidationError("bank " + bank_id + ": total_assets must be positive");
  if (!(equity > 0.0)) throw ValidationError("bank " + bank_id + ": equity must be positive");
  if (!(interbank >= 0.0))
    throw ValidationError("bank " + bank_id + ": interbank exposure (class 2100) is negative");
  double external_sum = 0.0;
  for (const auto& [code, value] : external) {
    if (!(value >= 0.0) || !std::isfinite(value))
      throw ValidationError("bank " + bank_id + ": exposure in class " + std::to_string(code) +
                            " must be a nonnegative number");
    external_sum += value;
  }
  if (interbank + external_sum > total_assets * (1.0 + 1e-6))
    log::warn("bank " + bank_id + ": listed exposures exceed total assets (" +
              detail::format_double(interbank + external_sum) + " > " +
              detail::format_double(total_assets) + ")");
}

const AssetClassCatalog& AssetClassCatalog::standard() {
  static const AssetClassCatalog catalog{
      {{1100, "Central banks and central governments"},
       {1200, "Regional governments or local authorities"},
       {1300, "Public sector entities"},
       {1400, "Multilateral Development Banks"},
       {1500, "International Organisations"},
       {1700, "General governments"},
       {2100, "Credit institutions"},
       {2200, "Other financial corporations"},
       {3000, "Corporates"},
       {4110, "Retail - Secured by real estate property - SME"},
       {4120, "Retail - Secured by real estate property - Non SME"},
       {4200, "Retail - Qualifying Revolving"},
       {4310, "Retail - Other - SME"},
       {4320, "Retail - Other - Non SME"},
       {4500, "Retail - SME"},
       {4700, "Households"},
       {5000, "Secured by mortgages on immovable property"},
       {6400, "Items associated with particularly high risk"},
       {6500, "Covered bonds"},
       {6600, "Claims on institutions and corporates with a ST credit assessment"},
       {6700, "Collective investments undertakings (CIU)"}},
      2100};
  return catalog;
}

std::vector<int> AssetClassCatalog::external_codes() const {
  std::vector<int> codes;
  for (const auto& e : entries)
    if (e.code != interbank_code) codes.push_back(e.code);
  return codes;
}

bool AssetClassCatalog::contains(int code) const {
  return std::any_of(entries.begin(), entries.end(),
                     [code](const Entry& e) { return e.code == code; });
}

void AssetClassCatalog::validate() const {
  std::set<int> seen;
  for (const auto& e : entries)
    if (!seen.insert(e.code).second)
      throw ValidationError("asset class catalog repeats code " + std::to_string(e.code));
  if (!contains(interbank_code))
    throw ValidationError("asset class catalog is missing the interbank code");
}

std::string banks_csv_header() {
  const auto& catalog = AssetClassCatalog::standard();
  std::string header = "bank_id,country,total_assets,equity,c2100";
  for (int code : catalog.external_codes()) header += ",c" + std::to_string(code);
  return header;
}

std::vector<BankRecord> parse_banks(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_banks(in, path.filename().string());
}

std::vector<BankRecord> parse_banks(std::istream& in, const std::string& source_name) {
  const auto& catalog = AssetClassCatalog::standard();
  std::string line;
  if (!std::getline(in, line)) throw ParseError(source_name, 1, 1, "missing header line");

  const std::vector<std::string> header = split_csv(line);
  const std::vector<std::string> fixed = {"bank_id", "country", "total_assets", "equity"};
  if (header.size() < fixed.size())
    throw ParseError(source_name, 1, 1, "header must start with bank_id,country,total_assets,equity");
  for (std::size_t i = 0; i < fixed.size(); ++i)
    if (header[i] != fixed[i])
      throw ParseError(source_name, 1, static_cast<int>(i + 1),
                       "expected header column '" + fixed[i] + "', got '" + header[i] + "'");

  std::vector<int> column_codes;  // per code column, in file order
  std::set<int> seen_codes;
  for (std::size_t i = fixed.size(); i < header.size(); ++i) {
    const int col = static_cast<int>(i + 1);
    const std::string& name = header[i];
    if (name.size() < 2 || name[0] != 'c')
      throw ParseError(source_name, 1, col, "asset columns must be named c<code>, got '" + name + "'");
    const int code = parse_asset_code(name.substr(1), source_name, 1, col);
    if (!catalog.contains(code))
      throw ParseError(source_name, 1, col, "unknown asset class code " + std::to_string(code));
    if (!seen_codes.insert(code).second)
      throw ParseError(source_name, 1, col, "duplicate asset class column c" + std::to_string(code));
    column_codes.push_back(code);
  }
  std::vector<int> missing;
  for (const auto& e : catalog.entries)
    if (!seen_codes.count(e.code)) missing.push_back(e.code);
  if (!missing.empty()) {
    std::string joined;
    for (int code : missing) joined += (joined.empty() ? "" : ", ") + std::to_string(code);
    log::warn(source_name + ": missing asset class columns treated as zero: " + joined);
  }

  std::vector<BankRecord> records;
  std::set<std::string> ids;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_csv(line);
    if (fields.size() != header.size())
      throw ParseError(source_name, line_no, 1,
                       "expected " + std::to_string(header.size()) + " fields, got " +
                           std::to_string(fields.size()));
    BankRecord rec;
    rec.bank_id = fields[0];
    rec.country = fields[1];
    if (rec.bank_id.empty()) throw ParseError(source_name, line_no, 1, "empty bank_id");
    if (rec.country.size() != 2)
      log::warn(source_name + ":" + std::to_string(line_no) + ": country '" + rec.country +
                "' is not an ISO-2 code");
    rec.total_assets = parse_double(fields[2], source_name, line_no, 3);
    rec.equity = parse_double(fields[3], source_name, line_no, 4);
    for (int code : catalog.external_codes()) rec.external[code] = 0.0;
    for (std::size_t k = 0; k < column_codes.size(); ++k) {
      const double value =
          parse_double(fields[4 + k], source_name, line_no, static_cast<int>(5 + k));
      if (column_codes[k] == catalog.interbank_code)
        rec.interbank = value;
      else
        rec.external[column_codes[k]] = value;
    }
    if (!ids.insert(rec.bank_id).second)
      throw ValidationError(source_name + ": duplicate bank_id '" + rec.bank_id + "'");
    rec.validate();
    records.push_back(std::move(rec));
  }
  if (records.empty()) throw ValidationError(source_name + ": no bank rows");
  return records;
}

void write_banks(const std::filesystem::path& path, const std::vector<BankRecord>& records) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  const auto& catalog = AssetClassCatalog::standard();
  out << banks_csv_header() << "\n";
  for (const auto& rec : records) {
    out << rec.bank_id << "," << rec.country << "," << detail::format_double(rec.total_assets)
        << "," << detail::format_double(rec.equity) << "," << detail::format_double(rec.interbank);
    for (int code : catalog.external_codes())
      out << "," << detail::format_double(rec.external.count(code) ? rec.external.at(code) : 0.0);
    out << "\n";
  }
  if (!out) throw IoError("failed while writing " + path.string());
}

PortfolioMatrix build_portfolio(const std::vector<BankRecord>& records,
                                const AssetClassCatalog& catalog) {
  catalog.validate();
  const std::vector<int> codes = catalog.external_codes();
  PortfolioMatrix port;
  port.d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(records.size()),
                                 static_cast<Eigen::Index>(codes.size()));
  port.p = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(codes.size()));
  for (std::size_t i = 0; i < records.size(); ++i)
    for (std::size_t k = 0; k < codes.size(); ++k) {
      const auto it = records[i].external.find(codes[k]);
      if (it != records[i].external.end())
        port.d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = it->second;
    }
  if (port.d.sum() == 0.0) log::warn("all external exposures are zero");
  port.validate();
  return port;
}

Marginals derive_marginals(const std::vector<BankRecord>& records) {
  Marginals m;
  m.assets.resize(static_cast<Eigen::Index>(records.size()));
  for (std::size_t i = 0; i < records.size(); ++i)
    m.assets(static_cast<Eigen::Index>(i)) = records[i].interbank;
  m.liabilities = m.assets;
  m.validate();
  return m;
}

Eigen::VectorXd derive_liability_ratios(const std::vector<BankRecord>& records) {
  Eigen::VectorXd l_ext(static_cast<Eigen::Index>(records.size()));
  for (std::size_t i = 0; i < records.size(); ++i) {
    const BankRecord& rec = records[i];
    const double ratio = (rec.total_assets - rec.equity - rec.interbank) / rec.total_assets;
    if (ratio < 0.0)
      throw ValidationError("bank " + rec.bank_id +
                            ": equity plus interbank assets exceed total assets");
    if (ratio >= 1.0)
      throw ValidationError("bank " + rec.bank_id + ": external liability ratio must be below 1");
    l_ext(static_cast<Eigen::Index>(i)) = ratio;
  }
  return l_ext;
}

Eigen::VectorXd reported_equity(const std::vector<BankRecord>& records) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(records.size()));
  for (std::size_t i = 0; i < records.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = records[i].equity;
  return v;
}

Eigen::VectorXd total_asset_values(const std::vector<BankRecord>& records) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(records.size()));
  for (std::size_t i = 0; i < records.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = records[i].total_assets;
  return v;
}

ShockScenario parse_scenario(const std::filesystem::path& path, const AssetClassCatalog& catalog) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_scenario(in, path.filename().string(), catalog);
}

ShockScenario parse_scenario(std::istream& in, const std::string& source_name,
                             const AssetClassCatalog& catalog) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(source_name, 1, 1, "missing header line");
  const std::vector<std::string> header = split_csv(line);
  if (header.size() != 2 || header[0] != "asset_code" || header[1] != "factor")
    throw ParseError(source_name, 1, 1, "header must be asset_code,factor");

  const std::vector<int> codes = catalog.external_codes();
  std::map<int, double> factors;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_csv(line);
    if (fields.size() != 2)
      throw ParseError(source_name, line_no, 1, "expected asset_code,factor");
    const int code = parse_asset_code(fields[0], source_name, line_no, 1);
    if (code == catalog.interbank_code)
      throw ParseError(source_name, line_no, 1,
                       "class 2100 is the interbank class and cannot be repriced");
    if (std::find(codes.begin(), codes.end(), code) == codes.end())
      throw ParseError(source_name, line_no, 1, "unknown asset class code " + std::to_string(code));
    if (factors.count(code))
      throw ParseError(source_name, line_no, 1, "duplicate factor for class " + std::to_string(code));
    const double f = parse_double(fields[1], source_name, line_no, 2);
    if (f < 0.0)
      throw ValidationError(source_name + ":" + std::to_string(line_no) +
                            ": price factor must be nonnegative");
    factors[code] = f;
  }
  if (factors.size() < codes.size())
    log::warn(source_name + ": " + std::to_string(codes.size() - factors.size()) +
              " asset classes not listed; factor 1 assumed");

  ShockScenario shock;
  shock.factors.resize(static_cast<Eigen::Index>(codes.size()));
  for (std::size_t k = 0; k < codes.size(); ++k) {
    const auto it = factors.find(codes[k]);
    shock.factors(static_cast<Eigen::Index>(k)) = it == factors.end() ? 1.0 : it->second;
  }
  shock.validate();
  return shock;
}

}  // namespace contagion
