#include "abmsam/sam.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace abmsam {

namespace {

std::vector<std::string> split_cells(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    // trim blanks around a cell; cells themselves never contain spaces
    auto b = cur.find_first_not_of(' ');
    auto e = cur.find_last_not_of(' ');
    if (b != std::string::npos) out.push_back(cur.substr(b, e - b + 1));
    cur.clear();
  };
  for (char ch : line) {
    if (ch == '\t' || ch == ',') {
      flush();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  flush();
  return out;
}

std::vector<std::string> split_whitespace(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ' ' || ch == '\t' || ch == '\r') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

double parse_number(const std::string& cell, int lineNo, const std::string& what) {
  double v = 0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (!cell.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v))
    throw SamError("line " + std::to_string(lineNo) + ": non-numeric cell '" + cell + "' in " + what);
  return v;
}

long long parse_count(const std::string& value, int lineNo, const std::string& key) {
  const double v = parse_number(value, lineNo, key);
  if (v < 0 || v != std::floor(v))
    throw SamError("line " + std::to_string(lineNo) + ": " + key + " must be a non-negative integer");
  return static_cast<long long>(v);
}

bool sums_match(double declared, double computed) {
  const double scale = std::max({std::abs(declared), std::abs(computed), 1.0});
  return std::abs(declared - computed) <= 1e-9 * scale;
}

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

AccountRole role_from_name(std::string_view name) {
  if (name.empty()) throw SamError("empty account name");
  switch (name.front()) {
    case 'P':
    case 'N':
      return AccountRole::Producer;
    case 'F':
      return AccountRole::Gfcf;
    case 'X':
      return AccountRole::External;
    case 'L':
      return AccountRole::Labor;
    case 'K':
      return AccountRole::Capital;
    case 'T':
      return AccountRole::Tax;
    case 'G':
      return AccountRole::Government;
    case 'H':
      return AccountRole::Household;
    default:
      throw SamError("account '" + std::string(name) + "' has no role prefix (P/N/F/X/L/K/T/G/H)");
  }
}

TaxKind tax_kind_from_name(std::string_view name) {
  auto has = [&](std::string_view s) { return name.find(s) != std::string_view::npos; };
  if (has("SSoc") || has("Social")) return TaxKind::SocialSecurity;
  if (has("TaxProduction")) return TaxKind::Production;
  if (has("TaxProducts") || has("VAT")) return TaxKind::Products;
  if (has("IRPF") || has("Income")) return TaxKind::Income;
  return TaxKind::Other;
}

const char* to_string(AccountRole role) {
  switch (role) {
    case AccountRole::Producer: return "producer";
    case AccountRole::Gfcf: return "gfcf";
    case AccountRole::External: return "external";
    case AccountRole::Labor: return "labor";
    case AccountRole::Capital: return "capital";
    case AccountRole::Tax: return "tax";
    case AccountRole::Government: return "government";
    case AccountRole::Household: return "household";
  }
  return "?";
}

SamTable parse_sam(std::string_view text) {
  std::vector<std::string> lines;
  {
    std::string cur;
    for (char ch : text) {
      if (ch == '\n') {
        lines.push_back(std::move(cur));
        cur.clear();
      } else {
        cur.push_back(ch);
      }
    }
    if (!cur.empty()) lines.push_back(std::move(cur));
    while (!lines.empty() && split_whitespace(lines.back()).empty()) lines.pop_back();
  }
  if (lines.size() < 4) throw SamError("SAM file too short: expected header, metadata, account and colSUM lines");

  SamTable sam;

  // line 1: SAM_table { name
  {
    auto tok = split_whitespace(lines[0]);
    if (tok.size() < 3 || tok[0] != "SAM_table" || tok[1] != "{")
      throw SamError("line 1: malformed header, expected 'SAM_table { <name>'");
    sam.name = tok[2];
  }

  // line 2: [region] key: value ...
  {
    auto tok = split_whitespace(lines[1]);
    std::map<std::string, std::vector<std::string>> kv;
    std::string key;
    for (auto& t : tok) {
      if (t.size() > 1 && t.back() == ':') {
        key = t.substr(0, t.size() - 1);
        if (kv.contains(key)) throw SamError("line 2: duplicate key '" + key + "'");
        kv[key];
      } else if (key.empty()) {
        sam.region += (sam.region.empty() ? "" : " ") + t;
      } else {
        kv[key].push_back(t);
      }
    }
    auto one = [&](const char* k) -> const std::string& {
      auto it = kv.find(k);
      if (it == kv.end() || it->second.size() != 1)
        throw SamError(std::string("line 2: malformed header, missing or bad '") + k + ":'");
      return it->second.front();
    };
    sam.year = static_cast<int>(parse_count(one("Year"), 2, "Year"));
    sam.population = parse_count(one("Population"), 2, "Population");
    sam.activeCount = parse_count(one("Active"), 2, "Active");
    sam.initUnempPct = parse_number(one("InitUnemp"), 2, "InitUnemp");
    sam.nProducers = static_cast<int>(parse_count(one("Nproducers"), 2, "Nproducers"));
    sam.nAccounts = static_cast<int>(parse_count(one("Naccounts"), 2, "Naccounts"));
    auto units = kv.find("Units");
    if (units == kv.end() || units->second.size() != 2)
      throw SamError("line 2: malformed header, 'Units:' needs a scale and a label");
    sam.unitScale = parse_number(units->second[0], 2, "Units");
    sam.unitsLabel = units->second[1];
    if (sam.initUnempPct < 0 || sam.initUnempPct >= 100) throw SamError("line 2: InitUnemp must be in [0, 100)");
    if (sam.nProducers > sam.nAccounts) throw SamError("line 2: Nproducers exceeds Naccounts");
    if (!(sam.unitScale > 0)) throw SamError("line 2: Units scale must be positive");
  }

  const int n = sam.nAccounts;
  if (n <= 0) throw SamError("line 2: Naccounts must be positive");

  // line 3: account names [rowSUM]
  {
    auto names = split_cells(lines[2]);
    if (!names.empty() && names.back() == "rowSUM") names.pop_back();
    if (static_cast<int>(names.size()) != n)
      throw SamError("line 3: dimension mismatch, header lists " + std::to_string(names.size()) +
                     " accounts but Naccounts is " + std::to_string(n));
    std::set<std::string> seen;
    for (auto& nm : names)
      if (!seen.insert(nm).second) throw SamError("line 3: duplicate account name '" + nm + "'");
    sam.accounts = names;
    for (auto& nm : names) sam.roles.push_back(role_from_name(nm));
  }

  if (static_cast<int>(lines.size()) != n + 4)
    throw SamError("dimension mismatch: expected " + std::to_string(n + 4) + " lines for " + std::to_string(n) +
                   " accounts, found " + std::to_string(lines.size()));

  sam.flows.setZero(n, n);
  sam.rowSums.setZero(n);
  sam.colSums.setZero(n);
  for (int i = 0; i < n; ++i) {
    const int lineNo = i + 4;
    auto cells = split_cells(lines[static_cast<std::size_t>(i + 3)]);
    if (static_cast<int>(cells.size()) != n + 2)
      throw SamError("line " + std::to_string(lineNo) + ": dimension mismatch, expected name + " + std::to_string(n) +
                     " cells + rowSUM");
    if (cells[0] != sam.accounts[static_cast<std::size_t>(i)])
      throw SamError("line " + std::to_string(lineNo) + ": row '" + cells[0] + "' does not match header account '" +
                     sam.accounts[static_cast<std::size_t>(i)] + "'");
    double sum = 0;
    for (int j = 0; j < n; ++j) {
      const double v = parse_number(cells[static_cast<std::size_t>(j + 1)], lineNo, "row " + cells[0]);
      if (v < 0 && sam.roles[static_cast<std::size_t>(i)] != AccountRole::Tax)
        throw SamError("line " + std::to_string(lineNo) + ": negative cell in non-tax row " + cells[0]);
      sam.flows(i, j) = v;
      sum += v;
    }
    const double declared = parse_number(cells.back(), lineNo, "rowSUM of " + cells[0]);
    if (!sums_match(declared, sum))
      throw SamError("line " + std::to_string(lineNo) + ": rowSUM of " + cells[0] + " declared " +
                     format_number(declared) + " but cells sum to " + format_number(sum));
    sam.rowSums(i) = declared;
  }
  {
    const int lineNo = n + 4;
    auto cells = split_cells(lines.back());
    if (cells.empty() || cells[0] != "colSUM")
      throw SamError("line " + std::to_string(lineNo) + ": expected colSUM line");
    if (static_cast<int>(cells.size()) != n + 1)
      throw SamError("line " + std::to_string(lineNo) + ": dimension mismatch in colSUM");
    for (int j = 0; j < n; ++j) {
      const double declared = parse_number(cells[static_cast<std::size_t>(j + 1)], lineNo, "colSUM");
      const double sum = sam.flows.col(j).sum();
      if (!sums_match(declared, sum))
        throw SamError("line " + std::to_string(lineNo) + ": colSUM of " + sam.accounts[static_cast<std::size_t>(j)] +
                       " declared " + format_number(declared) + " but cells sum to " + format_number(sum));
      sam.colSums(j) = declared;
    }
  }
  return sam;
}

SamTable read_sam_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SamError("cannot open SAM file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_sam(ss.str());
  } catch (const SamError& e) {
    throw SamError(path + ": " + e.what());
  }
}

std::string write_sam(const SamTable& sam) {
  std::ostringstream out;
  out << "SAM_table { " << sam.name << '\n';
  if (!sam.region.empty()) out << sam.region << '\t';
  out << "Year: " << sam.year << "\tPopulation: " << sam.population << "\tActive: " << sam.activeCount
      << "\tInitUnemp: " << format_number(sam.initUnempPct) << "\tNproducers: " << sam.nProducers
      << "\tNaccounts: " << sam.nAccounts << "\tUnits: " << format_number(sam.unitScale) << ' ' << sam.unitsLabel
      << '\n';
  for (const auto& a : sam.accounts) out << '\t' << a;
  out << "\trowSUM\n";
  for (int i = 0; i < sam.nAccounts; ++i) {
    out << sam.accounts[static_cast<std::size_t>(i)];
    for (int j = 0; j < sam.nAccounts; ++j) out << '\t' << format_number(sam.flows(i, j));
    out << '\t' << format_number(sam.rowSums(i)) << '\n';
  }
  out << "colSUM";
  for (int j = 0; j < sam.nAccounts; ++j) out << '\t' << format_number(sam.colSums(j));
  out << '\n';
  return out.str();
}

ScalePlan scale_factors(const SamTable& sam, long long nSimAgents) {
  if (nSimAgents <= 0) throw std::invalid_argument("nSimAgents must be positive");
  if (sam.activeCount <= 0) throw SamError("SAM header Active must be positive for scaling");
  ScalePlan p;
  p.nSimAgents = nSimAgents;
  p.agentScale = static_cast<double>(sam.activeCount) / static_cast<double>(nSimAgents);
  p.samUnitInCurrency = sam.unitScale;
  // One model unit is one SAM unit shared by agentScale real individuals, so a
  // simulated monthly flow carries the same number as the real SAM flow / 12.
  p.modelUnitInCurrency = sam.unitScale / p.agentScale;
  p.employedSim = static_cast<double>(nSimAgents) * (1.0 - sam.initUnempPct / 100.0);
  if (auto l = sam.first_with_role(AccountRole::Labor); l && p.employedSim > 0)
    p.monthlyWage = p.to_model_units(sam.rowSums(*l) / 12.0) / p.employedSim;
  return p;
}

}  // namespace abmsam
