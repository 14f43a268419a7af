#include "abmsam/config.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace abmsam {

const std::vector<ParamInfo>& parameter_table() {
  static const std::vector<ParamInfo> table = {
      {"agents", &SimConfig::nSimAgents, "simulated active individuals"},
      {"days_per_month", &SimConfig::daysPerMonth, "calendar days per month"},
      {"deploy_months", &SimConfig::deploymentMonths, "months of deployment before the budget factor locks"},
      {"months", &SimConfig::totalMonths, "total months simulated"},
      {"seed", &SimConfig::seed, "master seed"},
      {"kappa", &SimConfig::kappa, "buffer-stock sensitivity"},
      {"phi", &SimConfig::phi, "buffer size in months of income"},
      {"income_window", &SimConfig::incomeWindow, "months in the trailing income average"},
      {"deposit_fraction", &SimConfig::depositFraction, "share of household surplus deposited"},
      {"initial_cash_months", &SimConfig::initialCashMonths, "initial household cash in months of SAM outlays"},
      {"epsilon", &SimConfig::epsilon, "goods price step"},
      {"equity_epsilon", &SimConfig::equityEpsilon, "share price step"},
      {"gamma", &SimConfig::gamma, "logit price sensitivity"},
      {"max_trials", &SimConfig::maxTrials, "purchase attempts per shopping round"},
      {"max_candidates", &SimConfig::maxCandidates, "sellers considered per shopping round"},
      {"public_rounds", &SimConfig::publicRounds, "government/external shopping rounds per day and SAM row"},
      {"radius", &SimConfig::radius, "neighborhood radius on the unit torus"},
      {"radius_expansions", &SimConfig::radiusExpansions, "radius doublings when nobody is found"},
      {"p_open", &SimConfig::pOpen, "monthly probability of opening a firm"},
      {"loss_months", &SimConfig::lossMonths, "consecutive losses before exit"},
      {"exit_min_net_worth", &SimConfig::exitMinNetWorth, "net worth below which a losing firm exits"},
      {"dividend_fraction", &SimConfig::dividendFraction, "share of profit paid as dividends"},
      {"cash_buffer_months", &SimConfig::cashBufferMonths, "months of costs a firm keeps before paying out excess cash"},
      {"demand_window", &SimConfig::demandWindow, "months in the demand estimate"},
      {"stock_buffer", &SimConfig::stockBuffer, "target inventory above mean demand"},
      {"startup_cash", &SimConfig::startupCash, "founder cash put into a new firm"},
      {"production", &SimConfig::productionMode, "leontief or cobb-douglas"},
      {"car", &SimConfig::car, "bank capital adequacy requirement"},
      {"rrr", &SimConfig::rrr, "bank reserve requirement ratio"},
      {"r0", &SimConfig::r0, "monthly policy rate"},
      {"spread", &SimConfig::spread, "monthly risk spread at PD = 1"},
      {"loan_term", &SimConfig::loanTerm, "loan term in months"},
      {"cb_lending", &SimConfig::cbLending, "central bank lends when no bank exists or a bank refuses"},
      {"bank_min_net_worth", &SimConfig::bankMinNetWorth, "wealth needed to found a bank"},
      {"max_banks", &SimConfig::maxBanks, "maximum number of banks"},
      {"bank_capital_fraction", &SimConfig::bankCapitalFraction, "share of founder wealth paid in as bank capital"},
      {"listing_threshold", &SimConfig::listingThreshold, "firm net worth needed to list"},
      {"initial_shares", &SimConfig::initialShares, "shares created at listing"},
      {"beta_damping", &SimConfig::betaDamping, "maximum monthly relative change of the budget factor"},
      {"beta_min", &SimConfig::betaMin, "lower bound of the budget factor"},
      {"beta_max", &SimConfig::betaMax, "upper bound of the budget factor"},
      {"wealth_bins", &SimConfig::wealthBins, "bins in the wealth histogram"},
  };
  return table;
}

namespace {

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T v{};
  const char* b = text.data();
  const char* e = b + text.size();
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e) throw std::invalid_argument("bad value for " + key + ": '" + text + "'");
  return v;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

const ParamInfo& find(const std::string& key) {
  for (const auto& p : parameter_table())
    if (key == p.key) return p;
  throw std::invalid_argument("unknown parameter: " + key);
}

}  // namespace

void set_parameter(SimConfig& cfg, const std::string& key, const std::string& value) {
  const auto& p = find(key);
  std::visit(
      [&](auto member) {
        using T = std::remove_reference_t<decltype(cfg.*member)>;
        if constexpr (std::is_same_v<T, bool>) {
          if (value == "true" || value == "1") cfg.*member = true;
          else if (value == "false" || value == "0") cfg.*member = false;
          else throw std::invalid_argument("bad value for " + key + ": '" + value + "'");
        } else if constexpr (std::is_same_v<T, ProductionMode>) {
          if (value == "leontief") cfg.*member = ProductionMode::Leontief;
          else if (value == "cobb-douglas") cfg.*member = ProductionMode::CobbDouglas;
          else throw std::invalid_argument("bad value for " + key + ": '" + value + "'");
        } else {
          cfg.*member = parse_number<T>(key, value);
        }
      },
      p.slot);
}

std::string get_parameter(const SimConfig& cfg, const ParamInfo& p) {
  return std::visit(
      [&](auto member) -> std::string {
        using T = std::remove_cvref_t<decltype(cfg.*member)>;
        const auto v = cfg.*member;
        if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else if constexpr (std::is_same_v<T, ProductionMode>) {
          return v == ProductionMode::Leontief ? "leontief" : "cobb-douglas";
        } else {
          char buf[64];
          auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
          return std::string(buf, end);
        }
      },
      p.slot);
}

void apply_config_text(SimConfig& cfg, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineNo) + ": expected key = value");
    set_parameter(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

SimConfig load_config_file(const std::string& path, SimConfig base) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  apply_config_text(base, ss.str());
  return base;
}

void validate_config(const SimConfig& c) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("invalid config: ") + what);
  };
  require(c.nSimAgents > 0, "agents must be positive");
  require(c.daysPerMonth >= 1, "days_per_month must be >= 1");
  require(c.deploymentMonths >= 0 && c.totalMonths >= 0, "months must be non-negative");
  require(c.kappa > 0 && c.kappa <= 1, "kappa must be in (0, 1]");
  require(c.phi > 0, "phi must be positive");
  require(c.incomeWindow >= 1, "income_window must be >= 1");
  require(c.depositFraction >= 0 && c.depositFraction <= 1, "deposit_fraction must be in [0, 1]");
  require(c.epsilon > 0 && c.epsilon < 0.1, "epsilon must be in (0, 0.1)");
  require(c.equityEpsilon > 0 && c.equityEpsilon < 0.1, "equity_epsilon must be in (0, 0.1)");
  require(c.gamma >= 0, "gamma must be non-negative");
  require(c.maxTrials >= 1 && c.maxCandidates >= 1, "max_trials and max_candidates must be >= 1");
  require(c.publicRounds >= 1, "public_rounds must be >= 1");
  require(c.radius > 0 && c.radius <= 0.5, "radius must be in (0, 0.5]");
  require(c.radiusExpansions >= 0, "radius_expansions must be >= 0");
  require(c.pOpen >= 0 && c.pOpen <= 1, "p_open must be a probability");
  require(c.lossMonths >= 1, "loss_months must be >= 1");
  require(c.dividendFraction >= 0 && c.dividendFraction <= 1, "dividend_fraction must be in [0, 1]");
  require(c.demandWindow >= 1, "demand_window must be >= 1");
  require(c.stockBuffer >= 0, "stock_buffer must be non-negative");
  require(c.car >= 0 && c.rrr >= 0, "car and rrr must be non-negative");
  require(c.loanTerm >= 1, "loan_term must be >= 1");
  require(c.maxBanks >= 0, "max_banks must be non-negative");
  require(c.bankCapitalFraction > 0 && c.bankCapitalFraction <= 1, "bank_capital_fraction must be in (0, 1]");
  require(c.initialShares > 0, "initial_shares must be positive");
  require(c.betaDamping > 0 && c.betaDamping < 1, "beta_damping must be in (0, 1)");
  require(c.betaMin > 0 && c.betaMin <= 1 && c.betaMax >= 1, "beta bounds must bracket 1");
  require(c.wealthBins >= 2, "wealth_bins must be >= 2");
}

std::string config_to_text(const SimConfig& cfg) {
  std::ostringstream os;
  for (const auto& p : parameter_table()) os << p.key << " = " << get_parameter(cfg, p) << '\n';
  return os.str();
}

std::string config_help() {
  const SimConfig defaults;
  std::ostringstream os;
  os << "Parameters (config file keys, defaults in brackets):\n";
  for (const auto& p : parameter_table())
    os << "  " << std::left << std::setw(22) << p.key << p.help << " [" << get_parameter(defaults, p) << "]\n";
  return os.str();
}

}  // namespace abmsam
