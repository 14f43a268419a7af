#pragma once

#include "abmsam/rules.hpp"

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace abmsam {

struct SimConfig {
  int nSimAgents = 2000;
  int daysPerMonth = 30;
  int deploymentMonths = 360;
  int totalMonths = 480;
  std::uint64_t seed = 7;

  // households
  double kappa = 0.01;
  double phi = 6.0;
  int incomeWindow = 12;
  double depositFraction = 0.8;
  double initialCashMonths = 3.0;

  // prices and matching
  double epsilon = 0.01;
  double equityEpsilon = 0.01;
  double gamma = 10.0;
  int maxTrials = 5;
  int maxCandidates = 10;
  int publicRounds = 10;  // government and external shopping rounds per day and row
  double radius = 0.1;
  int radiusExpansions = 2;

  // firms
  double pOpen = 0.01;
  int lossMonths = 6;
  double exitMinNetWorth = 0.0;
  double dividendFraction = 0.9;
  double cashBufferMonths = 0.5;
  int demandWindow = 3;
  double stockBuffer = 0.5;
  double startupCash = 50.0;
  ProductionMode productionMode = ProductionMode::Leontief;

  // credit
  double car = 0.08;
  double rrr = 0.02;
  double r0 = 0.002;
  double spread = 0.01;
  int loanTerm = 12;
  bool cbLending = true;
  double bankMinNetWorth = 1000.0;
  int maxBanks = 3;
  double bankCapitalFraction = 0.5;

  // stock market
  double listingThreshold = 2000.0;
  double initialShares = 1000.0;

  // deployment controller
  double betaDamping = 0.1;
  double betaMin = 0.5;
  double betaMax = 2.0;

  // reports
  int wealthBins = 20;
};

using ParamSlot = std::variant<int SimConfig::*, double SimConfig::*, std::uint64_t SimConfig::*, bool SimConfig::*,
                               ProductionMode SimConfig::*>;

struct ParamInfo {
  const char* key;
  ParamSlot slot;
  const char* help;
};

const std::vector<ParamInfo>& parameter_table();

/// Sets one parameter from text. Throws std::invalid_argument on an unknown
/// key or a malformed value.
void set_parameter(SimConfig& cfg, const std::string& key, const std::string& value);
std::string get_parameter(const SimConfig& cfg, const ParamInfo& p);

/// Flat `key = value` text; `#` starts a comment.
void apply_config_text(SimConfig& cfg, const std::string& text);
SimConfig load_config_file(const std::string& path, SimConfig base = {});

/// Throws std::invalid_argument naming the first inconsistent parameter.
void validate_config(const SimConfig& cfg);

/// `key = value` lines for every parameter, in table order.
std::string config_to_text(const SimConfig& cfg);
/// Defaults listing for --help.
std::string config_help();

}  // namespace abmsam
