#pragma once

// Per-agent decision rules. Everything here is a pure function of its
// arguments (plus an explicit rng where a draw is involved).

#include "abmsam/agents.hpp"
#include "abmsam/sam.hpp"

#include <optional>
#include <random>
#include <span>
#include <vector>

namespace abmsam {

/// Buffer-stock consumption rule: factor * max(0, I + kappa * (W - phi * I)).
double consumption_budget(double income, double wealth, double kappa, double phi, double budgetFactor);

struct PortfolioSplit {
  double depositDelta = 0;
  double equityBudget = 0;
};

/// Non-positive surplus is drawn from deposits in full; shares are never sold to cover it.
PortfolioSplit portfolio_split(double surplus, double depositFraction);

/// Target stock is (1 + stockBuffer) times mean demand over the last
/// windowMonths; a firm without history produces seedOutput.
double plan_production(const Firm& firm, int windowMonths, double stockBuffer, double seedOutput);

enum class ProductionMode { Leontief, CobbDouglas };

struct Requirements {
  Eigen::VectorXd icValue;  // per input sector, money
  Eigen::VectorXd icUnits;  // per input sector, at unit input prices
  double importValue = 0;
  double laborBudget = 0;
  int laborHeadcount = 0;
  double capitalBudget = 0;
  double laborExponent = 0;  // Cobb-Douglas alpha; 0 in Leontief mode
  Eigen::VectorXd taxBySlot;
  double taxProvision = 0;
  double totalCost = 0;
  double fundingNeed = 0;
};

/// Inputs needed to produce `output` units of `sector` priced at `unitValue`.
/// Funding need is the part of total cost not covered by `available`.
Requirements input_requirements(Eigen::Index sector, double output, const TechnicalCoefficients& coeffs,
                                double wage, ProductionMode mode, double unitValue = 1.0, double available = 0.0);

/// Returns the sector with the most unmet demand around the household (lowest
/// index on ties) with probability pOpen; none when the household already
/// owns a firm or nothing is unmet.
std::optional<int> firm_entry_decision(bool ownsFirm, std::span<const double> localUnmetDemand, double pOpen,
                                       std::mt19937_64& rng);

bool firm_exit_check(std::span<const double> profitHistory, double netWorth, int lossMonths, double minNetWorth);
inline bool firm_exit_check(const Firm& f, int lossMonths, double minNetWorth) {
  return firm_exit_check(f.profitHistory, f.net_worth(), lossMonths, minNetWorth);
}

bool bank_founding_check(double householdWealth, const CentralBank& cb, int currentBanks);

/// Latching: a listed firm stays listed.
bool stockmarket_entry_check(double netWorth, double threshold, bool alreadyListed = false);

struct ProfitDistribution {
  std::vector<double> dividends;  // aligned with the holdings passed in
  double retained = 0;
};

/// `holdings` are share quantities per holder; an unlisted firm passes a
/// single owner entry.
ProfitDistribution distribute_profits(double profit, double dividendFraction, std::span<const double> holdings);

/// Flat household-side rates read off the SAM.
struct HouseholdTaxRates {
  double employeeSocialSecurity = 0;  // on wages
  double income = 0;                  // on wage + capital income
  double householdProducts = 0;       // on household goods + GFCF purchases
  double governmentProducts = 0;
  double externalProducts = 0;
};

HouseholdTaxRates household_tax_rates(const SamTable& sam);

}  // namespace abmsam
