#pragma once

#include "abmsam/agents.hpp"
#include "abmsam/config.hpp"
#include "abmsam/ledger.hpp"
#include "abmsam/rng.hpp"
#include "abmsam/rules.hpp"
#include "abmsam/sam.hpp"
#include "abmsam/spatial.hpp"

#include <cstdint>
#include <vector>

namespace abmsam {

/// SAM account indices by role.
struct AccountMap {
  std::vector<int> sector;           // producing sector k -> account
  std::vector<int> sectorOfAccount;  // account -> sector, or -1
  std::vector<int> tax;              // tax slot -> account (coefficient order)
  int gfcf = -1;
  int external = -1;
  int labor = -1;
  int capital = -1;
  int government = -1;
  int households = -1;
  int productsTax = -1;
  int socialSecurityTax = -1;
  int incomeTax = -1;
};

AccountMap map_accounts(const SamTable& sam);

struct TimeSeriesRow {
  int month = 0;
  double unemploymentPct = 0;
  std::vector<int> employees;  // per producing sector
  double hhCons = 0;
  double govCons = 0;
  double extCons = 0;
  double icTotal = 0;
  double invGoods = 0;
  double invInputs = 0;
  double hhWealth = 0;
  // diagnostics
  int firms = 0;
  int banks = 0;
  double beta = 1;
  double meanAsk = 1;
};

/// Complete simulation state. The members in the "derived" block are pure
/// functions of (sam, cfg) and are rebuilt on load.
struct World {
  SamTable sam;
  SimConfig cfg;

  // derived
  MonthlyTargets targets;
  TechnicalCoefficients coeffs;
  GfcfWeights gfcf;
  ScalePlan scale;
  HouseholdTaxRates taxRates;
  AccountMap acct;
  Money wage;
  double hhGoodsTarget = 0;      // monthly household purchases over producer + GFCF rows
  Eigen::VectorXd govTarget;     // monthly per account row (producer + GFCF rows only)
  Eigen::VectorXd extTarget;
  Money subsidyBudget;
  Money externalTransfer;
  Eigen::VectorXd minFirmValue;  // output value of a one-worker firm, per sector

  // state
  int month = 0;  // months completed
  int day = 0;
  bool deploying = true;
  double beta = 1.0;
  std::vector<Household> households;
  std::vector<Firm> firms;  // index == id; closed firms stay with alive == false
  std::vector<Bank> banks;
  Government gov;
  CentralBank cb;
  ExternalSector ext;
  RngStreams rng;
  Ledger ledger;
  UnmetGrid unmet;
  std::vector<TimeSeriesRow> history;
  std::vector<std::int64_t> auditResidual;  // per completed month, ticks

  // spatial scratch, rebuilt each month
  SpatialIndex firmIndex;
  SpatialIndex householdIndex;
  std::vector<Location> firmLocs;
  std::vector<Location> householdLocs;

  [[nodiscard]] int n_sectors() const { return static_cast<int>(acct.sector.size()); }
};

/// Recomputes the derived block and the spatial indices from sam, cfg and state.
void derive(World& w);

double household_wealth(const World& w, const Household& h);
std::array<std::int64_t, kHolderClasses> class_balances(const World& w);

}  // namespace abmsam
