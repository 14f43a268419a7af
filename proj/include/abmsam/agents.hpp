#pragma once

// Agent records. Decision rules live in rules.hpp; all mutation goes through
// the engine's step loop.

#include "abmsam/money.hpp"

#include <Eigen/Dense>

#include <vector>

namespace abmsam {

inline constexpr int kNone = -1;
/// Lender id used for loans granted by the central bank.
inline constexpr int kCentralBankLender = -2;

struct Location {
  double x = 0;
  double y = 0;
};

struct ShareHolding {
  int firm = kNone;
  double quantity = 0;
};

/// One shareholder entry in a firm's register.
struct Holding {
  int household = kNone;
  double quantity = 0;
};

struct Household {
  int id = 0;
  Location loc;
  int buyDay = 1;
  int employer = kNone;
  Money wageMonthly;
  Money cash;
  Money deposits;
  int bank = kNone;
  std::vector<ShareHolding> shares;
  std::vector<double> buyerPrice;   // reservation price per sector
  double equityReservation = 1.0;   // limit multiplier on the quoted share price
  std::vector<double> incomeHistory;  // trailing disposable income, oldest first
  double incomeAvg = 0;
  double consumptionBudget = 0;     // last C_h,t
  Money equityBudget;
  int ownedFirm = kNone;
  int ownedBank = kNone;

  // month accumulators
  Money incomeMonth;
  Money spentMonth;
};

struct Loan {
  int lender = kCentralBankLender;  // bank id or kCentralBankLender
  Money principal;
  Money original;
  double monthlyRate = 0;
  int monthsLeft = 0;
  int grantedMonth = 0;
};

struct Firm {
  int id = 0;
  int owner = kNone;
  int sector = 0;  // index into the producing sectors
  Location loc;
  int productionDay = 1;
  double askPrice = 1.0;
  double goodsInventory = 0;
  double inventoryValue = 0;  // at production cost
  std::vector<double> inputInventory;
  std::vector<double> inputBuyerPrice;
  std::vector<int> employees;  // household ids; owner first
  Money paymentAccount;
  int bank = kNone;
  std::vector<Loan> loans;
  bool listed = false;
  double sharesOutstanding = 0;
  double sharePrice = 0;
  double shareAsk = 0;
  std::vector<Holding> shareholders;
  std::vector<double> demandHistory;  // estimated monthly demand, oldest first
  std::vector<double> profitHistory;
  double seedOutput = 0;
  double costAvg = 0;  // smoothed monthly operating cost
  int idleMonths = 0;
  int foundedMonth = 0;
  bool alive = true;
  long soldOutDay = -1;  // last day the ask was raised for lack of stock

  // month accumulators
  bool produced = false;
  std::vector<double> taxDue;  // per tax slot, payable at month end
  double salesUnits = 0;
  double stockoutUnits = 0;
  double outputUnits = 0;
  Money revenue;
  Money icCost;
  Money importCost;
  Money wageCost;
  Money taxCost;
  Money interestCost;
  double cogs = 0;  // production cost of the goods sold
  Money fundingGap;
  double outputValue = 0;
  Money grossSurplus;
  Money profit;  // revenue - cogs - interest

  [[nodiscard]] Money debt() const {
    Money d;
    for (const auto& l : loans) d += l.principal;
    return d;
  }
  [[nodiscard]] double inputInventoryUnits() const {
    double s = 0;
    for (double v : inputInventory) s += v;
    return s;
  }
  /// Payment account + inventories at cost - outstanding principal.
  [[nodiscard]] double net_worth() const {
    return paymentAccount.units() + inventoryValue + inputInventoryUnits() - debt().units();
  }
};

struct Bank {
  int id = 0;
  int owner = kNone;
  Money reserves;
  Money deposits;  // total household deposits held
  Money loanBook;  // outstanding principal
  Money cbDebt;    // central bank advances covering withdrawals
  Money incomeMonth;
  Money lossesMonth;

  [[nodiscard]] Money equity() const { return reserves + loanBook - deposits - cbDebt; }
};

struct Government {
  Money balance;  // at the central bank; negative = accumulated deficit
  Eigen::VectorXd purchaseTarget;   // monthly per account row (model units)
  Money subsidyBudget;              // monthly transfer to unemployed households
  std::vector<double> buyerPrice;   // per sector
  Eigen::VectorXd carry;            // unspent intra-month budget per account row
  Eigen::VectorXd taxReceiptsMonth; // per tax slot
  Money consumptionMonth;
  Money undisbursedSubsidies;
};

struct CentralBank {
  Money balance;  // negative = net money issued
  double policyRate = 0;
  double bankMinNetWorth = 0;
  int maxBanks = 0;
  Money firmLoans;     // outstanding principal to firms
  Money bankAdvances;  // outstanding advances to banks
};

struct ExternalSector {
  Eigen::VectorXd purchaseTarget;  // monthly per account row (model units)
  Money householdTransfer;         // monthly, split over all households
  double importPrice = 1.0;
  std::vector<double> buyerPrice;
  Eigen::VectorXd carry;
  Money netFlow;  // cumulative net injection into the domestic economy (its balance is -netFlow)
  Money consumptionMonth;
};

}  // namespace abmsam
