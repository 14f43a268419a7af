#pragma once

// Matching and price formation: bilateral goods trade, logit seller choice,
// neighborhood shopping, labor matching, bank credit and the end-of-month
// equity clearing house.

#include "abmsam/money.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace abmsam {

struct PriceUpdate {
  bool traded = false;
  double buyerPrice = 0;
  double sellerPrice = 0;
};

/// Trade happens iff buyerPrice >= sellerPrice; the side that got its way
/// concedes by epsilon, the other side presses by epsilon.
PriceUpdate attempt_transaction(double buyerPrice, double sellerPrice, double epsilon);

std::vector<double> logit_probabilities(std::span<const double> prices, double gamma);
/// Inverse-CDF draw from logit_probabilities. Throws on an empty list.
std::size_t select_seller_logit(std::span<const double> prices, double gamma, std::mt19937_64& rng);

/// A seller quote as seen by one shopping round; ask and stock are updated in place.
struct Offer {
  int id = 0;
  double ask = 1.0;
  double stock = 0;
  double stockoutUnits = 0;  // demand this buyer could not get from this seller
};

struct Purchase {
  std::size_t offer = 0;
  double quantity = 0;
  double price = 0;
  Money cost;
};

struct ShoppingResult {
  std::vector<Purchase> purchases;
  Money spent;
  Money unmet;
  int trials = 0;
};

struct ShoppingParams {
  double epsilon = 0.01;
  double gamma = 10.0;
  int maxTrials = 5;
};

/// Repeated logit choice among offers with stock, each attempt negotiated
/// with attempt_transaction against the buyer's reservation price, until the
/// budget is spent, maxTrials attempts were made or no seller has stock.
ShoppingResult shopping_round(double& buyerPrice, Money budget, std::span<Offer> offers, const ShoppingParams& params,
                              std::mt19937_64& rng);

/// Picks min(vacancies, candidates) households in random order.
std::vector<int> labor_match(int vacancies, std::span<const int> unemployedCandidates, std::mt19937_64& rng);

enum class LoanReason { Ok, Car, Rrr, NoBank };
const char* to_string(LoanReason r);

struct LoanDecision {
  bool granted = false;
  Money amount;
  double monthlyRate = 0;
  double probabilityOfDefault = 0;
  LoanReason reason = LoanReason::Ok;
};

struct CreditTerms {
  double capitalAdequacy = 0.08;  // equity / loans after the grant
  double reserveRequirement = 0.02;  // reserves / deposits after the grant
  double policyRate = 0.002;
  double riskSpread = 0.01;
  Money equityFloor = Money::from_ticks(1);
};

struct LenderView {
  bool exists = true;
  bool centralBank = false;  // the central bank is not bound by CAR/RRR
  Money equity;
  Money loanBook;
  Money reserves;
  Money deposits;
};

struct BorrowerView {
  Money debt;
  double netWorth = 0;
};

/// PD = D / (D + E) with D the debt including the new loan and E the net
/// worth floored at one tick; rate = r0 + spread * PD. The loan is paid out
/// of the lender's reserves.
LoanDecision credit_request(const LenderView& lender, const BorrowerView& borrower, Money amount,
                            const CreditTerms& terms);

enum class Side { Buy, Sell };

struct EquityOrder {
  Side side = Side::Buy;
  int firmId = 0;
  double limitPrice = 0;
  double quantity = 0;
  int agentId = 0;
  std::int64_t arrivalIndex = 0;
};

struct EquityTrade {
  std::size_t buyOrder = 0;  // indices into the input order list
  std::size_t sellOrder = 0;
  int firmId = 0;
  double price = 0;
  double quantity = 0;
};

struct ClearingResult {
  std::vector<EquityTrade> trades;
  std::vector<double> filled;  // per input order
  std::vector<std::pair<int, double>> lastPrice;  // firms with at least one trade
};

/// Per firm: executes the largest volume any crossing assignment allows.
/// Buys by descending limit and sells by ascending limit (ties by arrival)
/// take the volume; fills are paired lowest buy with cheapest sell upward,
/// each trade at the seller's limit. The last price is the highest executed.
ClearingResult clearing_house(std::span<const EquityOrder> orders);

}  // namespace abmsam
