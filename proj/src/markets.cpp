#include "abmsam/markets.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace abmsam {

PriceUpdate attempt_transaction(double buyerPrice, double sellerPrice, double epsilon) {
  if (buyerPrice >= sellerPrice) return {true, buyerPrice * (1.0 - epsilon), sellerPrice * (1.0 + epsilon)};
  return {false, buyerPrice * (1.0 + epsilon), sellerPrice * (1.0 - epsilon)};
}

std::vector<double> logit_probabilities(std::span<const double> prices, double gamma) {
  std::vector<double> p(prices.size());
  if (prices.empty()) return p;
  const double lo = *std::min_element(prices.begin(), prices.end());
  double total = 0;
  for (std::size_t i = 0; i < prices.size(); ++i) {
    p[i] = std::exp(-gamma * (prices[i] - lo));
    total += p[i];
  }
  for (double& v : p) v /= total;
  return p;
}

std::size_t select_seller_logit(std::span<const double> prices, double gamma, std::mt19937_64& rng) {
  if (prices.empty()) throw std::invalid_argument("select_seller_logit: empty candidate list");
  const double u = std::generate_canonical<double, 53>(rng);
  if (prices.size() == 1) return 0;
  const auto p = logit_probabilities(prices, gamma);
  double acc = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    if (u < acc) return i;
  }
  return p.size() - 1;
}

ShoppingResult shopping_round(double& buyerPrice, Money budget, std::span<Offer> offers, const ShoppingParams& params,
                              std::mt19937_64& rng) {
  ShoppingResult res;
  Money remaining = budget;
  std::vector<std::size_t> live;
  std::vector<double> asks;
  while (remaining.positive() && res.trials < params.maxTrials) {
    live.clear();
    asks.clear();
    for (std::size_t i = 0; i < offers.size(); ++i) {
      if (offers[i].stock > 0) {
        live.push_back(i);
        asks.push_back(offers[i].ask);
      }
    }
    if (live.empty()) break;
    const std::size_t pick = live[select_seller_logit(asks, params.gamma, rng)];
    Offer& o = offers[pick];
    ++res.trials;
    const double price = o.ask;
    const PriceUpdate upd = attempt_transaction(buyerPrice, price, params.epsilon);
    buyerPrice = upd.buyerPrice;
    o.ask = upd.sellerPrice;
    if (!upd.traded) continue;
    const double wanted = remaining.units() / price;
    double qty = std::min(wanted, o.stock);
    Money cost = Money::from_units(qty * price);
    if (cost > remaining) cost = remaining;
    if (!cost.positive()) {
      // remaining budget below one tick of this good
      break;
    }
    if (wanted > o.stock) o.stockoutUnits += wanted - o.stock;
    o.stock -= qty;
    if (o.stock < 1e-12) o.stock = 0;
    remaining -= cost;
    res.spent += cost;
    res.purchases.push_back({pick, qty, price, cost});
  }
  res.unmet = remaining;
  return res;
}

std::vector<int> labor_match(int vacancies, std::span<const int> unemployedCandidates, std::mt19937_64& rng) {
  std::vector<int> pool(unemployedCandidates.begin(), unemployedCandidates.end());
  if (vacancies <= 0 || pool.empty()) return {};
  const auto k = std::min<std::size_t>(static_cast<std::size_t>(vacancies), pool.size());
  // partial Fisher-Yates
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pickDist(i, pool.size() - 1);
    std::swap(pool[i], pool[pickDist(rng)]);
  }
  pool.resize(k);
  return pool;
}

const char* to_string(LoanReason r) {
  switch (r) {
    case LoanReason::Ok: return "ok";
    case LoanReason::Car: return "CAR";
    case LoanReason::Rrr: return "RRR";
    case LoanReason::NoBank: return "noBank";
  }
  return "?";
}

LoanDecision credit_request(const LenderView& lender, const BorrowerView& borrower, Money amount,
                            const CreditTerms& terms) {
  LoanDecision d;
  d.amount = amount;
  if (!lender.exists) {
    d.reason = LoanReason::NoBank;
    return d;
  }
  const double debt = (borrower.debt + amount).units();
  const double equity = std::max(borrower.netWorth, terms.equityFloor.units());
  d.probabilityOfDefault = std::clamp(debt / (debt + equity), 0.0, 1.0);
  d.monthlyRate = terms.policyRate + terms.riskSpread * d.probabilityOfDefault;
  if (!lender.centralBank) {
    const Money loansAfter = lender.loanBook + amount;
    if (loansAfter.positive() && lender.equity.units() < terms.capitalAdequacy * loansAfter.units()) {
      d.reason = LoanReason::Car;
      return d;
    }
    if ((lender.reserves - amount).units() < terms.reserveRequirement * lender.deposits.units() ||
        lender.reserves < amount) {
      d.reason = LoanReason::Rrr;
      return d;
    }
  }
  d.granted = true;
  d.reason = LoanReason::Ok;
  return d;
}

ClearingResult clearing_house(std::span<const EquityOrder> orders) {
  ClearingResult res;
  res.filled.assign(orders.size(), 0.0);
  std::map<int, std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> books;
  for (std::size_t i = 0; i < orders.size(); ++i) {
    auto& book = books[orders[i].firmId];
    (orders[i].side == Side::Buy ? book.first : book.second).push_back(i);
  }
  for (auto& [firm, book] : books) {
    auto& buys = book.first;
    auto& sells = book.second;
    std::stable_sort(buys.begin(), buys.end(), [&](std::size_t a, std::size_t b) {
      if (orders[a].limitPrice != orders[b].limitPrice) return orders[a].limitPrice > orders[b].limitPrice;
      return orders[a].arrivalIndex < orders[b].arrivalIndex;
    });
    std::stable_sort(sells.begin(), sells.end(), [&](std::size_t a, std::size_t b) {
      if (orders[a].limitPrice != orders[b].limitPrice) return orders[a].limitPrice < orders[b].limitPrice;
      return orders[a].arrivalIndex < orders[b].arrivalIndex;
    });
    // executable volume: buyers from the lowest limit up draw on the supply they can afford
    double volume = 0;
    for (auto it = buys.rbegin(); it != buys.rend(); ++it) {
      double supply = 0;
      for (std::size_t j : sells)
        if (orders[j].limitPrice <= orders[*it].limitPrice) supply += orders[j].quantity;
      volume += std::max(0.0, std::min(orders[*it].quantity, supply - volume));
    }
    if (volume <= 0) continue;

    // price priority: the best buys and the best sells carry the volume
    auto allot = [&](const std::vector<std::size_t>& side) {
      std::vector<std::pair<std::size_t, double>> out;
      double left = volume;
      for (std::size_t i : side) {
        if (left <= 0) break;
        const double q = std::min(orders[i].quantity, left);
        out.emplace_back(i, q);
        left -= q;
      }
      return out;
    };
    auto buyFill = allot(buys);
    auto sellFill = allot(sells);
    std::reverse(buyFill.begin(), buyFill.end());

    // the lowest filled buy meets the cheapest sell, and so on upward
    std::size_t bi = 0, si = 0;
    double last = 0;
    bool traded = false;
    while (bi < buyFill.size() && si < sellFill.size()) {
      auto& [b, bq] = buyFill[bi];
      auto& [s, sq] = sellFill[si];
      const double qty = std::min(bq, sq);
      if (qty > 0) {
        res.trades.push_back({b, s, firm, orders[s].limitPrice, qty});
        res.filled[b] += qty;
        res.filled[s] += qty;
        last = orders[s].limitPrice;
        traded = true;
      }
      bq -= qty;
      sq -= qty;
      if (bq <= 0) ++bi;
      if (sq <= 0) ++si;
    }
    if (traded) res.lastPrice.emplace_back(firm, last);
  }
  return res;
}

}  // namespace abmsam
