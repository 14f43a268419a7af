#pragma once

#include "abmsam/markets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace abmsam::test {

/// Maximum executable volume of one firm's book by exhaustive search over
/// buyer subsets S: by max-flow/min-cut it is the minimum of the quantity of
/// buyers outside S plus the quantity of sells some buyer in S can afford.
inline double oracle_max_volume(const std::vector<EquityOrder>& book) {
  std::vector<const EquityOrder*> buys, sells;
  for (const auto& o : book) (o.side == Side::Buy ? buys : sells).push_back(&o);
  double best = std::numeric_limits<double>::infinity();
  for (unsigned mask = 0; mask < (1u << buys.size()); ++mask) {
    double cut = 0;
    std::vector<bool> reach(sells.size(), false);
    for (std::size_t i = 0; i < buys.size(); ++i) {
      if (!(mask & (1u << i))) {
        cut += buys[i]->quantity;
        continue;
      }
      for (std::size_t j = 0; j < sells.size(); ++j)
        if (buys[i]->limitPrice >= sells[j]->limitPrice) reach[j] = true;
    }
    for (std::size_t j = 0; j < sells.size(); ++j)
      if (reach[j]) cut += sells[j]->quantity;
    best = std::min(best, cut);
  }
  return best;
}

/// Random book of 1..6 orders over two firms with integer quantities.
inline std::vector<EquityOrder> random_book(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> nOrders(1, 6), qty(1, 10), tick(90, 110), pick(0, 1);
  std::vector<EquityOrder> orders;
  const int n = nOrders(rng);
  for (int k = 0; k < n; ++k) {
    const Side side = pick(rng) ? Side::Buy : Side::Sell;
    const int firm = pick(rng);
    const double limit = tick(rng) / 100.0;
    orders.push_back({side, firm, limit, static_cast<double>(qty(rng)), k, k});
  }
  return orders;
}

/// Empty when the clearing result agrees with the oracle, else the first problem found.
inline std::string check_clearing(const std::vector<EquityOrder>& orders, const ClearingResult& r) {
  if (r.filled.size() != orders.size()) return "filled has the wrong size";
  for (const auto& t : r.trades) {
    const auto& b = orders[t.buyOrder];
    const auto& s = orders[t.sellOrder];
    if (b.side != Side::Buy || s.side != Side::Sell || b.firmId != s.firmId || t.firmId != b.firmId)
      return "trade pairs incompatible orders";
    if (b.limitPrice < s.limitPrice) return "trade with buy limit below sell limit";
    if (t.price != s.limitPrice) return "trade not at the seller's limit";
  }
  for (std::size_t i = 0; i < orders.size(); ++i)
    if (r.filled[i] < 0 || r.filled[i] > orders[i].quantity + 1e-12) return "order overfilled";
  for (int firm : {0, 1}) {
    std::vector<EquityOrder> book;
    double bought = 0, sold = 0, traded = 0;
    for (std::size_t i = 0; i < orders.size(); ++i) {
      if (orders[i].firmId != firm) continue;
      book.push_back(orders[i]);
      (orders[i].side == Side::Buy ? bought : sold) += r.filled[i];
    }
    for (const auto& t : r.trades)
      if (t.firmId == firm) traded += t.quantity;
    if (bought != sold || bought != traded) return "shares not conserved";
    if (std::abs(traded - oracle_max_volume(book)) > 1e-9) return "executed volume differs from the oracle";
    for (std::size_t i = 0; i < orders.size(); ++i)
      for (std::size_t k = 0; k < orders.size(); ++k) {
        const auto& a = orders[i];
        const auto& c = orders[k];
        if (a.firmId != firm || c.firmId != firm || a.side != c.side || a.limitPrice == c.limitPrice) continue;
        const bool aBetter = a.side == Side::Buy ? a.limitPrice > c.limitPrice : a.limitPrice < c.limitPrice;
        if (aBetter && r.filled[k] > 0 && r.filled[i] < a.quantity) return "price priority violated";
      }
  }
  return {};
}

}  // namespace abmsam::test
