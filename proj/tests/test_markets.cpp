#include "abmsam/markets.hpp"
#include "clearing_oracle.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace abmsam;

TEST(AttemptTransaction, TabulatedCases) {
  auto u = attempt_transaction(1.05, 1.00, 0.01);
  EXPECT_TRUE(u.traded);
  EXPECT_NEAR(u.buyerPrice, 1.0395, 1e-12);
  EXPECT_NEAR(u.sellerPrice, 1.01, 1e-12);
  u = attempt_transaction(1.00, 1.00, 0.01);
  EXPECT_TRUE(u.traded);
  u = attempt_transaction(0.95, 1.00, 0.01);
  EXPECT_FALSE(u.traded);
  EXPECT_NEAR(u.buyerPrice, 0.9595, 1e-12);
  EXPECT_NEAR(u.sellerPrice, 0.99, 1e-12);
}

TEST(AttemptTransaction, GapContractsWhenTrading) {
  double b = 2.0, s = 1.0;
  for (int k = 0; k < 20; ++k) {
    const double gap = b - s;
    const auto u = attempt_transaction(b, s, 0.01);
    ASSERT_TRUE(u.traded);
    EXPECT_LT(u.buyerPrice - u.sellerPrice, gap);
    EXPECT_GT(u.sellerPrice, 0);
    b = u.buyerPrice;
    s = u.sellerPrice;
  }
}

TEST(Logit, ProbabilitiesAndDraws) {
  const std::vector<double> two = {1.0, 1.1};
  const auto p = logit_probabilities(two, 10);
  EXPECT_NEAR(p[0], 1.0 / (1.0 + std::exp(-1.0)), 1e-12);
  EXPECT_NEAR(p[0], 0.731059, 1e-6);
  const std::vector<double> same = {1.2, 1.2, 1.2};
  for (double q : logit_probabilities(same, 10)) EXPECT_NEAR(q, 1.0 / 3, 1e-12);
  const std::vector<double> spread = {0.5, 1.0, 3.0};
  for (double q : logit_probabilities(spread, 0)) EXPECT_NEAR(q, 1.0 / 3, 1e-12);
  const auto d = logit_probabilities(spread, 4);
  EXPECT_GT(d[0], d[1]);
  EXPECT_GT(d[1], d[2]);
  EXPECT_NEAR(d[0] + d[1] + d[2], 1.0, 1e-12);

  std::mt19937_64 rng(42);
  int first = 0;
  const int draws = 1'000'000;
  for (int k = 0; k < draws; ++k) first += select_seller_logit(two, 10, rng) == 0;
  EXPECT_NEAR(static_cast<double>(first) / draws, 0.731059, 0.01);
  const std::vector<double> none;
  EXPECT_THROW(select_seller_logit(none, 10, rng), std::invalid_argument);
}

TEST(ShoppingRound, NoSellersLeavesBudgetUnmet) {
  std::mt19937_64 rng(1);
  double price = 1.0;
  std::vector<Offer> offers;
  const auto r = shopping_round(price, Money::from_units(10), offers, {}, rng);
  EXPECT_TRUE(r.purchases.empty());
  EXPECT_EQ(r.unmet, Money::from_units(10));
}

TEST(ShoppingRound, OneSellerAmpleStock) {
  std::mt19937_64 rng(1);
  double price = 1.2;
  std::vector<Offer> offers = {{7, 1.0, 1000, 0}};
  const auto r = shopping_round(price, Money::from_units(10), offers, {}, rng);
  ASSERT_EQ(r.purchases.size(), 1u);
  EXPECT_EQ(r.spent, Money::from_units(10));
  EXPECT_EQ(r.unmet, Money{});
  EXPECT_NEAR(r.purchases[0].quantity, 10, 1e-9);
  EXPECT_NEAR(offers[0].stock, 990, 1e-9);
}

TEST(ShoppingRound, LimitedStock) {
  std::mt19937_64 rng(1);
  double price = 1.0;
  std::vector<Offer> offers = {{0, 1.0, 5, 0}};
  const auto r = shopping_round(price, Money::from_units(10), offers, {}, rng);
  ASSERT_EQ(r.purchases.size(), 1u);
  EXPECT_NEAR(r.purchases[0].quantity, 5, 1e-12);
  EXPECT_EQ(r.unmet, Money::from_units(5));
  EXPECT_NEAR(offers[0].stockoutUnits, 5, 1e-12);
}

TEST(ShoppingRound, SpendingMatchesTradesAndLimits) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<Offer> offers;
    for (int k = 0; k < 4; ++k) offers.push_back({k, u(rng), u(rng) * 5, 0});
    const auto before = offers;
    double price = u(rng);
    const Money budget = Money::from_units(u(rng) * 10);
    const auto r = shopping_round(price, budget, offers, {0.01, 10, 5}, rng);
    Money total;
    for (const auto& p : r.purchases) {
      total += p.cost;
      EXPECT_LE(p.quantity, before[p.offer].stock + 1e-12);
    }
    EXPECT_EQ(total, r.spent);
    EXPECT_LE(r.spent, budget);
    EXPECT_EQ(r.spent + r.unmet, budget);
    EXPECT_LE(r.trials, 5);
  }
}

TEST(LaborMatch, Cases) {
  std::mt19937_64 rng(3);
  const std::vector<int> two = {4, 9};
  EXPECT_TRUE(labor_match(0, two, rng).empty());
  auto hires = labor_match(3, two, rng);
  std::sort(hires.begin(), hires.end());
  EXPECT_EQ(hires, two);
  const std::vector<int> none;
  EXPECT_TRUE(labor_match(5, none, rng).empty());
  const std::vector<int> many = {1, 2, 3, 4, 5, 6};
  const auto pick = labor_match(3, many, rng);
  EXPECT_EQ(pick.size(), 3u);
}

TEST(CreditRequest, Cases) {
  CreditTerms t;
  t.policyRate = 0.002;
  t.riskSpread = 0.01;
  LenderView bank{true, false, Money::from_units(100), Money::from_units(100), Money::from_units(1000),
                  Money::from_units(1000)};

  auto d = credit_request(bank, {Money{}, 1e6}, Money::from_ticks(1), t);
  EXPECT_TRUE(d.granted);
  EXPECT_NEAR(d.probabilityOfDefault, 0, 1e-9);
  EXPECT_NEAR(d.monthlyRate, 0.002, 1e-9);

  d = credit_request(bank, {Money::from_units(40), 50}, Money::from_units(10), t);
  EXPECT_TRUE(d.granted);
  EXPECT_NEAR(d.probabilityOfDefault, 0.5, 1e-12);
  EXPECT_NEAR(d.monthlyRate, 0.002 + 0.5 * 0.01, 1e-12);

  d = credit_request(bank, {Money{}, 50}, Money::from_units(2000), t);
  EXPECT_FALSE(d.granted);
  EXPECT_EQ(d.reason, LoanReason::Car);

  LenderView thin = bank;
  thin.reserves = Money::from_units(25);
  d = credit_request(thin, {Money{}, 50}, Money::from_units(10), t);
  EXPECT_FALSE(d.granted);
  EXPECT_EQ(d.reason, LoanReason::Rrr);

  d = credit_request(LenderView{false}, {Money{}, 50}, Money::from_units(10), t);
  EXPECT_FALSE(d.granted);
  EXPECT_EQ(d.reason, LoanReason::NoBank);

  d = credit_request(bank, {Money{}, -5}, Money::from_units(10), t);
  EXPECT_NEAR(d.probabilityOfDefault, 1.0, 1e-6);
}

TEST(ClearingHouse, HandMatchedBook) {
  const std::vector<EquityOrder> orders = {
      {Side::Buy, 1, 1.10, 10, 0, 0}, {Side::Sell, 1, 1.00, 4, 1, 1}, {Side::Sell, 1, 1.05, 10, 2, 2}};
  const auto r = clearing_house(orders);
  ASSERT_EQ(r.trades.size(), 2u);
  EXPECT_DOUBLE_EQ(r.trades[0].quantity, 4);
  EXPECT_DOUBLE_EQ(r.trades[0].price, 1.00);
  EXPECT_DOUBLE_EQ(r.trades[1].quantity, 6);
  EXPECT_DOUBLE_EQ(r.trades[1].price, 1.05);
  ASSERT_EQ(r.lastPrice.size(), 1u);
  EXPECT_DOUBLE_EQ(r.lastPrice[0].second, 1.05);
}

TEST(ClearingHouse, NoCrossingNoTrades) {
  const std::vector<EquityOrder> orders = {{Side::Buy, 0, 0.9, 5, 0, 0}, {Side::Sell, 0, 1.0, 5, 1, 1}};
  const auto r = clearing_house(orders);
  EXPECT_TRUE(r.trades.empty());
  EXPECT_TRUE(r.lastPrice.empty());
}

TEST(ClearingHouse, ExhaustiveOracleOnRandomBooks) {
  std::mt19937_64 rng(2024);
  for (int book = 0; book < 1000; ++book) {
    const auto orders = test::random_book(rng);
    EXPECT_EQ(test::check_clearing(orders, clearing_house(orders)), "") << "book " << book;
  }
}

TEST(ClearingHouse, OracleCatchesShortfall) {
  const std::vector<EquityOrder> orders = {{Side::Buy, 0, 1.0, 5, 0, 0}, {Side::Sell, 0, 1.0, 5, 1, 1}};
  ClearingResult none;
  none.filled.assign(2, 0.0);
  EXPECT_NE(test::check_clearing(orders, none), "");
}

TEST(ClearingHouse, CrossAssignmentBeatsBestToBest) {
  // pairing the best buy with the best sell would strand the second pair
  const std::vector<EquityOrder> orders = {{Side::Buy, 3, 1.10, 1, 0, 0},
                                           {Side::Buy, 3, 1.00, 1, 1, 1},
                                           {Side::Sell, 3, 0.95, 1, 2, 2},
                                           {Side::Sell, 3, 1.05, 1, 3, 3}};
  const auto r = clearing_house(orders);
  double volume = 0;
  for (const auto& t : r.trades) volume += t.quantity;
  EXPECT_DOUBLE_EQ(volume, 2);
  ASSERT_EQ(r.lastPrice.size(), 1u);
  EXPECT_DOUBLE_EQ(r.lastPrice[0].second, 1.05);
}
