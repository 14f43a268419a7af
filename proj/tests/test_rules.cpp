#include "abmsam/rules.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace abmsam;

namespace {

const SamTable& spain() {
  static const SamTable sam = read_sam_file(test::spain_sam_path());
  return sam;
}

}  // namespace

TEST(ConsumptionBudget, TabulatedValues) {
  EXPECT_NEAR(consumption_budget(1000, 5000, 0.1, 3, 1), 1200, 1e-9);
  EXPECT_NEAR(consumption_budget(1000, 0, 0.1, 3, 1), 700, 1e-9);
  EXPECT_NEAR(consumption_budget(1000, 3000, 0.1, 3, 1.5), 1500, 1e-9);
  EXPECT_EQ(consumption_budget(10, 0, 1.0, 3, 1), 0.0);
}

TEST(ConsumptionBudget, SlopeInWealthIsKappa) {
  const double kappa = 0.05, h = 1e-3;
  for (double w : {0.0, 100.0, 2000.0, 1e5}) {
    const double d = (consumption_budget(500, w + h, kappa, 4, 1) - consumption_budget(500, w, kappa, 4, 1)) / h;
    EXPECT_NEAR(d, kappa, 1e-6) << w;
  }
}

TEST(PortfolioSplit, Cases) {
  auto s = portfolio_split(0, 0.8);
  EXPECT_EQ(s.depositDelta, 0);
  EXPECT_EQ(s.equityBudget, 0);
  s = portfolio_split(100, 0.8);
  EXPECT_NEAR(s.depositDelta, 80, 1e-12);
  EXPECT_NEAR(s.equityBudget, 20, 1e-12);
  s = portfolio_split(-50, 0.8);
  EXPECT_EQ(s.depositDelta, -50);
  EXPECT_EQ(s.equityBudget, 0);
}

TEST(PlanProduction, Cases) {
  Firm f;
  f.demandHistory = {100, 100, 100};
  f.goodsInventory = 30;
  EXPECT_NEAR(plan_production(f, 3, 0.1, 7), 80, 1e-12);
  f.goodsInventory = 200;
  EXPECT_EQ(plan_production(f, 3, 0.1, 7), 0);
  f.demandHistory.clear();
  EXPECT_EQ(plan_production(f, 3, 0.1, 7), 7);
  f.demandHistory = {10, 50, 150};
  f.goodsInventory = 0;
  EXPECT_NEAR(plan_production(f, 2, 0.0, 0), 100, 1e-12);
}

TEST(InputRequirements, ServicesSector) {
  const auto c = technical_coefficients(spain());
  const auto r = input_requirements(4, 1000, c, 19.4409, ProductionMode::Leontief);
  EXPECT_NEAR(r.laborBudget, 196.122, 1e-3);
  EXPECT_NEAR(r.icValue(2), 76816.0 / 1020327.0 * 1000, 1e-9);
  EXPECT_NEAR(r.icValue(2), 75.286, 1e-3);
  EXPECT_EQ(r.laborHeadcount, 11);
  const auto zero = input_requirements(4, 0, c, 19.4409, ProductionMode::Leontief);
  EXPECT_EQ(zero.laborHeadcount, 0);
  EXPECT_EQ(zero.icValue.sum(), 0);
  EXPECT_EQ(zero.totalCost, 0);
  EXPECT_THROW(input_requirements(6, 1, c, 1, ProductionMode::Leontief), std::out_of_range);
}

TEST(InputRequirements, UnitValueAndFunding) {
  const auto c = technical_coefficients(spain());
  const auto a = input_requirements(2, 500, c, 20, ProductionMode::Leontief, 2.0);
  const auto b = input_requirements(2, 1000, c, 20, ProductionMode::Leontief, 1.0);
  EXPECT_NEAR(a.icValue.sum(), b.icValue.sum(), 1e-9);
  EXPECT_NEAR(a.icUnits.sum() * 2, b.icUnits.sum(), 1e-9);
  const auto f = input_requirements(2, 1000, c, 20, ProductionMode::Leontief, 1.0, 100);
  EXPECT_NEAR(f.fundingNeed, f.totalCost - 100, 1e-9);
}

TEST(InputRequirements, CobbDouglasSymmetricShares) {
  TechnicalCoefficients c;
  c.sectorAccounts = {0};
  c.icShare = Eigen::MatrixXd::Zero(1, 1);
  c.importShare = Eigen::VectorXd::Zero(1);
  c.laborShare = Eigen::VectorXd::Constant(1, 0.3);
  c.surplusShare = Eigen::VectorXd::Constant(1, 0.3);
  c.taxShares = Eigen::MatrixXd::Zero(0, 1);
  const auto r = input_requirements(0, 100, c, 1, ProductionMode::CobbDouglas);
  EXPECT_DOUBLE_EQ(r.laborExponent, 0.5);
  EXPECT_NEAR(r.laborBudget + r.capitalBudget, 60, 1e-12);
}

TEST(FirmEntry, Cases) {
  std::mt19937_64 rng(1);
  const std::vector<double> zeros(6, 0.0);
  EXPECT_FALSE(firm_entry_decision(false, zeros, 1.0, rng));
  const std::vector<double> counts = {5, 0, 12, 0, 3, 0};
  EXPECT_EQ(firm_entry_decision(false, counts, 1.0, rng), 2);  // third sector, 0-based
  EXPECT_FALSE(firm_entry_decision(false, counts, 0.0, rng));
  EXPECT_FALSE(firm_entry_decision(true, counts, 1.0, rng));
  const std::vector<double> ties = {0, 4, 4};
  EXPECT_EQ(firm_entry_decision(false, ties, 1.0, rng), 1);
}

TEST(FirmExit, Cases) {
  const std::vector<double> gains(6, 5.0), losses(6, -1.0);
  EXPECT_FALSE(firm_exit_check(gains, -10, 6, 0));
  EXPECT_TRUE(firm_exit_check(losses, -10, 6, 0));
  EXPECT_FALSE(firm_exit_check(losses, 10, 6, 0));
  EXPECT_FALSE(firm_exit_check(std::vector<double>(5, -1.0), -10, 6, 0));
}

TEST(BankFounding, Boundaries) {
  CentralBank cb;
  cb.bankMinNetWorth = 1000;
  cb.maxBanks = 3;
  EXPECT_FALSE(bank_founding_check(5000, cb, 3));
  EXPECT_TRUE(bank_founding_check(1000, cb, 2));
  EXPECT_FALSE(bank_founding_check(999.99, cb, 0));
}

TEST(StockMarketEntry, LatchesOnceListed) {
  EXPECT_TRUE(stockmarket_entry_check(2000, 2000));
  EXPECT_FALSE(stockmarket_entry_check(0, 2000));
  EXPECT_TRUE(stockmarket_entry_check(-5, 2000, true));
}

TEST(ProfitDistribution, Cases) {
  const std::vector<double> sole = {1.0};
  auto d = distribute_profits(-100, 0.5, sole);
  EXPECT_EQ(d.dividends[0], 0);
  EXPECT_EQ(d.retained, -100);
  d = distribute_profits(100, 0.5, sole);
  EXPECT_NEAR(d.dividends[0], 50, 1e-12);
  EXPECT_NEAR(d.retained, 50, 1e-12);
  const std::vector<double> two = {75, 25};
  d = distribute_profits(100, 0.5, two);
  EXPECT_NEAR(d.dividends[0], 37.5, 1e-12);
  EXPECT_NEAR(d.dividends[1], 12.5, 1e-12);
  EXPECT_NEAR(d.dividends[0] + d.dividends[1] + d.retained, 100, 1e-12);
}

TEST(HouseholdTaxes, RatesFromSam) {
  const auto r = household_tax_rates(spain());
  EXPECT_NEAR(r.income, 117483.0 / (410591.0 + 467771.0), 1e-12);
  EXPECT_NEAR(r.income, 0.133752, 1e-6);
  EXPECT_NEAR(r.employeeSocialSecurity, 0.048890, 1e-6);
}
