#include "abmsam/engine.hpp"
#include "abmsam/ledger.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

using namespace abmsam;

namespace {

const SamTable& spain() {
  static const SamTable sam = read_sam_file(test::spain_sam_path());
  return sam;
}

// replays the exact monthly targets for `months` months
Ledger replay_targets(const SamTable& sam, int months) {
  Ledger led(sam.nAccounts);
  const auto t = monthly_targets(sam);
  for (int m = 1; m <= months; ++m) {
    led.begin_month(m);
    for (int i = 0; i < sam.nAccounts; ++i)
      for (int j = 0; j < sam.nAccounts; ++j)
        if (t.monthly(i, j) != 0)
          led.record({m, 1, i, j, Money::from_units(t.monthly(i, j)), FlowKind::Goods, {}, {}, false});
    led.close_month();
  }
  return led;
}

}  // namespace

TEST(ComputedSam, EmptyLedgerIsZero) {
  Ledger led(16);
  const auto m = computed_sam(led, 12, 12, ScalePlan{});
  EXPECT_EQ(m.rows(), 16);
  EXPECT_EQ(m.cwiseAbs().sum(), 0.0);
}

TEST(ComputedSam, IdentityReplayReproducesTheTable) {
  const auto& sam = spain();
  const auto led = replay_targets(sam, 12);
  const auto m = computed_sam(led, 12, 12, ScalePlan{});
  EXPECT_LT((m - sam.flows).cwiseAbs().maxCoeff(), 1e-4);
  const auto pct = compare_sam(m, sam);
  for (int i = 0; i < sam.nAccounts; ++i)
    for (int j = 0; j < sam.nAccounts; ++j) {
      if (sam.flows(i, j) == 0)
        EXPECT_TRUE(std::isnan(pct(i, j)));
      else
        EXPECT_NEAR(pct(i, j), 100.0, 1e-3);
    }
}

TEST(ComputedSam, WindowsAreAdditive) {
  const auto& sam = spain();
  const auto led = replay_targets(sam, 24);
  const auto a = computed_sam(led, 12, 12, ScalePlan{});
  const auto b = computed_sam(led, 24, 12, ScalePlan{});
  const auto ab = computed_sam(led, 24, 24, ScalePlan{});
  EXPECT_LT((a + b - ab).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_THROW(computed_sam(led, 30, 12, ScalePlan{}), std::invalid_argument);
  EXPECT_THROW(computed_sam(led, 12, 0, ScalePlan{}), std::invalid_argument);
}

TEST(ComputedSam, ScaleConversion) {
  Ledger led(2);
  led.begin_month(1);
  led.record({1, 1, 0, 1, Money::from_units(3), FlowKind::Goods, {}, {}, false});
  led.close_month();
  ScalePlan p;
  p.agentScale = 1000;
  EXPECT_DOUBLE_EQ(computed_sam(led, 1, 1, p)(0, 1), 3000);
}

TEST(LedgerRecord, RejectsUnknownAccounts) {
  Ledger led(3);
  led.begin_month(1);
  EXPECT_THROW(led.record({1, 1, 3, 0, Money::from_units(1)}), std::out_of_range);
  EXPECT_THROW(led.record({1, 1, 0, kNoAccount, Money::from_units(1)}), std::out_of_range);
}

TEST(LedgerHash, ChainsAndDependsOnEntries) {
  auto build = [](std::int64_t ticks) {
    Ledger led(2);
    led.begin_month(1);
    led.record({1, 1, 0, 1, Money::from_ticks(ticks), FlowKind::Goods, {HolderClass::Household, 0},
                {HolderClass::Firm, 0}});
    led.close_month();
    return led;
  };
  EXPECT_EQ(build(5).hash(), build(5).hash());
  EXPECT_NE(build(5).hash(), build(6).hash());
  EXPECT_EQ(to_hex(build(5).hash()).size(), 64u);
}

TEST(Audit, LoanOfOneHundred) {
  Ledger led(2);
  led.begin_month(1);
  const Money amt = Money::from_units(100);
  led.record({1, 1, kNoAccount, kNoAccount, amt, FlowKind::LoanGrant, {HolderClass::Bank, 0}, {HolderClass::Firm, 0}});
  std::array<std::int64_t, kHolderClasses> start{}, end{};
  start[static_cast<int>(HolderClass::Bank)] = amt.ticks();
  end[static_cast<int>(HolderClass::Firm)] = amt.ticks();
  const auto r = audit_money(led, 1, start, end);
  EXPECT_EQ(r.residual(), 0);
  EXPECT_EQ(r.domesticChange, 0);
  end[static_cast<int>(HolderClass::Firm)] += 1;
  EXPECT_EQ(audit_money(led, 1, start, end).residual(), 2);
}

TEST(Audit, ExportSaleOfFifty) {
  Ledger led(2);
  led.begin_month(1);
  const Money amt = Money::from_units(50);
  led.record({1, 1, 0, 1, amt, FlowKind::Goods, {HolderClass::External, 0}, {HolderClass::Firm, 0}});
  std::array<std::int64_t, kHolderClasses> start{}, end{};
  end[static_cast<int>(HolderClass::Firm)] = amt.ticks();
  end[static_cast<int>(HolderClass::External)] = -amt.ticks();
  const auto r = audit_money(led, 1, start, end);
  EXPECT_EQ(r.residual(), 0);
  EXPECT_EQ(r.externalInjection, amt.ticks());
  EXPECT_EQ(r.domesticChange, amt.ticks());
}

TEST(ToyWorld, MoneyIsConservedEveryMonth) {
  const auto sam = read_sam_file(test::toy_sam_path());
  auto cfg = test::small_config(200, 36);
  cfg.maxBanks = 0;
  auto w = init_world(sam, cfg);
  const auto total = [](const World& x) {
    const auto b = class_balances(x);
    return std::accumulate(b.begin(), b.end(), std::int64_t{0});
  };
  const std::int64_t initial = total(w);
  run_until(w, 36, [&](const World& x) { EXPECT_EQ(total(x), initial) << "month " << x.month; });
  ASSERT_EQ(w.auditResidual.size(), 36u);
  for (auto r : w.auditResidual) EXPECT_EQ(r, 0);
  EXPECT_GT(w.ledger.monthly_flows().back().sum(), 0);
}
