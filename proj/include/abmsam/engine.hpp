#pragma once

// Calendar-driven simulation loop and the deployment controller.

#include "abmsam/world.hpp"

#include <functional>

namespace abmsam {

/// Households at uniform random locations, no firms or banks, government,
/// central bank and external sector configured from the SAM. Throws
/// std::invalid_argument on an unusable SAM or config.
World init_world(const SamTable& sam, const SimConfig& cfg);

/// One month: daily production, shopping and public purchases, then the
/// month-end settlement.
void step_month(World& w);

/// Updates and returns the budget factor from this month's realized household
/// purchases; freezes it when the deployment horizon is reached.
double deployment_adjust(World& w, double realizedHouseholdGoods);

/// Month-end government settlement: firm taxes and unemployment subsidies.
void government_month(World& w);
/// Month-end external settlement: transfers to households.
void external_month(World& w);

using MonthCallback = std::function<void(const World&)>;

/// Steps until w.month == lastMonth.
void run_until(World& w, int lastMonth, const MonthCallback& onMonth = {});

/// init_world followed by cfg.totalMonths months.
World run(const SamTable& sam, const SimConfig& cfg, const MonthCallback& onMonth = {});

}  // namespace abmsam
