#include "abmsam/rules.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace abmsam {

double consumption_budget(double income, double wealth, double kappa, double phi, double budgetFactor) {
  return budgetFactor * std::max(0.0, income + kappa * (wealth - phi * income));
}

PortfolioSplit portfolio_split(double surplus, double depositFraction) {
  if (surplus <= 0) return {surplus, 0.0};
  const double deposit = surplus * depositFraction;
  return {deposit, surplus - deposit};
}

double plan_production(const Firm& firm, int windowMonths, double stockBuffer, double seedOutput) {
  if (firm.demandHistory.empty()) return seedOutput;
  const int n = std::min<int>(windowMonths, static_cast<int>(firm.demandHistory.size()));
  const double mean =
      std::accumulate(firm.demandHistory.end() - n, firm.demandHistory.end(), 0.0) / static_cast<double>(n);
  const double targetStock = (1.0 + stockBuffer) * mean;
  return std::max(0.0, targetStock - firm.goodsInventory);
}

Requirements input_requirements(Eigen::Index sector, double output, const TechnicalCoefficients& coeffs,
                                double wage, ProductionMode mode, double unitValue, double available) {
  if (sector < 0 || sector >= coeffs.n_sectors())
    throw std::out_of_range("input_requirements: unknown sector " + std::to_string(sector));
  Requirements r;
  const auto n = coeffs.n_sectors();
  r.icValue.setZero(n);
  r.icUnits.setZero(n);
  r.taxBySlot.setZero(coeffs.taxShares.rows());
  if (output <= 0) return r;

  const double value = output * unitValue;
  r.icValue = coeffs.icShare.col(sector) * value;
  r.icUnits = coeffs.icShare.col(sector) * output;
  r.importValue = coeffs.importShare(sector) * value;
  const double labor = coeffs.laborShare(sector);
  const double surplus = coeffs.surplusShare(sector);
  if (mode == ProductionMode::Leontief) {
    r.laborBudget = labor * value;
    r.capitalBudget = surplus * value;
  } else {
    const double primary = (labor + surplus) * value;
    r.laborExponent = labor + surplus > 0 ? labor / (labor + surplus) : 0.0;
    r.laborBudget = r.laborExponent * primary;
    r.capitalBudget = primary - r.laborBudget;
  }
  r.laborHeadcount = wage > 0 ? static_cast<int>(std::ceil(r.laborBudget / wage - 1e-9)) : 0;
  r.taxBySlot = coeffs.taxShares.col(sector) * value;
  r.taxProvision = r.taxBySlot.sum();
  r.totalCost = r.icValue.sum() + r.importValue + r.laborHeadcount * wage + r.taxProvision;
  r.fundingNeed = std::max(0.0, r.totalCost - available);
  return r;
}

std::optional<int> firm_entry_decision(bool ownsFirm, std::span<const double> localUnmetDemand, double pOpen,
                                       std::mt19937_64& rng) {
  if (ownsFirm || pOpen <= 0) return std::nullopt;
  const double draw = std::generate_canonical<double, 53>(rng);
  if (draw >= pOpen) return std::nullopt;
  int best = -1;
  double bestCount = 0;
  for (std::size_t s = 0; s < localUnmetDemand.size(); ++s) {
    if (localUnmetDemand[s] > bestCount) {
      bestCount = localUnmetDemand[s];
      best = static_cast<int>(s);
    }
  }
  if (best < 0) return std::nullopt;
  return best;
}

bool firm_exit_check(std::span<const double> profitHistory, double netWorth, int lossMonths, double minNetWorth) {
  if (lossMonths <= 0 || static_cast<int>(profitHistory.size()) < lossMonths) return false;
  const bool allLosses =
      std::all_of(profitHistory.end() - lossMonths, profitHistory.end(), [](double p) { return p < 0; });
  return allLosses && netWorth < minNetWorth;
}

bool bank_founding_check(double householdWealth, const CentralBank& cb, int currentBanks) {
  return householdWealth >= cb.bankMinNetWorth && currentBanks < cb.maxBanks;
}

bool stockmarket_entry_check(double netWorth, double threshold, bool alreadyListed) {
  return alreadyListed || netWorth >= threshold;
}

ProfitDistribution distribute_profits(double profit, double dividendFraction, std::span<const double> holdings) {
  ProfitDistribution d;
  d.dividends.assign(holdings.size(), 0.0);
  if (profit <= 0) {
    d.retained = profit;
    return d;
  }
  const double total = std::accumulate(holdings.begin(), holdings.end(), 0.0);
  if (!(total > 0)) {
    d.retained = profit;
    return d;
  }
  const double pool = dividendFraction * profit;
  for (std::size_t i = 0; i < holdings.size(); ++i) d.dividends[i] = pool * holdings[i] / total;
  d.retained = profit - pool;
  return d;
}

HouseholdTaxRates household_tax_rates(const SamTable& sam) {
  HouseholdTaxRates r;
  const auto h = sam.first_with_role(AccountRole::Household);
  const auto l = sam.first_with_role(AccountRole::Labor);
  const auto k = sam.first_with_role(AccountRole::Capital);
  const auto g = sam.first_with_role(AccountRole::Government);
  const auto x = sam.first_with_role(AccountRole::External);
  auto purchases = [&](Eigen::Index col) {
    double s = 0;
    for (int i = 0; i < sam.nAccounts; ++i) {
      const auto role = sam.roles[static_cast<std::size_t>(i)];
      if (role == AccountRole::Producer || role == AccountRole::Gfcf) s += sam.flows(i, col);
    }
    return s;
  };
  const double wages = l ? sam.rowSums(*l) : 0.0;
  const double capital = k ? sam.rowSums(*k) : 0.0;
  for (auto t : sam.with_role(AccountRole::Tax)) {
    const auto kind = tax_kind_from_name(sam.accounts[static_cast<std::size_t>(t)]);
    if (h) {
      const double paid = sam.flows(t, *h);
      if (kind == TaxKind::SocialSecurity && wages > 0) {
        r.employeeSocialSecurity += paid / wages;
      } else if (kind == TaxKind::Products) {
        if (const double base = purchases(*h); base > 0) r.householdProducts += paid / base;
      } else if (paid != 0 && wages + capital > 0) {
        r.income += paid / (wages + capital);
      }
    }
    if (kind == TaxKind::Products) {
      if (g)
        if (const double base = purchases(*g); base > 0) r.governmentProducts += sam.flows(t, *g) / base;
      if (x)
        if (const double base = purchases(*x); base > 0) r.externalProducts += sam.flows(t, *x) / base;
    }
  }
  return r;
}

}  // namespace abmsam
