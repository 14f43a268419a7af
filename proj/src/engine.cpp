#include "abmsam/engine.hpp"

#include "abmsam/markets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace abmsam {

// ---------------------------------------------------------------------------
// Derived state

AccountMap map_accounts(const SamTable& sam) {
  AccountMap m;
  m.sectorOfAccount.assign(static_cast<std::size_t>(sam.nAccounts), -1);
  for (auto a : sam.sectors()) {
    m.sectorOfAccount[static_cast<std::size_t>(a)] = static_cast<int>(m.sector.size());
    m.sector.push_back(static_cast<int>(a));
  }
  for (auto a : sam.with_role(AccountRole::Tax)) m.tax.push_back(static_cast<int>(a));
  auto first = [&](AccountRole r) {
    auto i = sam.first_with_role(r);
    return i ? static_cast<int>(*i) : -1;
  };
  m.gfcf = first(AccountRole::Gfcf);
  m.external = first(AccountRole::External);
  m.labor = first(AccountRole::Labor);
  m.capital = first(AccountRole::Capital);
  m.government = first(AccountRole::Government);
  m.households = first(AccountRole::Household);
  for (int t : m.tax) {
    const auto kind = tax_kind_from_name(sam.accounts[static_cast<std::size_t>(t)]);
    if (kind == TaxKind::Products && m.productsTax < 0) m.productsTax = t;
    if (kind == TaxKind::SocialSecurity && m.socialSecurityTax < 0) m.socialSecurityTax = t;
  }
  if (m.households >= 0)
    for (int t : m.tax) {
      const auto kind = tax_kind_from_name(sam.accounts[static_cast<std::size_t>(t)]);
      if (kind != TaxKind::Products && kind != TaxKind::SocialSecurity && sam.flows(t, m.households) != 0) {
        m.incomeTax = t;
        break;
      }
    }
  return m;
}

double household_wealth(const World& w, const Household& h) {
  double v = h.cash.units() + h.deposits.units();
  for (const auto& s : h.shares) v += s.quantity * w.firms[static_cast<std::size_t>(s.firm)].sharePrice;
  return v;
}

std::array<std::int64_t, kHolderClasses> class_balances(const World& w) {
  std::array<std::int64_t, kHolderClasses> b{};
  for (const auto& h : w.households) b[static_cast<std::size_t>(HolderClass::Household)] += h.cash.ticks();
  for (const auto& f : w.firms) b[static_cast<std::size_t>(HolderClass::Firm)] += f.paymentAccount.ticks();
  for (const auto& k : w.banks) b[static_cast<std::size_t>(HolderClass::Bank)] += k.reserves.ticks();
  b[static_cast<std::size_t>(HolderClass::Government)] = w.gov.balance.ticks();
  b[static_cast<std::size_t>(HolderClass::CentralBank)] = w.cb.balance.ticks();
  b[static_cast<std::size_t>(HolderClass::External)] = -w.ext.netFlow.ticks();
  return b;
}

void derive(World& w) {
  const auto& sam = w.sam;
  w.targets = monthly_targets(sam);
  w.coeffs = technical_coefficients(sam);
  w.gfcf = gfcf_weights(sam);
  w.scale = scale_factors(sam, w.cfg.nSimAgents);
  w.taxRates = household_tax_rates(sam);
  w.acct = map_accounts(sam);
  if (w.acct.households < 0 || w.acct.government < 0 || w.acct.labor < 0 || w.acct.capital < 0)
    throw std::invalid_argument("SAM needs household, government, labor and capital accounts");
  if (!(w.scale.monthlyWage > 0)) throw std::invalid_argument("SAM labor row gives no positive wage");
  w.wage = Money::from_units(w.scale.monthlyWage);

  const auto n = static_cast<Eigen::Index>(sam.nAccounts);
  auto to_model = [&](double v) { return w.scale.to_model_units(v); };
  auto final_demand_row = [&](int r) {
    const auto role = sam.roles[static_cast<std::size_t>(r)];
    return role == AccountRole::Producer || role == AccountRole::Gfcf;
  };
  w.hhGoodsTarget = 0;
  w.govTarget.setZero(n);
  w.extTarget.setZero(n);
  for (int r = 0; r < n; ++r) {
    if (!final_demand_row(r)) continue;
    w.hhGoodsTarget += to_model(w.targets.monthly(r, w.acct.households));
    w.govTarget(r) = to_model(w.targets.monthly(r, w.acct.government));
    if (w.acct.external >= 0) w.extTarget(r) = to_model(w.targets.monthly(r, w.acct.external));
  }
  w.subsidyBudget = Money::from_units(to_model(w.targets.monthly(w.acct.households, w.acct.government)));
  w.externalTransfer = w.acct.external >= 0
                           ? Money::from_units(to_model(w.targets.monthly(w.acct.households, w.acct.external)))
                           : Money{};
  const int ns = w.n_sectors();
  w.minFirmValue.resize(ns);
  for (int s = 0; s < ns; ++s) {
    const double ls = w.coeffs.laborShare(s);
    w.minFirmValue(s) = ls > 1e-9 ? w.wage.units() / ls : w.wage.units();
  }

  const int cells = std::max(1, static_cast<int>(std::ceil(1.0 / w.cfg.radius)));
  if (w.unmet.amount.rows() != cells * cells || w.unmet.amount.cols() != ns) w.unmet = UnmetGrid(cells, ns);
  w.householdIndex = SpatialIndex(cells, 1);
  w.householdLocs.clear();
  for (const auto& h : w.households) {
    w.householdIndex.insert(h.id, h.loc, 0);
    w.householdLocs.push_back(h.loc);
  }
  w.firmIndex = SpatialIndex(cells, std::max(1, ns));
  w.firmLocs.clear();
  for (const auto& f : w.firms) {
    w.firmLocs.push_back(f.loc);
    if (f.alive) w.firmIndex.insert(f.id, f.loc, f.sector);
  }
}

// ---------------------------------------------------------------------------
// Money movement

namespace {

Holder household_holder(int id) { return {HolderClass::Household, id}; }
Holder firm_holder(int id) { return {HolderClass::Firm, id}; }
Holder bank_holder(int id) { return {HolderClass::Bank, id}; }
constexpr Holder kGov{HolderClass::Government, 0};
constexpr Holder kCb{HolderClass::CentralBank, 0};
constexpr Holder kExt{HolderClass::External, 0};
constexpr Holder kNobody{HolderClass::None, -1};

void adjust(World& w, Holder h, Money delta) {
  switch (h.cls) {
    case HolderClass::Household: w.households[static_cast<std::size_t>(h.id)].cash += delta; break;
    case HolderClass::Firm: w.firms[static_cast<std::size_t>(h.id)].paymentAccount += delta; break;
    case HolderClass::Bank: w.banks[static_cast<std::size_t>(h.id)].reserves += delta; break;
    case HolderClass::Government: w.gov.balance += delta; break;
    case HolderClass::CentralBank: w.cb.balance += delta; break;
    case HolderClass::External: w.ext.netFlow -= delta; break;
    case HolderClass::None: throw std::logic_error("payment to or from nobody");
  }
}

/// Moves money and records the entry.
void pay(World& w, Holder payer, Holder payee, Money amount, FlowKind kind, int row = kNoAccount,
         int col = kNoAccount) {
  if (amount.ticks() == 0) return;
  adjust(w, payer, -amount);
  adjust(w, payee, amount);
  w.ledger.record({w.month + 1, w.day, row, col, amount, kind, payer, payee, true});
}

/// SAM-only leg of a pass-through account.
void note(World& w, int row, int col, Money amount, FlowKind kind) {
  if (amount.ticks() == 0) return;
  w.ledger.record({w.month + 1, w.day, row, col, amount, kind, kNobody, kNobody, false});
}

/// Tax receipt by government from `payer`, remitted from the tax account to
/// the government account. A government paying itself moves no money.
void pay_tax(World& w, Holder payer, int taxAccount, int payerAccount, Money amount) {
  if (amount.ticks() == 0 || taxAccount < 0) return;
  if (payer.cls == HolderClass::Government)
    note(w, taxAccount, payerAccount, amount, FlowKind::Tax);
  else
    pay(w, payer, kGov, amount, FlowKind::Tax, taxAccount, payerAccount);
  note(w, w.acct.government, taxAccount, amount, FlowKind::TaxRemit);
}

Household& hh(World& w, int id) { return w.households[static_cast<std::size_t>(id)]; }
Firm& firm(World& w, int id) { return w.firms[static_cast<std::size_t>(id)]; }

// ---------------------------------------------------------------------------
// Banking

int pick_bank(World& w) {
  std::uniform_int_distribution<int> d(0, static_cast<int>(w.banks.size()) - 1);
  return d(w.rng[Stream::Misc]);
}

void withdraw(World& w, Household& h, Money amount) {
  amount = min(amount, h.deposits);
  if (!amount.positive()) return;
  Bank& b = w.banks[static_cast<std::size_t>(h.bank)];
  if (b.reserves < amount) {
    const Money advance = amount - b.reserves;
    pay(w, kCb, bank_holder(b.id), advance, FlowKind::CbAdvance);
    b.cbDebt += advance;
    w.cb.bankAdvances += advance;
  }
  pay(w, bank_holder(b.id), household_holder(h.id), amount, FlowKind::Withdrawal);
  h.deposits -= amount;
  b.deposits -= amount;
}

void deposit(World& w, Household& h, Money amount) {
  amount = min(amount, h.cash);
  if (!amount.positive() || w.banks.empty()) return;
  if (h.bank == kNone) h.bank = pick_bank(w);
  Bank& b = w.banks[static_cast<std::size_t>(h.bank)];
  pay(w, household_holder(h.id), bank_holder(b.id), amount, FlowKind::Deposit);
  h.deposits += amount;
  b.deposits += amount;
}

void ensure_household_cash(World& w, Household& h, Money amount) {
  if (h.cash < amount && h.deposits.positive()) withdraw(w, h, amount - h.cash);
}

CreditTerms credit_terms(const SimConfig& c) {
  CreditTerms t;
  t.capitalAdequacy = c.car;
  t.reserveRequirement = c.rrr;
  t.policyRate = c.r0;
  t.riskSpread = c.spread;
  return t;
}

void book_loan(World& w, Firm& f, int lender, Money amount, double rate) {
  Loan l;
  l.lender = lender;
  l.principal = amount;
  l.original = amount;
  l.monthlyRate = rate;
  l.monthsLeft = w.cfg.loanTerm;
  l.grantedMonth = w.month + 1;
  f.loans.push_back(l);
  if (lender == kCentralBankLender) {
    pay(w, kCb, firm_holder(f.id), amount, FlowKind::LoanGrant);
    w.cb.firmLoans += amount;
  } else {
    Bank& b = w.banks[static_cast<std::size_t>(lender)];
    pay(w, bank_holder(b.id), firm_holder(f.id), amount, FlowKind::LoanGrant);
    b.loanBook += amount;
  }
}

/// The firm's bank under CAR/RRR; the central bank before the first bank
/// exists and as fallback after a refusal. A refusal is recorded as funding gap.
bool request_credit(World& w, Firm& f, Money amount) {
  if (!amount.positive()) return true;
  const CreditTerms terms = credit_terms(w.cfg);
  const BorrowerView borrower{f.debt(), f.net_worth()};
  if (!w.banks.empty()) {
    if (f.bank == kNone) f.bank = pick_bank(w);
    const Bank& b = w.banks[static_cast<std::size_t>(f.bank)];
    const LenderView view{true, false, b.equity(), b.loanBook, b.reserves, b.deposits};
    const auto d = credit_request(view, borrower, amount, terms);
    if (d.granted) {
      book_loan(w, f, f.bank, amount, d.monthlyRate);
      return true;
    }
    f.fundingGap += amount;
  }
  if (!w.cfg.cbLending) {
    if (w.banks.empty()) f.fundingGap += amount;
    return false;
  }
  LenderView cbView;
  cbView.centralBank = true;
  const auto d = credit_request(cbView, borrower, amount, terms);
  book_loan(w, f, kCentralBankLender, amount, d.monthlyRate);
  return true;
}

/// Returns the cash available after borrowing the shortfall.
Money ensure_firm_cash(World& w, Firm& f, Money amount) {
  if (f.paymentAccount < amount) request_credit(w, f, amount - f.paymentAccount);
  return f.paymentAccount;
}

/// Firm pays up to `amount` from its payment account; returns what was paid.
Money firm_pay(World& w, Firm& f, Holder payee, Money amount, FlowKind kind, int row = kNoAccount,
               int col = kNoAccount) {
  const Money paid = amount.positive() ? min(amount, max(f.paymentAccount, Money{})) : amount;
  pay(w, firm_holder(f.id), payee, paid, kind, row, col);
  return paid;
}

/// Wages, taxes and loan installments due at month end.
Money month_end_obligations(const World& w, const Firm& f) {
  double due = 0;
  if (f.produced) due += static_cast<double>(f.employees.size()) * w.wage.units();
  for (double t : f.taxDue) due += t;
  for (const auto& l : f.loans) {
    if (!l.principal.positive() || l.grantedMonth == w.month + 1) continue;
    due += l.principal.units() * l.monthlyRate;
    due += l.monthsLeft <= 1 ? l.principal.units()
                             : std::min(l.principal.units(), l.original.units() / w.cfg.loanTerm);
  }
  return Money::from_units(std::max(0.0, due));
}

// ---------------------------------------------------------------------------
// Goods markets

struct Buyer {
  Holder holder;
  int account = -1;
  Location loc;
  std::vector<double>* prices = nullptr;
  int excludeFirm = kNone;
};

ShoppingParams shopping_params(const SimConfig& c) { return {c.epsilon, c.gamma, c.maxTrials}; }

/// One shopping round for `sector`; the SAM column of the purchase is `col`.
/// Unmet money beyond `signalCap` is not reported as stockout or entry signal.
Money purchase(World& w, Buyer& b, int sector, Money budget, int col, FlowKind kind,
               Money signalCap = Money::from_ticks(std::numeric_limits<std::int64_t>::max())) {
  if (!budget.positive()) return {};
  static thread_local std::vector<int> cands;
  static thread_local std::vector<Offer> offers;
  const auto& cfg = w.cfg;
  auto& rng = w.rng[Stream::Shopping];
  w.firmIndex.query(
      b.loc, sector, cfg.radius, cfg.radiusExpansions, w.firmLocs,
      [&](int id) { return id != b.excludeFirm && w.firms[static_cast<std::size_t>(id)].goodsInventory > 0; }, cands);
  if (cands.empty()) {
    // nobody nearby has stock: the demand is reported to the local sellers and to the entry signal
    w.firmIndex.query(b.loc, sector, cfg.radius, cfg.radiusExpansions, w.firmLocs,
                      [&](int id) { return id != b.excludeFirm; }, cands);
    const double missed = min(budget, signalCap).units();
    if (!cands.empty()) {
      // a sold-out visit counts as a refused bid: the seller got its way
      cap_candidates(cands, static_cast<std::size_t>(cfg.maxCandidates), rng);
      const double per = missed / static_cast<double>(cands.size());
      const double eps = cfg.epsilon;
      for (int id : cands) {
        Firm& f = firm(w, id);
        f.stockoutUnits += per / f.askPrice;
        const long today = static_cast<long>(w.month) * 64 + w.day;
        if (f.soldOutDay != today) f.askPrice *= 1.0 + eps;
        f.soldOutDay = today;
      }
      (*b.prices)[static_cast<std::size_t>(sector)] *= 1.0 + eps;
    }
    w.unmet.add(b.loc, sector, missed);
    return {};
  }
  cap_candidates(cands, static_cast<std::size_t>(cfg.maxCandidates), rng);
  offers.clear();
  for (int id : cands) {
    const Firm& f = firm(w, id);
    offers.push_back({id, f.askPrice, f.goodsInventory, 0.0});
  }
  double& price = (*b.prices)[static_cast<std::size_t>(sector)];
  const auto res = shopping_round(price, budget, offers, shopping_params(cfg), rng);
  const int row = w.acct.sector[static_cast<std::size_t>(sector)];
  for (const auto& p : res.purchases) {
    Firm& f = firm(w, offers[p.offer].id);
    pay(w, b.holder, firm_holder(f.id), p.cost, kind, row, col);
    f.revenue += p.cost;
    f.salesUnits += p.quantity;
  }
  bool stockLeft = false;
  for (const auto& o : offers) {
    Firm& f = firm(w, o.id);
    if (f.goodsInventory > 0) {
      const double remaining = f.inventoryValue * o.stock / f.goodsInventory;
      f.cogs += f.inventoryValue - remaining;
      f.inventoryValue = remaining;
    }
    f.goodsInventory = o.stock;
    f.askPrice = o.ask;
    stockLeft = stockLeft || o.stock > 0;
  }
  if (res.unmet.positive() && !stockLeft) {
    // every seller ran out: the leftover budget counts once, split over them
    const double missed = min(res.unmet, signalCap).units();
    const double per = missed / static_cast<double>(offers.size());
    for (const auto& o : offers) firm(w, o.id).stockoutUnits += per / o.ask;
    w.unmet.add(b.loc, sector, missed);
  }
  return res.spent;
}

/// Investment purchase through the GFCF account: goods by GFCF column
/// weights plus the GFCF column's own product taxes. Returns the amount
/// booked on the GFCF row of the buyer's column.
Money purchase_gfcf(World& w, Buyer& b, Money budget,
                    Money signalCap = Money::from_ticks(std::numeric_limits<std::int64_t>::max())) {
  const int f = w.acct.gfcf;
  if (f < 0 || !budget.positive()) return {};
  double goodsWeight = 0;
  for (int a : w.acct.sector) goodsWeight += w.gfcf.weight(a);
  if (!(goodsWeight > 0)) return {};
  Money total;
  for (int s = 0; s < w.n_sectors(); ++s) {
    const int a = w.acct.sector[static_cast<std::size_t>(s)];
    const double wt = w.gfcf.weight(a);
    if (wt <= 0) continue;
    const Money spent = purchase(w, b, s, Money::from_units(budget.units() * wt), f, FlowKind::Gfcf,
                                 signalCap.ticks() == std::numeric_limits<std::int64_t>::max()
                                     ? signalCap
                                     : Money::from_units(signalCap.units() * wt));
    if (!spent.positive()) continue;
    Money booked = spent;
    for (int t : w.acct.tax) {
      const Money tax = Money::from_units(spent.units() * w.gfcf.weight(t) / goodsWeight);
      pay_tax(w, b.holder, t, f, tax);
      booked += tax;
    }
    note(w, f, b.account, booked, FlowKind::Gfcf);
    total += booked;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Firms

void fire_to(World& w, Firm& f, std::size_t keep) {
  while (f.employees.size() > keep) {
    const int id = f.employees.back();
    if (id == f.owner) break;
    hh(w, id).employer = kNone;
    f.employees.pop_back();
  }
}

void collect_unemployed(World& w, Location loc, std::vector<int>& out) {
  w.householdIndex.query(loc, 0, w.cfg.radius, w.cfg.radiusExpansions, w.householdLocs,
                         [&](int id) { return w.households[static_cast<std::size_t>(id)].employer == kNone; }, out);
}

void firm_produce(World& w, Firm& f) {
  const auto& cfg = w.cfg;
  const int s = f.sector;
  const double wage = w.wage.units();
  const double ls = w.coeffs.laborShare(s);
  f.produced = false;
  f.taxDue.assign(w.acct.tax.size(), 0.0);

  const double units = plan_production(f, cfg.demandWindow, cfg.stockBuffer, f.seedOutput);
  auto req = input_requirements(s, units, w.coeffs, wage, cfg.productionMode, f.askPrice);
  int target = units > 0 ? std::max(1, req.laborHeadcount) : 0;
  if (ls <= 1e-9 && units > 0) target = 1;

  // labor
  const auto have = static_cast<int>(f.employees.size());
  if (target > have) {
    static thread_local std::vector<int> pool;
    collect_unemployed(w, f.loc, pool);
    for (int id : labor_match(target - have, pool, w.rng[Stream::Labor])) {
      hh(w, id).employer = f.id;
      f.employees.push_back(id);
    }
    target = static_cast<int>(f.employees.size());
  }
  if (target == 0) {
    fire_to(w, f, 1);
    return;
  }

  // the whole headcount works: output is the capacity of the integer workforce
  auto value_for = [&](int heads) { return ls > 1e-9 ? heads * wage / ls : units * f.askPrice; };
  double value = value_for(target);
  req = input_requirements(s, value / f.askPrice, w.coeffs, wage, cfg.productionMode, f.askPrice);
  double cost = req.icValue.sum() + req.importValue + target * wage + req.taxProvision;

  // inputs are paid now; wages and taxes fall due at month end
  double outlay = req.icValue.sum() + req.importValue;
  const double need = outlay - f.paymentAccount.units();
  if (need > 0 && !request_credit(w, f, Money::from_units(need))) {
    const double affordable = value * std::max(0.0, f.paymentAccount.units()) / outlay;
    target = ls > 1e-9 ? std::min(target, static_cast<int>(std::floor(affordable * ls / wage))) : 0;
    if (target <= 0) {
      fire_to(w, f, 1);
      return;
    }
    value = value_for(target);
    req = input_requirements(s, value / f.askPrice, w.coeffs, wage, cfg.productionMode, f.askPrice);
    cost = req.icValue.sum() + req.importValue + target * wage + req.taxProvision;
  }
  fire_to(w, f, static_cast<std::size_t>(target));

  // intermediate inputs from other firms, imports from abroad
  const int col = w.acct.sector[static_cast<std::size_t>(s)];
  Buyer buyer{firm_holder(f.id), col, f.loc, &f.inputBuyerPrice, f.id};
  for (int i = 0; i < w.n_sectors(); ++i) {
    const double r = req.icValue(i);
    if (r <= 0) continue;
    auto& inv = f.inputInventory[static_cast<std::size_t>(i)];
    const Money budget = Money::from_units(std::max(0.0, r - inv));
    const Money spent = purchase(w, buyer, i, min(budget, f.paymentAccount), col, FlowKind::Intermediate);
    f.icCost += spent;
    inv = std::max(0.0, inv + spent.units() - r);
  }
  if (req.importValue > 0 && w.acct.external >= 0) {
    const Money imp = min(Money::from_units(req.importValue), f.paymentAccount);
    pay(w, firm_holder(f.id), kExt, imp, FlowKind::Import, w.acct.external, col);
    f.importCost += imp;
  }

  const double produced = value / f.askPrice;
  f.goodsInventory += produced;
  f.inventoryValue += cost;
  f.outputUnits += produced;
  f.outputValue += value;
  for (std::size_t t = 0; t < f.taxDue.size(); ++t) f.taxDue[t] = req.taxBySlot(static_cast<Eigen::Index>(t));
  f.produced = true;
}

// ---------------------------------------------------------------------------
// Households

double household_goods_budget(const World& w, const Household& h, double sumIncome) {
  if (w.deploying) {
    const double share = sumIncome > 0 ? h.incomeAvg / sumIncome : 1.0 / static_cast<double>(w.households.size());
    return w.beta * w.hhGoodsTarget * share;
  }
  const double outlay =
      consumption_budget(h.incomeAvg, household_wealth(w, h), w.cfg.kappa, w.cfg.phi, w.beta);
  return outlay / (1.0 + w.taxRates.householdProducts);
}

void household_shop(World& w, Household& h, double sumIncome) {
  const double vat = w.taxRates.householdProducts;
  double goods = household_goods_budget(w, h, sumIncome);
  const double avail = h.cash.units() + h.deposits.units() - 1e-4;
  goods = std::clamp(goods, 0.0, std::max(0.0, avail) / (1.0 + std::max(0.0, vat)));
  if (goods <= 0) return;
  ensure_household_cash(w, h, Money::from_units(goods * (1.0 + std::max(0.0, vat))));
  const int col = w.acct.households;
  Buyer buyer{household_holder(h.id), col, h.loc, &h.buyerPrice, kNone};
  const Money before = h.cash;
  for (int s = 0; s < w.n_sectors(); ++s) {
    const double share = w.targets.consumptionShare(w.acct.sector[static_cast<std::size_t>(s)], col);
    if (share <= 0) continue;
    const Money spent = purchase(w, buyer, s, Money::from_units(goods * share), col, FlowKind::Goods);
    pay_tax(w, buyer.holder, w.acct.productsTax, col, Money::from_units(spent.units() * vat));
  }
  if (w.acct.gfcf >= 0) {
    const double share = w.targets.consumptionShare(w.acct.gfcf, col);
    if (share > 0) {
      const Money booked = purchase_gfcf(w, buyer, Money::from_units(goods * share));
      pay_tax(w, buyer.holder, w.acct.productsTax, col, Money::from_units(booked.units() * vat));
    }
  }
  h.spentMonth += before - h.cash;
}

// ---------------------------------------------------------------------------
// Government and external purchases, spread over the month

Location random_location(World& w) {
  auto& rng = w.rng[Stream::Shopping];
  return {uniform01(rng), uniform01(rng)};
}

/// The day's budget per row is spread over publicRounds shopping rounds at
/// random locations; what is left is carried to the next day.
void public_purchases_day(World& w, Holder holder, int col, const Eigen::VectorXd& target, Eigen::VectorXd& carry,
                          std::vector<double>& prices, double vat) {
  const double days = w.cfg.daysPerMonth;
  const int rounds = w.cfg.publicRounds;
  auto spread = [&](int row, auto&& buy) {
    if (target(row) <= 0) return;
    double left = target(row) / days + carry(row);
    const Money signal = Money::from_units(target(row) / days / rounds);
    for (int k = 0; k < rounds && left > 0; ++k) {
      Buyer buyer{holder, col, random_location(w), &prices, kNone};
      const Money chunk = Money::from_units(left / (rounds - k));
      const Money spent = buy(buyer, chunk, signal);
      pay_tax(w, holder, w.acct.productsTax, col, Money::from_units(spent.units() * vat));
      left -= spent.units();
    }
    carry(row) = left;
  };
  for (int s = 0; s < w.n_sectors(); ++s)
    spread(w.acct.sector[static_cast<std::size_t>(s)], [&](Buyer& b, Money chunk, Money signal) {
      return purchase(w, b, s, chunk, col, FlowKind::Goods, signal);
    });
  if (w.acct.gfcf >= 0)
    spread(w.acct.gfcf, [&](Buyer& b, Money chunk, Money signal) { return purchase_gfcf(w, b, chunk, signal); });
}

// ---------------------------------------------------------------------------
// Month end

Money withholding(World& w, Household& h, int col, Money gross, bool wages) {
  Money withheld;
  if (wages && w.acct.socialSecurityTax >= 0) {
    const Money ss = Money::from_units(gross.units() * w.taxRates.employeeSocialSecurity);
    pay_tax(w, household_holder(h.id), w.acct.socialSecurityTax, col, ss);
    withheld += ss;
  }
  if (w.acct.incomeTax >= 0) {
    const Money it = Money::from_units(gross.units() * w.taxRates.income);
    pay_tax(w, household_holder(h.id), w.acct.incomeTax, col, it);
    withheld += it;
  }
  return withheld;
}

void pay_wages(World& w) {
  const int hcol = w.acct.households;
  for (auto& f : w.firms) {
    if (!f.alive || !f.produced) continue;
    const int col = w.acct.sector[static_cast<std::size_t>(f.sector)];
    for (int id : f.employees) {
      const Money paid = firm_pay(w, f, household_holder(id), w.wage, FlowKind::Wage, w.acct.labor, col);
      if (!paid.positive()) continue;
      note(w, hcol, w.acct.labor, paid, FlowKind::Wage);
      f.wageCost += paid;
      Household& h = hh(w, id);
      h.incomeMonth += paid - withholding(w, h, hcol, paid, true);
    }
  }
}

void service_loans(World& w, Firm& f) {
  const std::size_t n = f.loans.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Loan l = f.loans[i];
    if (!l.principal.positive() || l.monthsLeft <= 0 || l.grantedMonth == w.month + 1) continue;
    const Money interest = Money::from_units(l.principal.units() * l.monthlyRate);
    const Money principal = l.monthsLeft <= 1 ? l.principal
                                              : min(l.principal, Money::from_ticks(l.original.ticks() / w.cfg.loanTerm));
    const Holder lender = l.lender == kCentralBankLender ? kCb : bank_holder(l.lender);
    const Money paidInterest = firm_pay(w, f, lender, interest, FlowKind::Interest);
    f.interestCost += paidInterest;
    const Money paidPrincipal = firm_pay(w, f, lender, principal, FlowKind::LoanRepayment);
    Loan& cur = f.loans[i];
    cur.principal -= paidPrincipal;
    --cur.monthsLeft;
    if (cur.monthsLeft <= 0 && cur.principal.positive()) cur.monthsLeft = 1;
    if (l.lender == kCentralBankLender) {
      w.cb.firmLoans -= paidPrincipal;
      pay(w, kCb, kGov, paidInterest, FlowKind::Remittance);
    } else {
      Bank& b = w.banks[static_cast<std::size_t>(l.lender)];
      b.loanBook -= paidPrincipal;
      b.incomeMonth += paidInterest;
    }
  }
  std::erase_if(f.loans, [](const Loan& l) { return !l.principal.positive(); });
}

/// Early repayment, oldest loan first. Returns the amount repaid.
Money prepay_loans(World& w, Firm& f, Money amount) {
  Money repaid;
  for (auto& l : f.loans) {
    const Money part = min(min(l.principal, amount - repaid), f.paymentAccount);
    if (!part.positive()) break;
    const Holder lender = l.lender == kCentralBankLender ? kCb : bank_holder(l.lender);
    pay(w, firm_holder(f.id), lender, part, FlowKind::LoanRepayment);
    l.principal -= part;
    if (l.lender == kCentralBankLender) w.cb.firmLoans -= part;
    else w.banks[static_cast<std::size_t>(l.lender)].loanBook -= part;
    repaid += part;
  }
  std::erase_if(f.loans, [](const Loan& l) { return !l.principal.positive(); });
  return repaid;
}

void pay_dividend(World& w, Firm& f, int householdId, Money amount) {
  const int hcol = w.acct.households;
  const Money paid = min(amount, f.paymentAccount);
  if (!paid.positive()) return;
  pay(w, firm_holder(f.id), household_holder(householdId), paid, FlowKind::Dividend, hcol, w.acct.capital);
  Household& h = hh(w, householdId);
  h.incomeMonth += paid - withholding(w, h, hcol, paid, false);
}

void distribute(World& w, Firm& f, double amount) {
  if (amount <= 0) return;
  std::vector<double> holdings;
  std::vector<int> holders;
  if (f.listed && !f.shareholders.empty()) {
    for (const auto& s : f.shareholders) {
      holders.push_back(s.household);
      holdings.push_back(s.quantity);
    }
  } else {
    holders.push_back(f.owner);
    holdings.push_back(1.0);
  }
  const auto d = distribute_profits(amount, 1.0, holdings);
  for (std::size_t i = 0; i < holders.size(); ++i)
    pay_dividend(w, f, holders[i], Money::from_units(d.dividends[i]));
}

void firm_month_end(World& w, Firm& f) {
  const int col = w.acct.sector[static_cast<std::size_t>(f.sector)];
  service_loans(w, f);
  const Money operatingCost = f.icCost + f.importCost + f.wageCost + f.taxCost;
  note(w, w.acct.capital, col, f.revenue - operatingCost, FlowKind::Surplus);
  f.grossSurplus = f.revenue - operatingCost;
  f.profit = f.revenue - Money::from_units(f.cogs) - f.interestCost;
  f.costAvg = f.costAvg > 0 ? 0.5 * f.costAvg + 0.5 * operatingCost.units() : operatingCost.units();

  double payout = f.profit.positive() ? w.cfg.dividendFraction * f.profit.units() : 0.0;
  payout = std::min(payout, std::max(0.0, f.paymentAccount.units()));
  // cash above the buffer repays debt first, then goes to the owners
  const double excess = f.paymentAccount.units() - payout - w.cfg.cashBufferMonths * f.costAvg;
  if (excess > 0) payout += std::max(0.0, excess - prepay_loans(w, f, Money::from_units(excess)).units());
  distribute(w, f, payout);

  f.demandHistory.push_back(f.salesUnits + f.stockoutUnits);
  f.profitHistory.push_back(f.profit.units());
  constexpr std::size_t kKeep = 24;
  if (f.demandHistory.size() > kKeep) f.demandHistory.erase(f.demandHistory.begin());
  if (f.profitHistory.size() > kKeep) f.profitHistory.erase(f.profitHistory.begin());
  f.idleMonths = (f.outputUnits > 0 || f.salesUnits > 0) ? 0 : f.idleMonths + 1;
}

void banks_month_end(World& w) {
  for (auto& b : w.banks) {
    const Money floor = Money::from_units(w.cfg.rrr * b.deposits.units());
    if (b.cbDebt.positive() && b.reserves > floor) {
      const Money repay = min(b.cbDebt, b.reserves - floor);
      pay(w, bank_holder(b.id), kCb, repay, FlowKind::CbAdvance);
      b.cbDebt -= repay;
      w.cb.bankAdvances -= repay;
    }
    // dividends only out of capital above the adequacy requirement
    const Money income = b.incomeMonth - b.lossesMonth;
    const Money excess = b.equity() - Money::from_units(w.cfg.car * b.loanBook.units());
    if (income.positive() && b.owner != kNone && excess.positive()) {
      Money div = min(Money::from_units(w.cfg.dividendFraction * income.units()), excess);
      div = min(div, b.reserves - floor);
      if (div.positive()) {
        const int hcol = w.acct.households;
        pay(w, bank_holder(b.id), household_holder(b.owner), div, FlowKind::Dividend, hcol, w.acct.capital);
        Household& h = hh(w, b.owner);
        h.incomeMonth += div - withholding(w, h, hcol, div, false);
      }
    }
  }
}

void household_portfolios(World& w) {
  for (auto& h : w.households) {
    const double surplus = h.incomeMonth.units() - h.spentMonth.units();
    const auto split = portfolio_split(surplus, w.cfg.depositFraction);
    if (split.depositDelta > 0 && !w.banks.empty()) deposit(w, h, Money::from_units(split.depositDelta));
    h.equityBudget = min(Money::from_units(split.equityBudget), h.cash);

    h.incomeHistory.push_back(h.incomeMonth.units());
    if (static_cast<int>(h.incomeHistory.size()) > w.cfg.incomeWindow) h.incomeHistory.erase(h.incomeHistory.begin());
    h.incomeAvg = std::accumulate(h.incomeHistory.begin(), h.incomeHistory.end(), 0.0) /
                  static_cast<double>(h.incomeHistory.size());
  }
}

void add_shares(World& w, Firm& f, int householdId, double qty) {
  auto& reg = f.shareholders;
  auto it = std::find_if(reg.begin(), reg.end(), [&](const Holding& x) { return x.household == householdId; });
  if (it == reg.end()) reg.push_back({householdId, qty});
  else it->quantity += qty;
  auto& own = hh(w, householdId).shares;
  auto jt = std::find_if(own.begin(), own.end(), [&](const ShareHolding& x) { return x.firm == f.id; });
  if (jt == own.end()) own.push_back({f.id, qty});
  else jt->quantity += qty;
}

void equity_market(World& w) {
  std::vector<int> listed;
  for (const auto& f : w.firms)
    if (f.alive && f.listed) listed.push_back(f.id);
  if (listed.empty()) return;
  std::vector<EquityOrder> orders;
  std::int64_t arrival = 0;
  auto& rng = w.rng[Stream::Market];
  std::uniform_int_distribution<std::size_t> pickFirm(0, listed.size() - 1);
  for (auto& h : w.households) {
    if (!h.equityBudget.positive()) continue;
    const Firm& f = firm(w, listed[pickFirm(rng)]);
    const double limit = f.sharePrice * h.equityReservation;
    if (!(limit > 0)) continue;
    orders.push_back({Side::Buy, f.id, limit, h.equityBudget.units() / limit, h.id, arrival++});
  }
  for (int id : listed) {
    const Firm& f = firm(w, id);
    if (!f.fundingGap.positive() || !(f.shareAsk > 0)) continue;
    orders.push_back({Side::Sell, f.id, f.shareAsk, f.fundingGap.units() / f.shareAsk, kNone, arrival++});
  }
  const auto res = clearing_house(orders);
  for (const auto& t : res.trades) {
    const auto& buy = orders[t.buyOrder];
    Firm& f = firm(w, t.firmId);
    Household& h = hh(w, buy.agentId);
    Money cost = min(Money::from_units(t.price * t.quantity), h.cash);
    if (!cost.positive()) continue;
    pay(w, household_holder(h.id), firm_holder(f.id), cost, FlowKind::Equity);
    const double qty = cost.units() / t.price;
    add_shares(w, f, h.id, qty);
    f.sharesOutstanding += qty;
  }
  for (const auto& [id, price] : res.lastPrice) firm(w, id).sharePrice = price;

  // reservation updates, only where the other side of the book was present
  std::vector<char> hasBuy(w.firms.size(), 0), hasSell(w.firms.size(), 0);
  for (const auto& o : orders) (o.side == Side::Buy ? hasBuy : hasSell)[static_cast<std::size_t>(o.firmId)] = 1;
  const double eps = w.cfg.equityEpsilon;
  for (std::size_t i = 0; i < orders.size(); ++i) {
    const auto& o = orders[i];
    const bool filled = res.filled[i] > 0;
    if (o.side == Side::Buy) {
      if (!hasSell[static_cast<std::size_t>(o.firmId)]) continue;
      hh(w, o.agentId).equityReservation *= filled ? (1.0 - eps) : (1.0 + eps);
    } else {
      if (!hasBuy[static_cast<std::size_t>(o.firmId)]) continue;
      firm(w, o.firmId).shareAsk *= filled ? (1.0 + eps) : (1.0 - eps);
    }
  }
}

void liquidate(World& w, Firm& f) {
  for (int id : f.employees) hh(w, id).employer = kNone;
  f.employees.clear();
  if (f.owner != kNone) hh(w, f.owner).ownedFirm = kNone;
  f.goodsInventory = 0;
  f.inventoryValue = 0;
  std::fill(f.inputInventory.begin(), f.inputInventory.end(), 0.0);

  const Money debt = f.debt();
  const Money cash = max(f.paymentAccount, Money{});
  for (auto& l : f.loans) {
    Money repay = l.principal;
    if (debt > cash) repay = Money::from_ticks(static_cast<std::int64_t>(
                         static_cast<long double>(cash.ticks()) * l.principal.ticks() / debt.ticks()));
    repay = min(repay, f.paymentAccount);
    const Holder lender = l.lender == kCentralBankLender ? kCb : bank_holder(l.lender);
    if (repay.positive()) pay(w, firm_holder(f.id), lender, repay, FlowKind::LoanRepayment);
    const Money lost = l.principal - repay;
    if (l.lender == kCentralBankLender) {
      w.cb.firmLoans -= l.principal;
    } else {
      Bank& b = w.banks[static_cast<std::size_t>(l.lender)];
      b.loanBook -= l.principal;
      b.lossesMonth += lost;
    }
  }
  f.loans.clear();

  // residual cash to the owners
  if (f.paymentAccount.positive()) {
    std::vector<int> holders;
    std::vector<double> qty;
    if (f.listed && !f.shareholders.empty()) {
      for (const auto& s : f.shareholders) {
        holders.push_back(s.household);
        qty.push_back(s.quantity);
      }
    } else {
      holders.push_back(f.owner);
      qty.push_back(1.0);
    }
    const double total = std::accumulate(qty.begin(), qty.end(), 0.0);
    const Money pool = f.paymentAccount;
    Money paid;
    for (std::size_t i = 0; i < holders.size(); ++i) {
      Money part = i + 1 == holders.size() ? pool - paid : Money::from_units(pool.units() * qty[i] / total);
      part = min(part, f.paymentAccount);
      if (part.positive()) pay(w, firm_holder(f.id), household_holder(holders[i]), part, FlowKind::Liquidation);
      paid += part;
    }
  }
  for (const auto& s : f.shareholders) {
    auto& own = hh(w, s.household).shares;
    std::erase_if(own, [&](const ShareHolding& x) { return x.firm == f.id; });
  }
  f.shareholders.clear();
  f.sharePrice = 0;
  f.alive = false;
}

void firm_exits(World& w) {
  for (auto& f : w.firms) {
    if (!f.alive) continue;
    if (firm_exit_check(f, w.cfg.lossMonths, w.cfg.exitMinNetWorth) || f.idleMonths >= w.cfg.lossMonths)
      liquidate(w, f);
  }
}

void found_firm(World& w, Household& h, int sector, double seedValue) {
  if (h.employer != kNone) {
    Firm& old = firm(w, h.employer);
    std::erase(old.employees, h.id);
    h.employer = kNone;
  }
  Firm f;
  f.id = static_cast<int>(w.firms.size());
  f.owner = h.id;
  f.sector = sector;
  f.loc = h.loc;
  f.productionDay = std::uniform_int_distribution<int>(1, w.cfg.daysPerMonth)(w.rng[Stream::Schedule]);
  f.askPrice = 1.0;
  f.inputInventory.assign(static_cast<std::size_t>(w.n_sectors()), 0.0);
  f.inputBuyerPrice.assign(static_cast<std::size_t>(w.n_sectors()), 1.0);
  f.employees.push_back(h.id);
  f.seedOutput = seedValue;
  f.foundedMonth = w.month + 1;
  f.taxDue.assign(w.acct.tax.size(), 0.0);
  w.firms.push_back(std::move(f));
  w.firmLocs.push_back(h.loc);
  h.employer = w.firms.back().id;
  h.ownedFirm = w.firms.back().id;
  const Money capital = min(Money::from_units(w.cfg.startupCash), h.cash + h.deposits);
  ensure_household_cash(w, h, capital);
  pay(w, household_holder(h.id), firm_holder(h.ownedFirm), min(capital, h.cash), FlowKind::StartupCapital);
}

void firm_entries(World& w) {
  auto& rng = w.rng[Stream::Entry];
  const int ns = w.n_sectors();
  std::vector<double> counts(static_cast<std::size_t>(ns));
  for (auto& h : w.households) {
    if (h.ownedFirm != kNone) continue;
    // draw first so the stream position does not depend on the signal
    const double draw = uniform01(rng);
    if (draw >= w.cfg.pOpen) continue;
    const Eigen::VectorXd local = w.unmet.around(h.loc);
    for (int s = 0; s < ns; ++s) counts[static_cast<std::size_t>(s)] = std::floor(local(s) / w.minFirmValue(s));
    std::mt19937_64 certain(0);
    const auto sector = firm_entry_decision(false, counts, 1.0, certain);
    if (!sector) continue;
    const double seed = local(*sector);
    w.unmet.consume(h.loc, *sector, seed);
    found_firm(w, h, *sector, seed);
  }
}

void found_bank(World& w) {
  if (static_cast<int>(w.banks.size()) >= w.cfg.maxBanks) return;
  CentralBank view = w.cb;
  view.bankMinNetWorth = w.cfg.bankMinNetWorth;
  view.maxBanks = w.cfg.maxBanks;
  std::vector<int> order(w.households.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), w.rng[Stream::Misc]);
  for (int id : order) {
    Household& h = hh(w, id);
    if (h.ownedBank != kNone) continue;
    if (!bank_founding_check(household_wealth(w, h), view, static_cast<int>(w.banks.size()))) continue;
    Bank b;
    b.id = static_cast<int>(w.banks.size());
    b.owner = h.id;
    w.banks.push_back(b);
    h.ownedBank = b.id;
    const Money capital = Money::from_units(w.cfg.bankCapitalFraction * (h.cash + h.deposits).units());
    ensure_household_cash(w, h, capital);
    pay(w, household_holder(h.id), bank_holder(b.id), min(capital, h.cash), FlowKind::BankCapital);
    return;
  }
}

void list_firms(World& w) {
  for (auto& f : w.firms) {
    if (!f.alive || f.listed) continue;
    const double nw = f.net_worth();
    if (!stockmarket_entry_check(nw, w.cfg.listingThreshold, false)) continue;
    f.listed = true;
    f.sharesOutstanding = w.cfg.initialShares;
    f.sharePrice = nw / w.cfg.initialShares;
    f.shareAsk = f.sharePrice;
    add_shares(w, f, f.owner, w.cfg.initialShares);
  }
}

double column_sum(const World& w, int col, bool finalDemandRowsOnly) {
  const auto& m = w.ledger.current_flows();
  std::int64_t t = 0;
  for (int r = 0; r < w.sam.nAccounts; ++r) {
    const auto role = w.sam.roles[static_cast<std::size_t>(r)];
    if (finalDemandRowsOnly && role != AccountRole::Producer && role != AccountRole::Gfcf) continue;
    t += m(r, col);
  }
  return static_cast<double>(t) / static_cast<double>(Money::kTicksPerUnit);
}

TimeSeriesRow snapshot_row(const World& w) {
  TimeSeriesRow r;
  r.month = w.month;
  r.employees.assign(static_cast<std::size_t>(w.n_sectors()), 0);
  std::size_t unemployed = 0;
  for (const auto& h : w.households) unemployed += h.employer == kNone;
  r.unemploymentPct = w.households.empty() ? 0.0 : 100.0 * static_cast<double>(unemployed) / w.households.size();
  double askSum = 0;
  for (const auto& f : w.firms) {
    if (!f.alive) continue;
    ++r.firms;
    r.employees[static_cast<std::size_t>(f.sector)] += static_cast<int>(f.employees.size());
    r.invGoods += f.inventoryValue;
    r.invInputs += f.inputInventoryUnits();
    askSum += f.askPrice;
  }
  r.meanAsk = r.firms > 0 ? askSum / r.firms : 1.0;
  for (const auto& h : w.households) r.hhWealth += household_wealth(w, h);
  r.banks = static_cast<int>(w.banks.size());
  r.beta = w.beta;
  return r;
}

void reset_month(World& w) {
  for (auto& f : w.firms) {
    f.produced = false;
    f.salesUnits = f.stockoutUnits = f.outputUnits = f.outputValue = f.cogs = 0;
    f.revenue = f.icCost = f.importCost = f.wageCost = f.taxCost = f.interestCost = f.fundingGap = Money{};
    f.grossSurplus = f.profit = Money{};
  }
  for (auto& h : w.households) {
    h.incomeMonth = h.spentMonth = Money{};
    h.equityBudget = Money{};
  }
  for (auto& b : w.banks) b.incomeMonth = b.lossesMonth = Money{};
  w.gov.carry.setZero(w.sam.nAccounts);
  w.ext.carry.setZero(w.sam.nAccounts);
  w.gov.consumptionMonth = w.ext.consumptionMonth = Money{};
  w.unmet.reset();
  w.firmIndex.clear();
  for (const auto& f : w.firms)
    if (f.alive) w.firmIndex.insert(f.id, f.loc, f.sector);
}

}  // namespace

// ---------------------------------------------------------------------------
// Public operations

World init_world(const SamTable& sam, const SimConfig& cfg) {
  validate_config(cfg);
  if (sam.sectors().empty()) throw std::invalid_argument("SAM has no producing sectors");
  World w;
  w.sam = sam;
  w.cfg = cfg;
  w.rng.reseed(cfg.seed);
  w.ledger = Ledger(sam.nAccounts);
  derive(w);

  const int ns = w.n_sectors();
  const double vat = w.taxRates.householdProducts;
  const double cash0 = cfg.initialCashMonths * w.hhGoodsTarget * (1.0 + vat) / cfg.nSimAgents;
  auto& place = w.rng[Stream::Placement];
  std::uniform_int_distribution<int> day(1, cfg.daysPerMonth);
  w.households.resize(static_cast<std::size_t>(cfg.nSimAgents));
  for (int i = 0; i < cfg.nSimAgents; ++i) {
    Household& h = w.households[static_cast<std::size_t>(i)];
    h.id = i;
    h.loc = {uniform01(place), uniform01(place)};
    h.buyDay = day(w.rng[Stream::Schedule]);
    h.cash = Money::from_units(cash0);
    h.buyerPrice.assign(static_cast<std::size_t>(ns), 1.0);
  }
  w.gov.purchaseTarget = w.govTarget;
  w.gov.subsidyBudget = w.subsidyBudget;
  w.gov.buyerPrice.assign(static_cast<std::size_t>(ns), 1.0);
  w.gov.carry.setZero(sam.nAccounts);
  w.gov.taxReceiptsMonth.setZero(static_cast<Eigen::Index>(w.acct.tax.size()));
  w.cb.policyRate = cfg.r0;
  w.cb.bankMinNetWorth = cfg.bankMinNetWorth;
  w.cb.maxBanks = cfg.maxBanks;
  w.ext.purchaseTarget = w.extTarget;
  w.ext.householdTransfer = w.externalTransfer;
  w.ext.buyerPrice.assign(static_cast<std::size_t>(ns), 1.0);
  w.ext.carry.setZero(sam.nAccounts);
  derive(w);
  w.history.push_back(snapshot_row(w));
  return w;
}

double deployment_adjust(World& w, double realized) {
  if (!w.deploying) return w.beta;
  if (realized > 0) {
    const double d = w.cfg.betaDamping;
    w.beta *= std::clamp(w.hhGoodsTarget / realized, 1.0 - d, 1.0 + d);
    w.beta = std::clamp(w.beta, w.cfg.betaMin, w.cfg.betaMax);
  }
  if (w.month + 1 >= w.cfg.deploymentMonths) w.deploying = false;
  return w.beta;
}

void government_month(World& w) {
  for (auto& f : w.firms) {
    if (!f.alive) continue;
    const int col = w.acct.sector[static_cast<std::size_t>(f.sector)];
    for (std::size_t t = 0; t < f.taxDue.size(); ++t) {
      const Money due = Money::from_units(f.taxDue[t]);
      if (due.ticks() == 0) continue;
      const int acc = w.acct.tax[t];
      const Money paid = firm_pay(w, f, kGov, due, FlowKind::Tax, acc, col);
      note(w, w.acct.government, acc, paid, FlowKind::TaxRemit);
      f.taxCost += paid;
      w.gov.taxReceiptsMonth(static_cast<Eigen::Index>(t)) += paid.units();
    }
    std::fill(f.taxDue.begin(), f.taxDue.end(), 0.0);
  }
  std::vector<int> unemployed;
  for (const auto& h : w.households)
    if (h.employer == kNone) unemployed.push_back(h.id);
  if (unemployed.empty()) {
    w.gov.undisbursedSubsidies += w.subsidyBudget;
    return;
  }
  const Money each = Money::from_ticks(w.subsidyBudget.ticks() / static_cast<std::int64_t>(unemployed.size()));
  for (int id : unemployed) {
    pay(w, kGov, household_holder(id), each, FlowKind::Subsidy, w.acct.households, w.acct.government);
    hh(w, id).incomeMonth += each;
  }
}

void external_month(World& w) {
  if (w.acct.external < 0 || w.households.empty() || !w.externalTransfer.positive()) return;
  const Money each = Money::from_ticks(w.externalTransfer.ticks() / static_cast<std::int64_t>(w.households.size()));
  for (auto& h : w.households) {
    pay(w, kExt, household_holder(h.id), each, FlowKind::Transfer, w.acct.households, w.acct.external);
    h.incomeMonth += each;
  }
}

void step_month(World& w) {
  const auto startBalances = class_balances(w);
  w.ledger.begin_month(w.month + 1);
  reset_month(w);

  const int days = w.cfg.daysPerMonth;
  std::vector<std::vector<int>> firmDays(static_cast<std::size_t>(days) + 1), hhDays(static_cast<std::size_t>(days) + 1);
  for (const auto& f : w.firms)
    if (f.alive) firmDays[static_cast<std::size_t>(f.productionDay)].push_back(f.id);
  for (const auto& h : w.households) hhDays[static_cast<std::size_t>(h.buyDay)].push_back(h.id);
  double sumIncome = 0;
  for (const auto& h : w.households) sumIncome += h.incomeAvg;

  const double govVat = w.taxRates.governmentProducts;
  const double extVat = w.taxRates.externalProducts;
  for (int d = 1; d <= days; ++d) {
    w.day = d;
    for (int id : firmDays[static_cast<std::size_t>(d)]) firm_produce(w, firm(w, id));
    for (int id : hhDays[static_cast<std::size_t>(d)]) household_shop(w, hh(w, id), sumIncome);
    public_purchases_day(w, kGov, w.acct.government, w.govTarget, w.gov.carry, w.gov.buyerPrice, govVat);
    if (w.acct.external >= 0)
      public_purchases_day(w, kExt, w.acct.external, w.extTarget, w.ext.carry, w.ext.buyerPrice, extVat);
  }
  w.day = days + 1;

  for (auto& f : w.firms)
    if (f.alive) ensure_firm_cash(w, f, month_end_obligations(w, f));
  pay_wages(w);
  government_month(w);
  for (auto& f : w.firms)
    if (f.alive) firm_month_end(w, f);
  banks_month_end(w);
  external_month(w);
  household_portfolios(w);
  equity_market(w);
  firm_exits(w);
  firm_entries(w);
  found_bank(w);
  list_firms(w);

  const double realized = column_sum(w, w.acct.households, true);
  w.gov.consumptionMonth = Money::from_units(column_sum(w, w.acct.government, true));
  if (w.acct.external >= 0) w.ext.consumptionMonth = Money::from_units(column_sum(w, w.acct.external, true));
  deployment_adjust(w, realized);

  const auto audit = audit_money(w.ledger, w.month + 1, startBalances, class_balances(w));
  w.auditResidual.push_back(audit.residual());

  ++w.month;
  TimeSeriesRow row = snapshot_row(w);
  row.hhCons = realized;
  row.govCons = w.gov.consumptionMonth.units();
  row.extCons = w.ext.consumptionMonth.units();
  {
    const auto& m = w.ledger.current_flows();
    std::int64_t ic = 0;
    for (int a : w.acct.sector)
      for (int b : w.acct.sector) ic += m(a, b);
    row.icTotal = static_cast<double>(ic) / static_cast<double>(Money::kTicksPerUnit);
  }
  w.history.push_back(std::move(row));
  w.ledger.close_month();
}

void run_until(World& w, int lastMonth, const MonthCallback& onMonth) {
  while (w.month < lastMonth) {
    step_month(w);
    if (onMonth) onMonth(w);
  }
}

World run(const SamTable& sam, const SimConfig& cfg, const MonthCallback& onMonth) {
  World w = init_world(sam, cfg);
  run_until(w, cfg.totalMonths, onMonth);
  return w;
}

}  // namespace abmsam
