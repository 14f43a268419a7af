#pragma once

// Social accounting matrix: parsed table, balance report and the calibration
// products derived from it (monthly targets, technical coefficients, GFCF
// split weights, agent scaling).

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace abmsam {

class SamError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class AccountRole { Producer, Gfcf, External, Labor, Capital, Tax, Government, Household };

/// Tax accounts are told apart by name so that household-side rates use the
/// right base (wages, wage + capital income, purchases).
enum class TaxKind { SocialSecurity, Production, Products, Income, Other };

AccountRole role_from_name(std::string_view name);
TaxKind tax_kind_from_name(std::string_view name);
const char* to_string(AccountRole role);

template <typename Scalar>
struct BasicSamTable {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  std::string name;
  std::string region;
  int year = 0;
  long long population = 0;
  long long activeCount = 0;
  Scalar initUnempPct = 0;
  int nProducers = 0;  // as declared in the header (producer block width)
  int nAccounts = 0;
  Scalar unitScale = 1;
  std::string unitsLabel;

  std::vector<std::string> accounts;
  std::vector<AccountRole> roles;
  Matrix flows;  // row = seller / receipts, column = buyer / expenditures
  Vector rowSums;
  Vector colSums;

  [[nodiscard]] std::optional<Eigen::Index> index_of(std::string_view account) const {
    for (std::size_t i = 0; i < accounts.size(); ++i)
      if (accounts[i] == account) return static_cast<Eigen::Index>(i);
    return std::nullopt;
  }

  /// Accounts whose role is an activity sector (P*/N* names), in file order.
  [[nodiscard]] std::vector<Eigen::Index> sectors() const { return with_role(AccountRole::Producer); }

  [[nodiscard]] std::vector<Eigen::Index> with_role(AccountRole role) const {
    std::vector<Eigen::Index> out;
    for (std::size_t i = 0; i < roles.size(); ++i)
      if (roles[i] == role) out.push_back(static_cast<Eigen::Index>(i));
    return out;
  }

  [[nodiscard]] std::optional<Eigen::Index> first_with_role(AccountRole role) const {
    for (std::size_t i = 0; i < roles.size(); ++i)
      if (roles[i] == role) return static_cast<Eigen::Index>(i);
    return std::nullopt;
  }

  /// Sum of producer column totals.
  [[nodiscard]] Scalar total_output() const {
    Scalar total = 0;
    for (auto j : sectors()) total += colSums(j);
    return total;
  }
};

using SamTable = BasicSamTable<double>;

SamTable parse_sam(std::string_view fileText);
SamTable read_sam_file(const std::string& path);
/// Writes the text grammar read by parse_sam; numbers use shortest round-trip form.
std::string write_sam(const SamTable& sam);

// ---------------------------------------------------------------------------
// Balance

struct AccountBalance {
  std::string account;
  double rowTotal = 0;
  double colTotal = 0;
  double relImbalance = 0;
};

struct BalanceReport {
  std::vector<AccountBalance> accounts;
  double maxRelImbalance = 0;
  double tolerance = 1e-9;
  [[nodiscard]] bool passed() const { return maxRelImbalance <= tolerance; }
};

template <typename Scalar>
BalanceReport validate_balance(const BasicSamTable<Scalar>& sam, double tolerance = 1e-9) {
  BalanceReport report;
  report.tolerance = tolerance;
  for (int i = 0; i < sam.nAccounts; ++i) {
    AccountBalance b;
    b.account = sam.accounts[static_cast<std::size_t>(i)];
    b.rowTotal = static_cast<double>(sam.rowSums(i));
    b.colTotal = static_cast<double>(sam.colSums(i));
    const double scale = std::max(std::abs(b.rowTotal), std::abs(b.colTotal));
    b.relImbalance = scale > 0 ? std::abs(b.rowTotal - b.colTotal) / scale : 0.0;
    report.maxRelImbalance = std::max(report.maxRelImbalance, b.relImbalance);
    report.accounts.push_back(std::move(b));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Calibration products

template <typename Scalar>
struct BasicMonthlyTargets {
  using Matrix = typename BasicSamTable<Scalar>::Matrix;
  Matrix monthly;          // flows / 12
  Matrix consumptionShare; // per buyer column, normalized over producer + GFCF rows
};
using MonthlyTargets = BasicMonthlyTargets<double>;

template <typename Scalar>
BasicMonthlyTargets<Scalar> monthly_targets(const BasicSamTable<Scalar>& sam) {
  BasicMonthlyTargets<Scalar> t;
  t.monthly = sam.flows / Scalar(12);
  t.consumptionShare = decltype(t.consumptionShare)::Zero(sam.nAccounts, sam.nAccounts);
  for (int j = 0; j < sam.nAccounts; ++j) {
    Scalar denom = 0;
    for (int i = 0; i < sam.nAccounts; ++i) {
      const auto r = sam.roles[static_cast<std::size_t>(i)];
      if (r == AccountRole::Producer || r == AccountRole::Gfcf) denom += sam.flows(i, j);
    }
    if (denom == Scalar(0)) continue;
    for (int i = 0; i < sam.nAccounts; ++i) {
      const auto r = sam.roles[static_cast<std::size_t>(i)];
      if (r == AccountRole::Producer || r == AccountRole::Gfcf)
        t.consumptionShare(i, j) = sam.flows(i, j) / denom;
    }
  }
  return t;
}

/// Column shares of every activity sector. Sector k refers to the k-th
/// producer account (sam.sectors()[k]).
template <typename Scalar>
struct BasicTechnicalCoefficients {
  using Matrix = typename BasicSamTable<Scalar>::Matrix;
  using Vector = typename BasicSamTable<Scalar>::Vector;
  std::vector<Eigen::Index> sectorAccounts;
  std::vector<Eigen::Index> taxAccounts;
  Matrix columnShare;  // nAccounts x nSectors, flows(:, sector) / colSum(sector)
  Matrix icShare;      // nSectors x nSectors, input sector i per unit of output of j
  Vector importShare;
  Vector laborShare;
  Vector surplusShare;
  Matrix taxShares;    // nTax x nSectors

  [[nodiscard]] Eigen::Index n_sectors() const { return static_cast<Eigen::Index>(sectorAccounts.size()); }
  /// Value share of all non-surplus inputs (unit cost at unit price).
  [[nodiscard]] Scalar cost_share(Eigen::Index j) const { return Scalar(1) - surplusShare(j); }
};
using TechnicalCoefficients = BasicTechnicalCoefficients<double>;

template <typename Scalar>
BasicTechnicalCoefficients<Scalar> technical_coefficients(const BasicSamTable<Scalar>& sam) {
  BasicTechnicalCoefficients<Scalar> c;
  c.sectorAccounts = sam.sectors();
  c.taxAccounts = sam.with_role(AccountRole::Tax);
  const auto n = c.n_sectors();
  if (n == 0) throw SamError("SAM has no producer (P*/N*) accounts");
  c.columnShare.setZero(sam.nAccounts, n);
  c.icShare.setZero(n, n);
  c.importShare.setZero(n);
  c.laborShare.setZero(n);
  c.surplusShare.setZero(n);
  c.taxShares.setZero(static_cast<Eigen::Index>(c.taxAccounts.size()), n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto col = c.sectorAccounts[static_cast<std::size_t>(k)];
    const Scalar total = sam.colSums(col);
    if (!(total > Scalar(0)))
      throw SamError("producer column " + sam.accounts[static_cast<std::size_t>(col)] + " has zero total");
    c.columnShare.col(k) = sam.flows.col(col) / total;
  }
  for (Eigen::Index i = 0; i < n; ++i)
    c.icShare.row(i) = c.columnShare.row(c.sectorAccounts[static_cast<std::size_t>(i)]);
  if (auto x = sam.first_with_role(AccountRole::External)) c.importShare = c.columnShare.row(*x).transpose();
  if (auto l = sam.first_with_role(AccountRole::Labor)) c.laborShare = c.columnShare.row(*l).transpose();
  if (auto k = sam.first_with_role(AccountRole::Capital)) c.surplusShare = c.columnShare.row(*k).transpose();
  for (std::size_t t = 0; t < c.taxAccounts.size(); ++t)
    c.taxShares.row(static_cast<Eigen::Index>(t)) = c.columnShare.row(c.taxAccounts[t]);
  return c;
}

template <typename Scalar>
struct BasicGfcfWeights {
  typename BasicSamTable<Scalar>::Vector weight;  // per account row
};
using GfcfWeights = BasicGfcfWeights<double>;

template <typename Scalar>
BasicGfcfWeights<Scalar> gfcf_weights(const BasicSamTable<Scalar>& sam) {
  const auto f = sam.first_with_role(AccountRole::Gfcf);
  if (!f) throw SamError("SAM has no GFCF (F*) account");
  const Scalar total = sam.flows.col(*f).sum();
  if (!(total > Scalar(0))) throw SamError("GFCF column has zero total");
  return {sam.flows.col(*f) / total};
}

struct ScalePlan {
  double agentScale = 1;          // real active individuals per simulated one
  long long nSimAgents = 0;
  double modelUnitInCurrency = 1; // currency value of one model money unit
  double samUnitInCurrency = 1;
  double employedSim = 0;         // initial-employment-consistent simulated workforce
  double monthlyWage = 0;         // per simulated worker, model units

  /// Converts a simulated amount (model units) into SAM units of the real economy.
  [[nodiscard]] double to_sam_units(double modelAmount) const {
    return modelAmount * modelUnitInCurrency * agentScale / samUnitInCurrency;
  }
  /// Converts a real-economy SAM amount into the simulated amount in model units.
  [[nodiscard]] double to_model_units(double samAmount) const {
    return samAmount * samUnitInCurrency / (agentScale * modelUnitInCurrency);
  }
};

ScalePlan scale_factors(const SamTable& sam, long long nSimAgents);

}  // namespace abmsam
