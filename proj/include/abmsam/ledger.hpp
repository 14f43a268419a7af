#pragma once

// Double-entry transaction log. Every payment is one entry carrying both the
// SAM coordinates (row = receiving account, column = paying account) and the
// two holders whose balances move. Entries of the open month are kept in
// memory; closed months are folded into per-month flow matrices and a
// chained SHA-256 digest.

#include "abmsam/money.hpp"
#include "abmsam/sam.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace abmsam {

using MatrixXi64 = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

enum class HolderClass : std::uint8_t { None, Household, Firm, Bank, Government, CentralBank, External };
inline constexpr int kHolderClasses = 7;
const char* to_string(HolderClass c);

struct Holder {
  HolderClass cls = HolderClass::None;
  int id = -1;
};

enum class FlowKind : std::uint8_t {
  Goods,
  Gfcf,
  Intermediate,
  Import,
  Wage,
  Tax,
  TaxRemit,
  Surplus,
  Dividend,
  Subsidy,
  Transfer,
  Interest,
  LoanGrant,
  LoanRepayment,
  Deposit,
  Withdrawal,
  BankCapital,
  CbAdvance,
  Equity,
  StartupCapital,
  Liquidation,
  Remittance,
  Count
};
inline constexpr int kFlowKinds = static_cast<int>(FlowKind::Count);
const char* to_string(FlowKind k);

inline constexpr int kNoAccount = -1;

struct LedgerEntry {
  int month = 0;
  int day = 0;
  int row = kNoAccount;  // receiving SAM account, or kNoAccount for financial flows
  int col = kNoAccount;  // paying SAM account
  Money amount;          // signed; a negative amount moves money from payee to payer
  FlowKind kind = FlowKind::Goods;
  Holder payer;
  Holder payee;
  bool moneyMoves = true;  // false for pass-through legs (GFCF, labor, tax remittance, surplus)
};

using Digest = std::array<std::uint8_t, 32>;
std::string to_hex(const Digest& d);
Digest sha256(const void* data, std::size_t size);

class Ledger {
public:
  Ledger() = default;
  explicit Ledger(int nAccounts);

  [[nodiscard]] int n_accounts() const { return nAccounts_; }
  void begin_month(int month);
  /// Throws std::out_of_range on an account outside [kNoAccount, nAccounts).
  void record(const LedgerEntry& e);
  /// Folds the open month into the history and chains its digest.
  void close_month();

  [[nodiscard]] int open_month() const { return openMonth_; }
  [[nodiscard]] const std::vector<LedgerEntry>& entries() const { return entries_; }
  [[nodiscard]] const MatrixXi64& current_flows() const { return current_; }
  /// Closed months, oldest first; monthly_flows()[k] is month first_month() + k.
  [[nodiscard]] const std::vector<MatrixXi64>& monthly_flows() const { return months_; }
  [[nodiscard]] int first_month() const { return firstMonth_; }
  [[nodiscard]] int last_closed_month() const { return firstMonth_ + static_cast<int>(months_.size()) - 1; }
  [[nodiscard]] const Digest& hash() const { return hash_; }
  [[nodiscard]] const std::vector<Digest>& month_hashes() const { return monthHashes_; }

  /// Net money received per holder class in the open month, in ticks.
  [[nodiscard]] const std::array<std::int64_t, kHolderClasses>& class_net() const { return classNet_; }
  /// Net money received per (class, kind) in the open month, in ticks.
  [[nodiscard]] std::int64_t class_kind_net(HolderClass c, FlowKind k) const {
    return classKindNet_[static_cast<std::size_t>(c) * kFlowKinds + static_cast<std::size_t>(k)];
  }

  // restore support
  void restore(int firstMonth, std::vector<MatrixXi64> months, std::vector<Digest> hashes, Digest hash);

private:
  int nAccounts_ = 0;
  int openMonth_ = 0;
  int firstMonth_ = 1;
  std::vector<LedgerEntry> entries_;
  MatrixXi64 current_;
  std::vector<MatrixXi64> months_;
  std::vector<Digest> monthHashes_;
  Digest hash_{};
  std::array<std::int64_t, kHolderClasses> classNet_{};
  std::array<std::int64_t, kHolderClasses * kFlowKinds> classKindNet_{};
};

/// Trailing-window sum of closed months ending at endMonth, converted to SAM
/// units. An empty ledger gives a zero matrix; otherwise throws
/// std::invalid_argument when the window reaches outside the history.
Eigen::MatrixXd computed_sam(const Ledger& ledger, int endMonth, int window, const ScalePlan& scale);

/// 100 * computed / target; NaN where the target is zero.
Eigen::MatrixXd compare_sam(const Eigen::MatrixXd& computed, const SamTable& target);

struct ClassAudit {
  HolderClass cls = HolderClass::None;
  std::int64_t start = 0;
  std::int64_t end = 0;
  std::int64_t ledgerNet = 0;
  [[nodiscard]] std::int64_t residual() const { return end - start - ledgerNet; }
};

struct AuditReport {
  int month = 0;
  std::vector<ClassAudit> classes;
  /// Change of money held by households, firms, banks and government,
  /// and the part explained by central bank and external flows.
  std::int64_t domesticChange = 0;
  std::int64_t centralBankInjection = 0;
  std::int64_t externalInjection = 0;
  std::vector<std::pair<FlowKind, std::int64_t>> domesticByKind;  // nonzero kinds only

  [[nodiscard]] std::int64_t residual() const {
    const std::int64_t d = domesticChange - centralBankInjection - externalInjection;
    std::int64_t r = d < 0 ? -d : d;
    for (const auto& c : classes) r += c.residual() < 0 ? -c.residual() : c.residual();
    return r;
  }
  [[nodiscard]] bool passed() const { return residual() == 0; }
};

/// `start`/`end` are per-class balances in ticks indexed by HolderClass.
AuditReport audit_money(const Ledger& ledger, int month, const std::array<std::int64_t, kHolderClasses>& start,
                        const std::array<std::int64_t, kHolderClasses>& end);

}  // namespace abmsam
