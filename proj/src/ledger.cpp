#include "abmsam/ledger.hpp"

#include <openssl/evp.h>

#include <cstring>
#include <limits>
#include <memory>
#include <stdexcept>

namespace abmsam {

const char* to_string(HolderClass c) {
  switch (c) {
    case HolderClass::None: return "none";
    case HolderClass::Household: return "households";
    case HolderClass::Firm: return "firms";
    case HolderClass::Bank: return "banks";
    case HolderClass::Government: return "government";
    case HolderClass::CentralBank: return "central_bank";
    case HolderClass::External: return "external";
  }
  return "?";
}

const char* to_string(FlowKind k) {
  switch (k) {
    case FlowKind::Goods: return "goods";
    case FlowKind::Gfcf: return "gfcf";
    case FlowKind::Intermediate: return "intermediate";
    case FlowKind::Import: return "import";
    case FlowKind::Wage: return "wage";
    case FlowKind::Tax: return "tax";
    case FlowKind::TaxRemit: return "tax_remit";
    case FlowKind::Surplus: return "surplus";
    case FlowKind::Dividend: return "dividend";
    case FlowKind::Subsidy: return "subsidy";
    case FlowKind::Transfer: return "transfer";
    case FlowKind::Interest: return "interest";
    case FlowKind::LoanGrant: return "loan_grant";
    case FlowKind::LoanRepayment: return "loan_repayment";
    case FlowKind::Deposit: return "deposit";
    case FlowKind::Withdrawal: return "withdrawal";
    case FlowKind::BankCapital: return "bank_capital";
    case FlowKind::CbAdvance: return "cb_advance";
    case FlowKind::Equity: return "equity";
    case FlowKind::StartupCapital: return "startup_capital";
    case FlowKind::Liquidation: return "liquidation";
    case FlowKind::Remittance: return "remittance";
    case FlowKind::Count: break;
  }
  return "?";
}

std::string to_hex(const Digest& d) {
  static const char* digits = "0123456789abcdef";
  std::string s;
  s.reserve(64);
  for (auto b : d) {
    s.push_back(digits[b >> 4]);
    s.push_back(digits[b & 15]);
  }
  return s;
}

namespace {

struct EvpDeleter {
  void operator()(EVP_MD_CTX* c) const { EVP_MD_CTX_free(c); }
};

class Sha256 {
public:
  Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1)
      throw std::runtime_error("SHA-256 init failed");
  }
  void update(const void* data, std::size_t n) { EVP_DigestUpdate(ctx_.get(), data, n); }
  Digest finish() {
    Digest d{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_.get(), d.data(), &len);
    return d;
  }

private:
  std::unique_ptr<EVP_MD_CTX, EvpDeleter> ctx_;
};

template <typename T>
void put(std::vector<unsigned char>& buf, T v) {
  unsigned char raw[sizeof(T)];
  std::memcpy(raw, &v, sizeof(T));
  buf.insert(buf.end(), raw, raw + sizeof(T));
}

}  // namespace

Digest sha256(const void* data, std::size_t size) {
  Sha256 h;
  h.update(data, size);
  return h.finish();
}

Ledger::Ledger(int nAccounts) : nAccounts_(nAccounts), current_(MatrixXi64::Zero(nAccounts, nAccounts)) {}

void Ledger::begin_month(int month) {
  openMonth_ = month;
  if (months_.empty()) firstMonth_ = month;
  entries_.clear();
  current_.setZero(nAccounts_, nAccounts_);
  classNet_.fill(0);
  classKindNet_.fill(0);
}

void Ledger::record(const LedgerEntry& e) {
  auto check = [&](int a) {
    if (a < kNoAccount || a >= nAccounts_) throw std::out_of_range("ledger: unknown account " + std::to_string(a));
  };
  check(e.row);
  check(e.col);
  if ((e.row == kNoAccount) != (e.col == kNoAccount))
    throw std::out_of_range("ledger: entry has only one SAM coordinate");
  entries_.push_back(e);
  if (e.row != kNoAccount) current_(e.row, e.col) += e.amount.ticks();
  if (e.moneyMoves) {
    const auto t = e.amount.ticks();
    const auto pe = static_cast<std::size_t>(e.payee.cls);
    const auto pr = static_cast<std::size_t>(e.payer.cls);
    const auto k = static_cast<std::size_t>(e.kind);
    classNet_[pe] += t;
    classNet_[pr] -= t;
    classKindNet_[pe * kFlowKinds + k] += t;
    classKindNet_[pr * kFlowKinds + k] -= t;
  }
}

void Ledger::close_month() {
  std::vector<unsigned char> buf;
  buf.reserve(entries_.size() * 40 + 64);
  buf.insert(buf.end(), hash_.begin(), hash_.end());
  put(buf, static_cast<std::int32_t>(openMonth_));
  for (const auto& e : entries_) {
    put(buf, static_cast<std::int16_t>(e.day));
    put(buf, static_cast<std::int16_t>(e.row));
    put(buf, static_cast<std::int16_t>(e.col));
    put(buf, e.amount.ticks());
    put(buf, static_cast<std::uint8_t>(e.kind));
    put(buf, static_cast<std::uint8_t>(e.payer.cls));
    put(buf, static_cast<std::int32_t>(e.payer.id));
    put(buf, static_cast<std::uint8_t>(e.payee.cls));
    put(buf, static_cast<std::int32_t>(e.payee.id));
    put(buf, static_cast<std::uint8_t>(e.moneyMoves));
  }
  hash_ = sha256(buf.data(), buf.size());
  monthHashes_.push_back(hash_);
  months_.push_back(current_);
  entries_.clear();
}

void Ledger::restore(int firstMonth, std::vector<MatrixXi64> months, std::vector<Digest> hashes, Digest hash) {
  firstMonth_ = firstMonth;
  months_ = std::move(months);
  monthHashes_ = std::move(hashes);
  hash_ = hash;
  entries_.clear();
  current_.setZero(nAccounts_, nAccounts_);
  classNet_.fill(0);
  classKindNet_.fill(0);
}

Eigen::MatrixXd computed_sam(const Ledger& ledger, int endMonth, int window, const ScalePlan& scale) {
  const int n = ledger.n_accounts();
  if (window < 1) throw std::invalid_argument("computed_sam: window must be >= 1");
  if (ledger.monthly_flows().empty()) return Eigen::MatrixXd::Zero(n, n);
  const int first = endMonth - window + 1;
  if (first < ledger.first_month() || endMonth > ledger.last_closed_month())
    throw std::invalid_argument("computed_sam: months " + std::to_string(first) + ".." + std::to_string(endMonth) +
                                " not in the ledger history");
  MatrixXi64 sum = MatrixXi64::Zero(n, n);
  for (int m = first; m <= endMonth; ++m) sum += ledger.monthly_flows()[static_cast<std::size_t>(m - ledger.first_month())];
  Eigen::MatrixXd out = sum.cast<double>() / static_cast<double>(Money::kTicksPerUnit);
  return out.unaryExpr([&](double v) { return scale.to_sam_units(v); });
}

Eigen::MatrixXd compare_sam(const Eigen::MatrixXd& computed, const SamTable& target) {
  if (computed.rows() != target.nAccounts || computed.cols() != target.nAccounts)
    throw std::invalid_argument("compare_sam: shape mismatch");
  Eigen::MatrixXd pct(computed.rows(), computed.cols());
  for (Eigen::Index i = 0; i < pct.rows(); ++i)
    for (Eigen::Index j = 0; j < pct.cols(); ++j) {
      const double t = target.flows(i, j);
      pct(i, j) = t == 0 ? std::numeric_limits<double>::quiet_NaN() : 100.0 * computed(i, j) / t;
    }
  return pct;
}

AuditReport audit_money(const Ledger& ledger, int month, const std::array<std::int64_t, kHolderClasses>& start,
                        const std::array<std::int64_t, kHolderClasses>& end) {
  AuditReport r;
  r.month = month;
  const auto& net = ledger.class_net();
  for (int c = 1; c < kHolderClasses; ++c) {
    const auto cls = static_cast<HolderClass>(c);
    r.classes.push_back({cls, start[static_cast<std::size_t>(c)], end[static_cast<std::size_t>(c)],
                         net[static_cast<std::size_t>(c)]});
  }
  for (auto cls : {HolderClass::Household, HolderClass::Firm, HolderClass::Bank, HolderClass::Government}) {
    const auto c = static_cast<std::size_t>(cls);
    r.domesticChange += end[c] - start[c];
  }
  r.centralBankInjection = -net[static_cast<std::size_t>(HolderClass::CentralBank)];
  r.externalInjection = -net[static_cast<std::size_t>(HolderClass::External)];
  for (int k = 0; k < kFlowKinds; ++k) {
    std::int64_t v = 0;
    for (auto cls : {HolderClass::Household, HolderClass::Firm, HolderClass::Bank, HolderClass::Government})
      v += ledger.class_kind_net(cls, static_cast<FlowKind>(k));
    if (v != 0) r.domesticByKind.emplace_back(static_cast<FlowKind>(k), v);
  }
  return r;
}

}  // namespace abmsam
