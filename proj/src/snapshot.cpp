#include "abmsam/snapshot.hpp"

#include "abmsam/config.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace nlohmann {

template <>
struct adl_serializer<Eigen::VectorXd> {
  static void to_json(json& j, const Eigen::VectorXd& v) { j = std::vector<double>(v.data(), v.data() + v.size()); }
  static void from_json(const json& j, Eigen::VectorXd& v) {
    const auto values = j.get<std::vector<double>>();
    v = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  }
};

}  // namespace nlohmann

namespace abmsam {

using nlohmann::json;

void to_json(json& j, const Money& m) { j = m.ticks(); }
void from_json(const json& j, Money& m) { m = Money::from_ticks(j.get<std::int64_t>()); }

void to_json(json& j, const Location& p) { j = json::array({p.x, p.y}); }
void from_json(const json& j, Location& p) {
  p.x = j.at(0).get<double>();
  p.y = j.at(1).get<double>();
}

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ShareHolding, firm, quantity)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Holding, household, quantity)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Household, id, loc, buyDay, employer, wageMonthly, cash, deposits, bank, shares,
                                   buyerPrice, equityReservation, incomeHistory, incomeAvg, consumptionBudget,
                                   equityBudget, ownedFirm, ownedBank, incomeMonth, spentMonth)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Loan, lender, principal, original, monthlyRate, monthsLeft, grantedMonth)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Firm, id, owner, sector, loc, productionDay, askPrice, goodsInventory,
                                   inventoryValue, inputInventory, inputBuyerPrice, employees, paymentAccount, bank,
                                   loans, listed, sharesOutstanding, sharePrice, shareAsk, shareholders,
                                   demandHistory, profitHistory, seedOutput, costAvg, idleMonths, foundedMonth, alive,
                                   soldOutDay, produced, taxDue, salesUnits, stockoutUnits, outputUnits, revenue,
                                   icCost, importCost, wageCost, taxCost, interestCost, cogs, fundingGap, outputValue,
                                   grossSurplus, profit)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Bank, id, owner, reserves, deposits, loanBook, cbDebt, incomeMonth, lossesMonth)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Government, balance, purchaseTarget, subsidyBudget, buyerPrice, carry,
                                   taxReceiptsMonth, consumptionMonth, undisbursedSubsidies)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(CentralBank, balance, policyRate, bankMinNetWorth, maxBanks, firmLoans,
                                   bankAdvances)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ExternalSector, purchaseTarget, householdTransfer, importPrice, buyerPrice, carry,
                                   netFlow, consumptionMonth)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(TimeSeriesRow, month, unemploymentPct, employees, hhCons, govCons, extCons,
                                   icTotal, invGoods, invInputs, hhWealth, firms, banks, beta, meanAsk)

namespace {

constexpr const char* kMagic = "abmsam-snapshot";

json matrix_json(const MatrixXi64& m) {
  std::vector<std::int64_t> flat;
  flat.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index k = 0; k < m.cols(); ++k) flat.push_back(m(i, k));
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"cells", flat}};
}

MatrixXi64 matrix_from(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto flat = j.at("cells").get<std::vector<std::int64_t>>();
  if (static_cast<Eigen::Index>(flat.size()) != rows * cols) throw SnapshotError("snapshot: matrix size mismatch");
  MatrixXi64 m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = flat[static_cast<std::size_t>(i * cols + k)];
  return m;
}

Digest digest_from_hex(const std::string& hex) {
  Digest d{};
  if (hex.size() != d.size() * 2) throw SnapshotError("snapshot: bad digest '" + hex + "'");
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = static_cast<std::uint8_t>(std::stoi(hex.substr(2 * i, 2), nullptr, 16));
  return d;
}

std::string body_digest(const std::string& body) { return to_hex(sha256(body.data(), body.size())); }

json world_json(const World& w) {
  json j;
  j["sam"] = write_sam(w.sam);
  j["config"] = config_to_text(w.cfg);
  j["month"] = w.month;
  j["day"] = w.day;
  j["deploying"] = w.deploying;
  j["beta"] = w.beta;
  j["households"] = w.households;
  j["firms"] = w.firms;
  j["banks"] = w.banks;
  j["government"] = w.gov;
  j["central_bank"] = w.cb;
  j["external"] = w.ext;
  json rng = json::object();
  for (std::size_t s = 0; s < RngStreams::kCount; ++s)
    rng[to_string(static_cast<Stream>(s))] = w.rng.state(static_cast<Stream>(s));
  j["rng"] = rng;
  json ledger;
  ledger["first_month"] = w.ledger.first_month();
  ledger["hash"] = to_hex(w.ledger.hash());
  json months = json::array();
  for (const auto& m : w.ledger.monthly_flows()) months.push_back(matrix_json(m));
  ledger["months"] = std::move(months);
  std::vector<std::string> hashes;
  for (const auto& h : w.ledger.month_hashes()) hashes.push_back(to_hex(h));
  ledger["month_hashes"] = hashes;
  j["ledger"] = std::move(ledger);
  j["unmet"] = std::vector<double>(w.unmet.amount.data(), w.unmet.amount.data() + w.unmet.amount.size());
  j["history"] = w.history;
  j["audit_residual"] = w.auditResidual;
  return j;
}

World world_from(const json& j) {
  World w;
  w.sam = parse_sam(j.at("sam").get<std::string>());
  apply_config_text(w.cfg, j.at("config").get<std::string>());
  w.month = j.at("month").get<int>();
  w.day = j.at("day").get<int>();
  w.deploying = j.at("deploying").get<bool>();
  w.beta = j.at("beta").get<double>();
  j.at("households").get_to(w.households);
  j.at("firms").get_to(w.firms);
  j.at("banks").get_to(w.banks);
  j.at("government").get_to(w.gov);
  j.at("central_bank").get_to(w.cb);
  j.at("external").get_to(w.ext);
  for (std::size_t s = 0; s < RngStreams::kCount; ++s)
    w.rng.set_state(static_cast<Stream>(s), j.at("rng").at(to_string(static_cast<Stream>(s))).get<std::string>());
  derive(w);

  const auto& lj = j.at("ledger");
  std::vector<MatrixXi64> months;
  for (const auto& m : lj.at("months")) months.push_back(matrix_from(m));
  std::vector<Digest> hashes;
  for (const auto& h : lj.at("month_hashes")) hashes.push_back(digest_from_hex(h.get<std::string>()));
  w.ledger = Ledger(w.sam.nAccounts);
  w.ledger.restore(lj.at("first_month").get<int>(), std::move(months), std::move(hashes),
                   digest_from_hex(lj.at("hash").get<std::string>()));

  const auto unmet = j.at("unmet").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(unmet.size()) != w.unmet.amount.size())
    throw SnapshotError("snapshot: unmet-demand grid does not match the config");
  std::copy(unmet.begin(), unmet.end(), w.unmet.amount.data());
  j.at("history").get_to(w.history);
  j.at("audit_residual").get_to(w.auditResidual);
  return w;
}

}  // namespace

std::string snapshot_text(const World& w) {
  const std::string body = world_json(w).dump(1) + "\n";
  std::ostringstream os;
  os << kMagic << ' ' << kSnapshotVersion << ' ' << body_digest(body) << '\n' << body;
  return os.str();
}

std::string snapshot_checksum(const std::string& text) {
  std::istringstream is(text.substr(0, text.find('\n')));
  std::string magic, version, digest;
  is >> magic >> version >> digest;
  return digest;
}

World snapshot_from_text(const std::string& text) {
  const auto eol = text.find('\n');
  if (eol == std::string::npos) throw SnapshotError("snapshot: missing header line");
  std::istringstream header(text.substr(0, eol));
  std::string magic, digest;
  int version = -1;
  header >> magic >> version >> digest;
  if (magic != kMagic) throw SnapshotError("snapshot: not a snapshot file");
  if (version != kSnapshotVersion)
    throw SnapshotError("snapshot: format version " + std::to_string(version) + ", expected " +
                        std::to_string(kSnapshotVersion));
  const std::string body = text.substr(eol + 1);
  if (body_digest(body) != digest) throw SnapshotError("snapshot: checksum mismatch (corrupt or truncated file)");
  try {
    return world_from(json::parse(body));
  } catch (const json::exception& e) {
    throw SnapshotError(std::string("snapshot: malformed body: ") + e.what());
  } catch (const SamError& e) {
    throw SnapshotError(std::string("snapshot: embedded SAM: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw SnapshotError(std::string("snapshot: ") + e.what());
  }
}

std::string save_snapshot(const World& w, const std::string& path) {
  const std::string text = snapshot_text(w);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SnapshotError("cannot write snapshot " + path);
  out << text;
  if (!out) throw SnapshotError("cannot write snapshot " + path);
  return snapshot_checksum(text);
}

World load_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SnapshotError("cannot read snapshot " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return snapshot_from_text(ss.str());
  } catch (const SnapshotError& e) {
    throw SnapshotError(path + ": " + e.what());
  }
}

}  // namespace abmsam
