#include "abmsam/synthetic_sam.hpp"

#include <cstdio>
#include <optional>
#include <random>

namespace abmsam {

namespace {

struct Draw {
  std::mt19937_64 eng;
  double operator()(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng); }
};

Eigen::VectorXd normalized(Eigen::VectorXd v) { return v / v.sum(); }

// nullopt when the draw leaves a negative non-tax cell
std::optional<SamTable> draw_synthetic_sam(int nSectors, std::uint64_t seed, std::uint64_t stream,
                                           long long activeCount, double initUnempPct) {
  Draw u{std::mt19937_64(stream)};
  const int n = nSectors;
  const int nm = n > 1 ? n - 1 : -1;        // non-market sector
  const int construction = n > 4 ? 3 : 0;   // main GFCF supplier

  // Per-column value shares of activity sectors.
  Eigen::MatrixXd A(n, n);
  Eigen::VectorXd imp(n), lab(n), ss(n), ptax(n), prodtax(n), surplus(n);
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd w(n);
    for (int i = 0; i < n; ++i) w(i) = u(0.2, 1.0) * (i == j ? 3.0 : 1.0) * (i == nm ? 0.05 : 1.0);
    const double icTotal = u(0.30, 0.48);
    A.col(j) = normalized(w) * icTotal;
    imp(j) = u(0.03, 0.14);
    lab(j) = j == nm ? u(0.38, 0.45) : u(0.15, 0.32);
    ss(j) = 0.3 * lab(j);
    prodtax(j) = u(-0.002, 0.004);
    ptax(j) = u(0.002, 0.015);
    surplus(j) = 1.0 - icTotal - imp(j) - lab(j) - ss(j) - prodtax(j) - ptax(j);
    if (surplus(j) < 0.04) {
      // shift labor into surplus until the column leaves a margin
      const double shift = 0.04 - surplus(j);
      lab(j) -= shift / 1.3;
      ss(j) = 0.3 * lab(j);
      surplus(j) = 1.0 - icTotal - imp(j) - lab(j) - ss(j) - prodtax(j) - ptax(j);
    }
  }

  Eigen::VectorXd hhW(n), govW = Eigen::VectorXd::Zero(n), expW(n), gfW(n);
  for (int i = 0; i < n; ++i) {
    hhW(i) = i == nm ? 0.01 : u(0.2, 1.0);
    expW(i) = i == nm ? 0.0 : u(0.1, 1.0);
    gfW(i) = i == nm ? 0.0 : (i == construction ? 4.0 : u(0.05, 0.6));
  }
  if (nm < 0) {
    govW(0) = 1.0;
  } else {
    govW(nm) = 0.85;
    govW((1 + static_cast<int>(seed % static_cast<std::uint64_t>(nm))) % nm) += 0.05;
    govW(std::max(nm - 1, 0)) += 0.10;
  }
  hhW = normalized(hhW);
  govW = normalized(govW);
  expW = normalized(expW);
  gfW = normalized(gfW);

  const double tauF = 0.07, tauH = 0.08, tauG = 0.002;
  const double rSS = 0.05, rIRPF = 0.13;
  const double C = 600000;        // household goods
  const double Igoods = 220000;   // GFCF goods
  double Gg = 250000;             // government goods, refined to a share of tax receipts
  double E = 220000;              // exports, refined against imports

  const Eigen::MatrixXd leontief = (Eigen::MatrixXd::Identity(n, n) - A).inverse();
  Eigen::VectorXd X;
  double L = 0, K = 0, M = 0, Ttotal = 0, Ffinal = 0, transfers = 0, XF = 0;
  for (int it = 0; it < 200; ++it) {
    const Eigen::VectorXd f = C * hhW + Gg * govW + E * expW + Igoods * gfW;
    X = leontief * f;
    L = lab.dot(X);
    K = surplus.dot(X);
    M = imp.dot(X);
    Ffinal = Igoods * (1 + tauF);
    const double prodTaxes = (ss + prodtax + ptax).dot(X);
    const double GF = 0.05 * Gg;
    transfers = 0.03 * M;
    XF = 0.3 * Ffinal;
    const double hhSS = rSS * L, irpf = rIRPF * (L + K);
    const double HF = Ffinal - GF - XF;
    const double vatH = tauH * (C + HF);
    Ttotal = prodTaxes + Igoods * tauF + hhSS + irpf + vatH + tauG * (Gg + GF);
    Gg = 0.62 * Ttotal / (1.05 * (1 + tauG));
    E = std::max(0.0, M - transfers - XF);
  }

  const double GF = 0.05 * Gg;
  const double HF = Ffinal - GF - XF;
  const double vatH = tauH * (C + HF);
  const double vatG = tauG * (Gg + GF);
  const double hhSS = rSS * L, irpf = rIRPF * (L + K);

  SamTable sam;
  sam.name = "SYNTH" + std::to_string(n) + "_" + std::to_string(seed);
  sam.region = "SYNTHETIC";
  sam.year = 2008;
  sam.activeCount = activeCount;
  sam.population = 2 * activeCount;
  sam.initUnempPct = initUnempPct;
  sam.unitScale = 1e6;
  sam.unitsLabel = "euros";
  auto idx = [](int k) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%02d", k);
    return std::string(buf);
  };
  for (int i = 0; i < n; ++i) sam.accounts.push_back((i == nm ? "N" : "P") + idx(i + 1) + "_Sector");
  const int F = n, Xa = n + 1, La = n + 2, Ka = n + 3, T11 = n + 4, T12 = n + 5, T13 = n + 6, T14 = n + 7,
            Ga = n + 8, Ha = n + 9;
  sam.accounts.push_back("F" + idx(F + 1) + "_GFCF");
  sam.accounts.push_back("X" + idx(Xa + 1) + "_SectExt");
  sam.accounts.push_back("L" + idx(La + 1) + "_CompEmployees");
  sam.accounts.push_back("K" + idx(Ka + 1) + "_GrossOpSurplus");
  sam.accounts.push_back("T" + idx(T11 + 1) + "_SSoc");
  sam.accounts.push_back("T" + idx(T12 + 1) + "_TaxProduction");
  sam.accounts.push_back("T" + idx(T13 + 1) + "_TaxProducts");
  sam.accounts.push_back("T" + idx(T14 + 1) + "_IRPF");
  sam.accounts.push_back("G" + idx(Ga + 1) + "_Government");
  sam.accounts.push_back("H" + idx(Ha + 1) + "_Households");
  sam.nAccounts = static_cast<int>(sam.accounts.size());
  sam.nProducers = n + 2;
  for (auto& a : sam.accounts) sam.roles.push_back(role_from_name(a));

  auto& Z = sam.flows;
  Z.setZero(sam.nAccounts, sam.nAccounts);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) Z(i, j) = A(i, j) * X(j);
    Z(Xa, j) = imp(j) * X(j);
    Z(La, j) = lab(j) * X(j);
    Z(Ka, j) = surplus(j) * X(j);
    Z(T11, j) = ss(j) * X(j);
    Z(T12, j) = prodtax(j) * X(j);
    Z(T13, j) = ptax(j) * X(j);
  }
  for (int i = 0; i < n; ++i) {
    Z(i, Ha) = C * hhW(i);
    Z(i, Ga) = Gg * govW(i);
    Z(i, Xa) = E * expW(i);
    Z(i, F) = Igoods * gfW(i);
  }
  Z(T13, F) = Igoods * tauF;
  Z(F, Ha) = HF;
  Z(F, Ga) = GF;
  Z(F, Xa) = XF;
  Z(Ha, Xa) = transfers;
  Z(T11, Ha) = hhSS;
  Z(T13, Ha) = vatH;
  Z(T14, Ha) = irpf;
  Z(T13, Ga) = vatG;
  Z(Ha, La) = L;
  Z(Ha, Ka) = K;
  for (int t : {T11, T12, T13, T14}) Z(Ga, t) = Z.row(t).sum();
  Z(Ha, Ga) = Z.row(Ga).sum() - Z.col(Ga).sum();  // subsidies close the government account

  sam.rowSums = Z.rowwise().sum();
  sam.colSums = Z.colwise().sum().transpose();
  for (int i = 0; i < sam.nAccounts; ++i)
    for (int j = 0; j < sam.nAccounts; ++j)
      if (Z(i, j) < 0 && sam.roles[static_cast<std::size_t>(i)] != AccountRole::Tax) return std::nullopt;
  return sam;
}

}  // namespace

SamTable make_synthetic_sam(int nSectors, std::uint64_t seed, long long activeCount, double initUnempPct) {
  if (nSectors < 1) throw std::invalid_argument("synthetic SAM needs at least one sector");
  std::uint64_t stream = seed;
  for (int attempt = 0; attempt < 64; ++attempt) {
    if (auto sam = draw_synthetic_sam(nSectors, seed, stream, activeCount, initUnempPct)) return *sam;
    stream = std::mt19937_64(stream)();
  }
  throw SamError("synthetic SAM: no admissible draw for seed " + std::to_string(seed));
}

}  // namespace abmsam
