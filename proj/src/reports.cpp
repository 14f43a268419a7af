#include "abmsam/reports.hpp"

#include "abmsam/config.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#ifndef ABMSAM_VERSION
#define ABMSAM_VERSION "dev"
#endif

namespace abmsam {

double gini(std::span<const double> values) {
  if (values.empty()) return 0.0;
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double total = std::accumulate(v.begin(), v.end(), 0.0);
  if (total == 0) return 0.0;
  double weighted = 0;
  for (std::size_t i = 0; i < v.size(); ++i) weighted += static_cast<double>(i + 1) * v[i];
  const auto n = static_cast<double>(v.size());
  return 2.0 * weighted / (n * total) - (n + 1.0) / n;
}

double skewness(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const auto n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double m2 = 0, m3 = 0;
  for (double x : values) {
    const double d = x - mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= n;
  m3 /= n;
  return m2 > 0 ? m3 / std::pow(m2, 1.5) : 0.0;
}

WealthHistogram wealth_histogram(std::span<const double> wealth, int nBins, Binning binning) {
  if (nBins < 2) throw std::invalid_argument("wealth_histogram: nBins must be >= 2");
  WealthHistogram h;
  h.counts.assign(static_cast<std::size_t>(nBins), 0);
  h.edges.resize(static_cast<std::size_t>(nBins) + 1);
  h.gini = gini(wealth);
  h.skewness = skewness(wealth);
  if (wealth.empty()) {
    for (int k = 0; k <= nBins; ++k) h.edges[static_cast<std::size_t>(k)] = k;
    return h;
  }
  const auto [lo, hi] = std::minmax_element(wealth.begin(), wealth.end());
  if (binning == Binning::Log) {
    double minPos = 0;
    for (double x : wealth)
      if (x > 0 && (minPos == 0 || x < minPos)) minPos = x;
    if (minPos == 0) minPos = 1;
    const double top = std::max(*hi, minPos * 10);
    const double step = std::log(top / minPos) / nBins;
    for (int k = 0; k <= nBins; ++k) h.edges[static_cast<std::size_t>(k)] = minPos * std::exp(step * k);
    h.edges.back() = top;
    for (double x : wealth) {
      int bin = x > minPos ? static_cast<int>(std::log(x / minPos) / step) : 0;
      h.counts[static_cast<std::size_t>(std::clamp(bin, 0, nBins - 1))] += 1;
    }
    return h;
  }
  const double a = *lo;
  const double width = *hi > a ? (*hi - a) / nBins : 1.0;
  for (int k = 0; k <= nBins; ++k) h.edges[static_cast<std::size_t>(k)] = a + width * k;
  for (double x : wealth) {
    const int bin = static_cast<int>((x - a) / width);
    h.counts[static_cast<std::size_t>(std::clamp(bin, 0, nBins - 1))] += 1;
  }
  return h;
}

std::vector<double> household_wealths(const World& w) {
  std::vector<double> v;
  v.reserve(w.households.size());
  for (const auto& h : w.households) v.push_back(household_wealth(w, h));
  return v;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string timeseries_csv(const World& w) {
  std::ostringstream os;
  os << "month,unemployment_pct";
  for (int s = 1; s <= w.n_sectors(); ++s) os << ",emp_s" << s;
  os << ",hh_cons,gov_cons,ext_cons,ic_total,inv_goods,inv_inputs,hh_wealth\n";
  for (const auto& r : w.history) {
    os << r.month << ',' << format_number(r.unemploymentPct);
    for (int e : r.employees) os << ',' << e;
    for (double v : {r.hhCons, r.govCons, r.extCons, r.icTotal, r.invGoods, r.invInputs, r.hhWealth})
      os << ',' << format_number(v);
    os << '\n';
  }
  return os.str();
}

std::string sam_matrix_csv(const SamTable& sam, const Eigen::MatrixXd& m, bool blankZeroTargets) {
  std::ostringstream os;
  os << "account";
  for (const auto& a : sam.accounts) os << ',' << a;
  os << '\n';
  for (int i = 0; i < sam.nAccounts; ++i) {
    os << sam.accounts[static_cast<std::size_t>(i)];
    for (int j = 0; j < sam.nAccounts; ++j) {
      os << ',';
      if (blankZeroTargets && sam.flows(i, j) == 0) continue;
      os << format_number(m(i, j));
    }
    os << '\n';
  }
  return os.str();
}

std::string wealth_csv(const WealthHistogram& h) {
  std::ostringstream os;
  os << "bin_low,bin_high,count\n";
  for (std::size_t k = 0; k < h.counts.size(); ++k)
    os << format_number(h.edges[k]) << ',' << format_number(h.edges[k + 1]) << ',' << h.counts[k] << '\n';
  os << "gini," << format_number(h.gini) << '\n';
  os << "skewness," << format_number(h.skewness) << '\n';
  return os.str();
}

std::string ledger_archive(const World& w) {
  std::ostringstream os;
  os << "# run " << run_id(w) << " accounts";
  for (const auto& a : w.sam.accounts) os << ' ' << a;
  os << '\n';
  const auto& months = w.ledger.monthly_flows();
  const auto& hashes = w.ledger.month_hashes();
  for (std::size_t k = 0; k < months.size(); ++k) {
    os << w.ledger.first_month() + static_cast<int>(k) << ' ' << to_hex(hashes[k]);
    const auto& m = months[k];
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j)
        if (m(i, j) != 0) os << ' ' << i << ':' << j << ':' << m(i, j);
    os << '\n';
  }
  return os.str();
}

std::string run_id(const World& w) {
  const std::string text = write_sam(w.sam) + config_to_text(w.cfg);
  return to_hex(sha256(text.data(), text.size())).substr(0, 16);
}

std::string manifest_text(const World& w, const RunInfo& info) {
  const std::string samText = write_sam(w.sam);
  std::ostringstream os;
  os << "run_id = " << run_id(w) << '\n';
  os << "version = " << ABMSAM_VERSION << '\n';
  os << "command = " << info.command << '\n';
  os << "sam_path = " << info.samPath << '\n';
  os << "sam_sha256 = " << to_hex(sha256(samText.data(), samText.size())) << '\n';
  os << "month = " << w.month << '\n';
  os << "phase = " << (w.deploying ? "deploying" : "free") << '\n';
  os << "budget_factor = " << format_number(w.beta) << '\n';
  os << "ledger_hash = " << to_hex(w.ledger.hash()) << '\n';
  os << "snapshot_sha256 = " << info.snapshotChecksum << '\n';
  os << "window = " << info.window << '\n';
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  os << "created = " << now << '\n';
  os << "# effective config\n" << config_to_text(w.cfg);
  return os.str();
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace

void write_run_outputs(const World& w, const std::string& dir, const RunInfo& info) {
  const std::filesystem::path root(dir);
  std::filesystem::create_directories(root);
  write_file(root / "manifest.txt", manifest_text(w, info));
  write_file(root / "timeseries.csv", timeseries_csv(w));
  if (w.ledger.last_closed_month() >= w.ledger.first_month() + info.window - 1 && !w.ledger.monthly_flows().empty()) {
    const auto computed = computed_sam(w.ledger, w.month, info.window, w.scale);
    write_file(root / "sam_computed.csv", sam_matrix_csv(w.sam, computed, false));
    write_file(root / "sam_pct.csv", sam_matrix_csv(w.sam, compare_sam(computed, w.sam), true));
  }
  const auto wealth = household_wealths(w);
  write_file(root / "wealth_hist.csv", wealth_csv(wealth_histogram(wealth, w.cfg.wealthBins)));
  write_file(root / "ledger.txt", ledger_archive(w));
}

}  // namespace abmsam
