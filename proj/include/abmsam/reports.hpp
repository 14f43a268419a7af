#pragma once

// Run outputs: time series, computed and percentage SAMs, wealth histogram,
// manifest and the ledger archive. All writers are deterministic; the only
// varying byte range is the manifest's `created` line.

#include "abmsam/world.hpp"

#include <span>
#include <string>
#include <vector>

namespace abmsam {

enum class Binning { Linear, Log };

struct WealthHistogram {
  std::vector<double> edges;  // nBins + 1
  std::vector<long long> counts;
  double gini = 0;
  double skewness = 0;
};

/// Gini coefficient; 0 for an empty or all-zero sample.
double gini(std::span<const double> values);
/// Fisher-Pearson sample skewness m3 / m2^1.5; 0 when the variance is 0.
double skewness(std::span<const double> values);

/// Counts over nBins bins spanning [min, max]. Log binning spaces the edges
/// geometrically over the positive range and puts non-positive values in
/// the first bin. Throws std::invalid_argument when nBins < 2.
WealthHistogram wealth_histogram(std::span<const double> wealth, int nBins, Binning binning = Binning::Linear);

std::vector<double> household_wealths(const World& w);

/// Shortest round-trip decimal.
std::string format_number(double v);

std::string timeseries_csv(const World& w);
/// (N+1) x (N+1) table with account names; cells where the target is zero
/// are left blank when blankZeroTargets is set.
std::string sam_matrix_csv(const SamTable& sam, const Eigen::MatrixXd& m, bool blankZeroTargets);
std::string wealth_csv(const WealthHistogram& h);
/// One line per closed month: month, chained hash, then nonzero cells as
/// row:col:ticks.
std::string ledger_archive(const World& w);

struct RunInfo {
  std::string command;
  std::string samPath;
  std::string snapshotChecksum;
  int window = 12;
};

/// Run id derived from the SAM text and the effective config.
std::string run_id(const World& w);
std::string manifest_text(const World& w, const RunInfo& info);

/// Writes manifest.txt first, then timeseries.csv, sam_computed.csv,
/// sam_pct.csv, wealth_hist.csv and ledger.txt. sam_* are skipped when fewer
/// than `window` months exist. Creates dir if needed.
void write_run_outputs(const World& w, const std::string& dir, const RunInfo& info);

}  // namespace abmsam
