#include "abmsam/cli.hpp"

#include "abmsam/config.hpp"
#include "abmsam/engine.hpp"
#include "abmsam/reports.hpp"
#include "abmsam/snapshot.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <ostream>

namespace abmsam {

namespace {

struct Flags {
  std::string sam;
  std::string config;
  std::string out;
  std::string snapshot;
  int agents = 0;
  int months = -1;
  int deployMonths = -1;
  long long seed = -1;
  int window = 12;
};

class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

void require_file(const std::string& path, const char* flag) {
  if (path.empty()) throw UsageError(std::string("missing required flag ") + flag);
  if (!std::filesystem::is_regular_file(path)) throw UsageError(std::string(flag) + ": no such file: " + path);
}

SimConfig effective_config(const Flags& f, SimConfig base = {}) {
  if (!f.config.empty()) {
    require_file(f.config, "--config");
    base = load_config_file(f.config, base);
  }
  if (f.agents > 0) base.nSimAgents = f.agents;
  if (f.deployMonths >= 0) base.deploymentMonths = f.deployMonths;
  if (f.seed >= 0) base.seed = static_cast<std::uint64_t>(f.seed);
  validate_config(base);
  return base;
}

SamTable load_sam(const Flags& f) {
  require_file(f.sam, "--sam");
  try {
    return read_sam_file(f.sam);
  } catch (const SamError& e) {
    throw SamError(f.sam + ": " + e.what());
  }
}

World load_world(const Flags& f) {
  require_file(f.snapshot, "--snapshot");
  return load_snapshot(f.snapshot);
}

void finish(const World& w, const Flags& f, const std::string& command, std::ostream& out) {
  if (f.out.empty()) throw UsageError("missing required flag --out");
  std::filesystem::create_directories(f.out);
  const std::string snap = (std::filesystem::path(f.out) / "final.snap").string();
  RunInfo info{command, f.sam.empty() ? f.snapshot : f.sam, {}, f.window};
  info.snapshotChecksum = save_snapshot(w, snap);
  write_run_outputs(w, f.out, info);
  const auto& last = w.history.back();
  out << "month " << w.month << "  unemployment " << std::fixed << std::setprecision(1) << last.unemploymentPct
      << "%  budget factor " << std::setprecision(4) << w.beta << std::defaultfloat << '\n';
  out << "ledger hash " << to_hex(w.ledger.hash()) << '\n';
  out << "snapshot " << snap << " sha256 " << info.snapshotChecksum << '\n';
}

int cmd_validate(const Flags& f, std::ostream& out) {
  const SamTable sam = load_sam(f);
  const auto report = validate_balance(sam);
  out << sam.name << " (" << sam.region << ' ' << sam.year << "), " << sam.nAccounts << " accounts, "
      << sam.sectors().size() << " producing sectors\n";
  out << std::left << std::setw(22) << "account" << std::right << std::setw(16) << "row total" << std::setw(16)
      << "col total" << std::setw(14) << "rel. diff" << '\n';
  for (const auto& a : report.accounts)
    out << std::left << std::setw(22) << a.account << std::right << std::setw(16) << format_number(a.rowTotal)
        << std::setw(16) << format_number(a.colTotal) << std::setw(14) << std::setprecision(3) << a.relImbalance
        << std::defaultfloat << '\n';
  const auto coeffs = technical_coefficients(sam);
  out << "labor share by sector:";
  for (Eigen::Index k = 0; k < coeffs.n_sectors(); ++k) out << ' ' << std::setprecision(6) << coeffs.laborShare(k);
  out << std::defaultfloat << '\n';
  out << (report.passed() ? "balanced" : "NOT balanced") << " (max relative imbalance " << report.maxRelImbalance
      << ", tolerance " << report.tolerance << ")\n";
  return report.passed() ? kExitOk : kExitFailed;
}

int cmd_deploy(const Flags& f, std::ostream& out) {
  const SamTable sam = load_sam(f);
  SimConfig cfg = effective_config(f);
  cfg.totalMonths = f.months >= 0 ? f.months : cfg.deploymentMonths;
  World w = init_world(sam, cfg);
  run_until(w, cfg.totalMonths);
  finish(w, f, "deploy", out);
  return kExitOk;
}

int cmd_run(const Flags& f, std::ostream& out) {
  World w;
  if (!f.snapshot.empty()) {
    w = load_world(f);
    if (!f.sam.empty()) throw UsageError("--sam and --snapshot are exclusive");
    const SimConfig cfg = effective_config(f, w.cfg);
    if (cfg.nSimAgents != w.cfg.nSimAgents || cfg.daysPerMonth != w.cfg.daysPerMonth || cfg.radius != w.cfg.radius)
      throw UsageError("agents, days_per_month and radius cannot change on a snapshot");
    w.cfg = cfg;
    if (w.month >= w.cfg.deploymentMonths) w.deploying = false;
    derive(w);
    w.cfg.totalMonths = w.month + (f.months >= 0 ? f.months : 0);
  } else {
    const SamTable sam = load_sam(f);
    SimConfig cfg = effective_config(f);
    if (f.months >= 0) cfg.totalMonths = f.months;
    w = init_world(sam, cfg);
  }
  run_until(w, w.cfg.totalMonths);
  finish(w, f, "run", out);
  return kExitOk;
}

int cmd_compare(const Flags& f, std::ostream& out) {
  const World w = load_world(f);
  const auto computed = computed_sam(w.ledger, w.month, f.window, w.scale);
  const auto pct = compare_sam(computed, w.sam);
  const double threshold = 0.005 * w.sam.total_output();
  int major = 0, inside = 0;
  out << "computed SAM at month " << w.month << " (" << f.window << "-month window), % of target\n";
  for (int i = 0; i < w.sam.nAccounts; ++i)
    for (int j = 0; j < w.sam.nAccounts; ++j) {
      if (w.sam.flows(i, j) < threshold) continue;
      ++major;
      const bool ok = pct(i, j) >= 75 && pct(i, j) <= 125;
      inside += ok;
      out << (ok ? "  " : "! ") << std::left << std::setw(20) << w.sam.accounts[static_cast<std::size_t>(i)]
          << std::setw(20) << w.sam.accounts[static_cast<std::size_t>(j)] << std::right << std::fixed
          << std::setprecision(1) << std::setw(7) << pct(i, j) << std::defaultfloat << '\n';
    }
  out << inside << '/' << major << " major cells within [75, 125]%\n";
  if (!f.out.empty()) {
    std::filesystem::create_directories(f.out);
    RunInfo info{"compare", f.snapshot, snapshot_checksum(snapshot_text(w)), f.window};
    write_run_outputs(w, f.out, info);
  }
  return inside == major ? kExitOk : kExitFailed;
}

int cmd_report(const Flags& f, std::ostream& out) {
  const World w = load_world(f);
  if (f.out.empty()) throw UsageError("missing required flag --out");
  RunInfo info{"report", f.snapshot, snapshot_checksum(snapshot_text(w)), f.window};
  write_run_outputs(w, f.out, info);
  out << "wrote reports for month " << w.month << " to " << f.out << '\n';
  return kExitOk;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Agent-based economy deployed from a social accounting matrix", "abmsam"};
  app.require_subcommand(1);
  app.footer(config_help());
  Flags f;

  auto* validate = app.add_subcommand("validate", "Parse a SAM and print its balance report");
  auto* deploy = app.add_subcommand("deploy", "Deploy an economy from a SAM and save the final state");
  auto* run = app.add_subcommand("run", "Run from a SAM or continue a snapshot");
  auto* compare = app.add_subcommand("compare", "Compare a snapshot's computed SAM with its target");
  auto* report = app.add_subcommand("report", "Write the report files of a snapshot");

  validate->add_option("--sam", f.sam, "SAM file")->required();
  for (auto* sub : {deploy, run}) {
    sub->add_option("--sam", f.sam, "SAM file");
    sub->add_option("--config", f.config, "config file (key = value)");
    sub->add_option("--agents", f.agents, "simulated agents")->check(CLI::PositiveNumber);
    sub->add_option("--months", f.months, "months to simulate")->check(CLI::NonNegativeNumber);
    sub->add_option("--deploy-months", f.deployMonths, "deployment months")->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", f.seed, "master seed")->check(CLI::NonNegativeNumber);
    sub->add_option("--out", f.out, "output directory")->required();
    sub->add_option("--window", f.window, "computed-SAM window in months")->check(CLI::PositiveNumber);
  }
  run->add_option("--snapshot", f.snapshot, "snapshot to continue");
  for (auto* sub : {compare, report}) {
    sub->add_option("--snapshot", f.snapshot, "snapshot file")->required();
    sub->add_option("--window", f.window, "computed-SAM window in months")->check(CLI::PositiveNumber);
  }
  compare->add_option("--out", f.out, "also write reports here");
  report->add_option("--out", f.out, "output directory")->required();
  for (auto* sub : {validate, deploy, run, compare, report}) sub->footer(config_help());

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*validate) return cmd_validate(f, out);
    if (*deploy) {
      if (f.sam.empty()) throw UsageError("missing required flag --sam");
      return cmd_deploy(f, out);
    }
    if (*run) {
      if (f.sam.empty() && f.snapshot.empty()) throw UsageError("run needs --sam or --snapshot");
      return cmd_run(f, out);
    }
    if (*compare) return cmd_compare(f, out);
    if (*report) return cmd_report(f, out);
  } catch (const UsageError& e) {
    err << "abmsam: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "abmsam: " << e.what() << '\n';
    return kExitFailed;
  }
  return kExitUsage;
}

}  // namespace abmsam
