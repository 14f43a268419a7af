#include "abmsam/cli.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace abmsam;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_command(args, out, err);
  return {code, out.str(), err.str()};
}

std::string without_created(const std::string& manifest) {
  std::istringstream in(manifest);
  std::string line, kept;
  while (std::getline(in, line))
    if (line.rfind("created", 0) != 0) kept += line + '\n';
  return kept;
}

std::string field(const std::string& text, const std::string& key) {
  const auto pos = text.find(key);
  if (pos == std::string::npos) return {};
  const auto start = pos + key.size();
  return text.substr(start, text.find_first_of(" \n", start) - start);
}

}  // namespace

TEST(Cli, ValidateSpain) {
  const auto r = cli({"validate", "--sam", test::spain_sam_path()});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("H16_Households"), std::string::npos);
  EXPECT_NE(r.out.find("balanced"), std::string::npos);
}

TEST(Cli, UsageAndInputErrors) {
  EXPECT_EQ(cli({"validate", "--sam", "/nonexistent.sam"}).code, kExitUsage);
  EXPECT_EQ(cli({"validate"}).code, kExitUsage);
  EXPECT_EQ(cli({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(cli({"deploy", "--out", "/tmp/x"}).code, kExitUsage);

  const auto dir = test::scratch_dir("cli_bad");
  const auto bad = (dir / "bad.sam").string();
  test::write_text(bad, "SAM_table {\nnot a table\n");
  const auto r = cli({"validate", "--sam", bad});
  EXPECT_EQ(r.code, kExitFailed);
  EXPECT_NE(r.err.find("abmsam:"), std::string::npos);

  const auto cfg = (dir / "bad.cfg").string();
  test::write_text(cfg, "no_such_key = 3\n");
  EXPECT_EQ(cli({"deploy", "--sam", test::spain_sam_path(), "--config", cfg, "--out", dir.string()}).code,
            kExitFailed);
}

TEST(Cli, HelpListsDefaults) {
  const auto r = cli({"run", "--help"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("kappa"), std::string::npos);
  EXPECT_NE(r.out.find("0.01"), std::string::npos);
  EXPECT_NE(r.out.find("--snapshot"), std::string::npos);
}

TEST(Cli, RepeatedRunsWriteIdenticalOutputs) {
  const auto a = test::scratch_dir("cli_a");
  const auto b = test::scratch_dir("cli_b");
  const std::vector<std::string> common = {"run", "--sam", test::spain_sam_path(), "--agents", "300",
                                           "--months", "12", "--deploy-months", "12", "--seed", "5"};
  auto argsA = common, argsB = common;
  argsA.insert(argsA.end(), {"--out", a.string()});
  argsB.insert(argsB.end(), {"--out", b.string()});
  ASSERT_EQ(cli(argsA).code, kExitOk);
  ASSERT_EQ(cli(argsB).code, kExitOk);
  for (const char* f : {"timeseries.csv", "sam_computed.csv", "sam_pct.csv", "wealth_hist.csv", "ledger.txt"})
    EXPECT_EQ(test::read_text((a / f).string()), test::read_text((b / f).string())) << f;
  EXPECT_EQ(without_created(test::read_text((a / "manifest.txt").string())),
            without_created(test::read_text((b / "manifest.txt").string())));
}

TEST(Cli, SnapshotContinuationMatchesAFreshRun) {
  const auto dep = test::scratch_dir("cli_dep");
  const auto cont = test::scratch_dir("cli_cont");
  const auto fresh = test::scratch_dir("cli_fresh");
  const std::vector<std::string> base = {"--sam", test::spain_sam_path(), "--agents", "300", "--deploy-months", "8",
                                         "--seed", "3"};
  auto d = std::vector<std::string>{"deploy"};
  d.insert(d.end(), base.begin(), base.end());
  d.insert(d.end(), {"--months", "8", "--out", dep.string()});
  ASSERT_EQ(cli(d).code, kExitOk);

  const auto snap = (dep / "final.snap").string();
  const auto c = cli({"run", "--snapshot", snap, "--months", "4", "--out", cont.string()});
  ASSERT_EQ(c.code, kExitOk) << c.err;
  EXPECT_EQ(cli({"run", "--snapshot", snap, "--sam", test::spain_sam_path(), "--out", cont.string()}).code,
            kExitUsage);
  EXPECT_EQ(cli({"run", "--snapshot", snap, "--agents", "400", "--out", cont.string()}).code, kExitUsage);

  auto f = std::vector<std::string>{"run"};
  f.insert(f.end(), base.begin(), base.end());
  f.insert(f.end(), {"--months", "12", "--out", fresh.string()});
  const auto r = cli(f);
  ASSERT_EQ(r.code, kExitOk);
  EXPECT_EQ(field(c.out, "ledger hash "), field(r.out, "ledger hash "));
  EXPECT_EQ(field(c.out, " sha256 "), field(r.out, " sha256 "));
  EXPECT_FALSE(field(r.out, "ledger hash ").empty());

  const auto cmp = cli({"compare", "--snapshot", (fresh / "final.snap").string()});
  EXPECT_TRUE(cmp.code == kExitOk || cmp.code == kExitFailed);
  EXPECT_NE(cmp.out.find("major cells"), std::string::npos);
  const auto rep = test::scratch_dir("cli_rep");
  EXPECT_EQ(cli({"report", "--snapshot", (fresh / "final.snap").string(), "--out", rep.string()}).code, kExitOk);
  EXPECT_TRUE(std::filesystem::exists(rep / "timeseries.csv"));
}
