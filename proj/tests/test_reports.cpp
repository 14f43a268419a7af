#include "abmsam/engine.hpp"
#include "abmsam/reports.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <numeric>

using namespace abmsam;

TEST(Inequality, GiniValues) {
  const std::vector<double> one = {0, 0, 0, 100};
  EXPECT_NEAR(gini(one), 0.75, 1e-12);
  const std::vector<double> equal(10, 5.0);
  EXPECT_NEAR(gini(equal), 0.0, 1e-12);
  const std::vector<double> none;
  EXPECT_EQ(gini(none), 0.0);
  std::vector<double> scaled = {1, 2, 3, 10};
  const double g = gini(scaled);
  for (double& v : scaled) v *= 1000;
  EXPECT_NEAR(gini(scaled), g, 1e-12);
}

TEST(Inequality, Skewness) {
  const std::vector<double> sym = {1, 2, 3, 4, 5};
  EXPECT_NEAR(skewness(sym), 0.0, 1e-12);
  const std::vector<double> right = {1, 1, 1, 1, 10};
  EXPECT_GT(skewness(right), 0);
  const std::vector<double> flat(4, 2.0);
  EXPECT_EQ(skewness(flat), 0.0);
}

TEST(WealthHistogram, CountsAndEdges) {
  const std::vector<double> w = {1, 2, 2, 3, 50, 100, -4};
  for (auto b : {Binning::Linear, Binning::Log}) {
    const auto h = wealth_histogram(w, 5, b);
    EXPECT_EQ(h.edges.size(), 6u);
    EXPECT_EQ(std::accumulate(h.counts.begin(), h.counts.end(), 0LL), 7);
    for (std::size_t i = 1; i < h.edges.size(); ++i) EXPECT_GT(h.edges[i], h.edges[i - 1]);
  }
  const std::vector<double> equal(8, 3.0);
  const auto h = wealth_histogram(equal, 4);
  EXPECT_EQ(std::count_if(h.counts.begin(), h.counts.end(), [](long long c) { return c > 0; }), 1);
  EXPECT_THROW(wealth_histogram(w, 1), std::invalid_argument);
}

TEST(Formatting, ShortestRoundTrip) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(12), "12");
  EXPECT_EQ(std::stod(format_number(1.0 / 3)), 1.0 / 3);
}

TEST(RunOutputs, HeadersAndFiles) {
  const auto sam = read_sam_file(test::spain_sam_path());
  const auto w = run(sam, test::small_config(300, 12));
  const auto ts = timeseries_csv(w);
  EXPECT_EQ(ts.substr(0, ts.find('\n')),
            "month,unemployment_pct,emp_s1,emp_s2,emp_s3,emp_s4,emp_s5,emp_s6,hh_cons,gov_cons,ext_cons,ic_total,"
            "inv_goods,inv_inputs,hh_wealth");
  EXPECT_EQ(std::count(ts.begin(), ts.end(), '\n'), 14);  // header and months 0..12

  const auto pct = compare_sam(computed_sam(w.ledger, 12, 12, w.scale), sam);
  const auto csv = sam_matrix_csv(sam, pct, true);
  const auto h = *sam.index_of("H16_Households");
  const auto l = *sam.index_of("L09_CompEmployees");
  // labor row to households is a zero target: that cell is blank
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line.substr(0, 8), "account,");
  for (Eigen::Index r = 0; r <= l; ++r) std::getline(in, line);
  std::vector<std::string> cells;
  std::stringstream ls(line);
  for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
  cells.resize(static_cast<std::size_t>(sam.nAccounts) + 1);
  EXPECT_EQ(cells[0], "L09_CompEmployees");
  EXPECT_TRUE(cells[static_cast<std::size_t>(h) + 1].empty());

  const auto dir = test::scratch_dir("reports");
  write_run_outputs(w, dir.string(), RunInfo{"test", test::spain_sam_path(), "", 12});
  for (const char* f : {"manifest.txt", "timeseries.csv", "sam_computed.csv", "sam_pct.csv", "wealth_hist.csv",
                        "ledger.txt"})
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  EXPECT_NE(test::read_text((dir / "manifest.txt").string()).find(run_id(w)), std::string::npos);
  EXPECT_NE(test::read_text((dir / "ledger.txt").string()).find(to_hex(w.ledger.hash())), std::string::npos);
}
