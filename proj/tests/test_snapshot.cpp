#include "abmsam/engine.hpp"
#include "abmsam/snapshot.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace abmsam;

namespace {

const SamTable& spain() {
  static const SamTable sam = read_sam_file(test::spain_sam_path());
  return sam;
}

World world_at(int month, int total) {
  auto cfg = test::small_config(300, total);
  cfg.deploymentMonths = 12;
  auto w = init_world(spain(), cfg);
  run_until(w, month);
  return w;
}

}  // namespace

TEST(Snapshot, ContinuationMatchesAnUninterruptedRun) {
  auto w = world_at(10, 20);
  auto restored = snapshot_from_text(snapshot_text(w));
  EXPECT_EQ(snapshot_text(restored), snapshot_text(w));
  run_until(w, 20);
  run_until(restored, 20);
  EXPECT_EQ(w.ledger.hash(), restored.ledger.hash());
  EXPECT_EQ(snapshot_text(w), snapshot_text(restored));
}

TEST(Snapshot, FileRoundTripAndChecksum) {
  const auto w = world_at(4, 8);
  const auto dir = test::scratch_dir("snapshot");
  const auto path = (dir / "w.snap").string();
  const auto sum = save_snapshot(w, path);
  EXPECT_EQ(sum.size(), 64u);
  EXPECT_EQ(snapshot_checksum(test::read_text(path)), sum);
  const auto back = load_snapshot(path);
  EXPECT_EQ(back.month, 4);
  EXPECT_EQ(save_snapshot(back, (dir / "again.snap").string()), sum);
}

TEST(Snapshot, CorruptionIsDetected) {
  const auto text = snapshot_text(world_at(3, 6));
  std::string flipped = text;
  const auto pos = flipped.find("\"month\"");
  ASSERT_NE(pos, std::string::npos);
  flipped[pos + 10] = flipped[pos + 10] == '1' ? '2' : '1';
  EXPECT_THROW(snapshot_from_text(flipped), SnapshotError);
  EXPECT_THROW(snapshot_from_text(text.substr(0, text.size() / 2)), SnapshotError);
  EXPECT_THROW(snapshot_from_text(""), SnapshotError);

  std::string version = text;
  version.replace(0, std::string("abmsam-snapshot 1").size(), "abmsam-snapshot 2");
  try {
    snapshot_from_text(version);
    FAIL() << "expected a version error";
  } catch (const SnapshotError& e) {
    EXPECT_NE(std::string(e.what()).find("version"), std::string::npos) << e.what();
  }
  EXPECT_THROW(load_snapshot("/nonexistent/x.snap"), SnapshotError);
}
