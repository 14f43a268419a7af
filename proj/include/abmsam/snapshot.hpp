#pragma once

// World persistence. A snapshot is one header line
//   abmsam-snapshot <version> <sha256 of the body>
// followed by a canonical JSON body (sorted keys, round-trip doubles). The
// SAM and config travel inside the body; derived tables are rebuilt on load.

#include "abmsam/world.hpp"

#include <stdexcept>
#include <string>

namespace abmsam {

inline constexpr int kSnapshotVersion = 1;

class SnapshotError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

std::string snapshot_text(const World& w);
/// Throws SnapshotError on a bad header, version mismatch, checksum failure
/// or truncated body. Never returns a partial world.
World snapshot_from_text(const std::string& text);

/// Returns the body checksum as hex.
std::string save_snapshot(const World& w, const std::string& path);
World load_snapshot(const std::string& path);

/// Checksum recorded in a snapshot header.
std::string snapshot_checksum(const std::string& text);

}  // namespace abmsam
