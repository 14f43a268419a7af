#pragma once

#include <cstdint>
#include <random>
#include <sstream>
#include <string>

namespace abmsam {

enum class Stream : std::uint32_t { Placement, Schedule, Shopping, Labor, Entry, Market, Misc, Count };

inline const char* to_string(Stream s) {
  switch (s) {
    case Stream::Placement: return "placement";
    case Stream::Schedule: return "schedule";
    case Stream::Shopping: return "shopping";
    case Stream::Labor: return "labor";
    case Stream::Entry: return "entry";
    case Stream::Market: return "market";
    case Stream::Misc: return "misc";
    case Stream::Count: break;
  }
  return "?";
}

/// One independent engine per concern, so adding draws in one rule does not
/// shift the sequence seen by another.
class RngStreams {
public:
  static constexpr std::size_t kCount = static_cast<std::size_t>(Stream::Count);

  RngStreams() : RngStreams(0) {}
  explicit RngStreams(std::uint64_t seed) { reseed(seed); }

  void reseed(std::uint64_t seed) {
    for (std::size_t i = 0; i < kCount; ++i) {
      std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                        static_cast<std::uint32_t>(i), 0x5a4dU};
      engines_[i].seed(seq);
    }
  }

  std::mt19937_64& operator[](Stream s) { return engines_[static_cast<std::size_t>(s)]; }

  [[nodiscard]] std::string state(Stream s) const {
    std::ostringstream os;
    os << engines_[static_cast<std::size_t>(s)];
    return os.str();
  }
  void set_state(Stream s, const std::string& text) {
    std::istringstream is(text);
    is >> engines_[static_cast<std::size_t>(s)];
  }

private:
  std::mt19937_64 engines_[kCount];
};

inline double uniform01(std::mt19937_64& rng) { return std::generate_canonical<double, 53>(rng); }

}  // namespace abmsam
