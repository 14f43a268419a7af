#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>

namespace abmsam {

/// Fixed-point monetary amount in model units.
///
/// Balances and transfers are integer ticks so that every payment moves an
/// exact quantity between two holders and aggregate money is conserved
/// bit-for-bit. Behavioral rules work in doubles and convert at the boundary.
class Money {
public:
  static constexpr std::int64_t kTicksPerUnit = 1'000'000;

  constexpr Money() = default;

  static constexpr Money from_ticks(std::int64_t ticks) {
    Money m;
    m.ticks_ = ticks;
    return m;
  }

  /// Rounds to the nearest tick.
  static Money from_units(double units) {
    return from_ticks(std::llround(units * static_cast<double>(kTicksPerUnit)));
  }

  [[nodiscard]] constexpr std::int64_t ticks() const { return ticks_; }
  [[nodiscard]] constexpr double units() const {
    return static_cast<double>(ticks_) / static_cast<double>(kTicksPerUnit);
  }

  constexpr Money& operator+=(Money o) {
    ticks_ += o.ticks_;
    return *this;
  }
  constexpr Money& operator-=(Money o) {
    ticks_ -= o.ticks_;
    return *this;
  }
  friend constexpr Money operator+(Money a, Money b) { return a += b; }
  friend constexpr Money operator-(Money a, Money b) { return a -= b; }
  friend constexpr Money operator-(Money a) { return from_ticks(-a.ticks_); }
  friend constexpr auto operator<=>(Money, Money) = default;

  [[nodiscard]] constexpr bool positive() const { return ticks_ > 0; }

private:
  std::int64_t ticks_ = 0;
};

constexpr Money min(Money a, Money b) { return a < b ? a : b; }
constexpr Money max(Money a, Money b) { return a < b ? b : a; }

inline constexpr Money kZeroMoney{};

}  // namespace abmsam
