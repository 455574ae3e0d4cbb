#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace umcalc {

/**
 * Fixed-point metric coordinate.
 *
 * Heights, depths and pairwise distances are integer multiples of 1e-12.
 * All semigroup arithmetic (truncation minima, concatenation thresholds,
 * trunk shifts) happens on the integer units, so results and canonical
 * encodings are exact and byte-stable.
 */
class Height {
 public:
  static constexpr int kFractionalDigits = 12;
  static constexpr std::int64_t kScale = 1'000'000'000'000LL;

  constexpr Height() = default;

  static constexpr Height from_units(std::int64_t units) {
    Height h;
    h.units_ = units;
    return h;
  }

  /// Quantizes a real value to the declared precision. Rejects non-finite
  /// input and magnitudes beyond the fixed-point range.
  static Height of(double value) {
    if (!std::isfinite(value)) {
      throw std::invalid_argument("height must be finite");
    }
    const long double scaled = static_cast<long double>(value) * kScale;
    if (scaled >= 9.2e18L || scaled <= -9.2e18L) {
      throw std::invalid_argument("height out of fixed-point range");
    }
    return from_units(static_cast<std::int64_t>(std::llroundl(scaled)));
  }

  constexpr std::int64_t units() const { return units_; }
  double value() const { return static_cast<double>(units_) / kScale; }

  constexpr bool is_zero() const { return units_ == 0; }
  constexpr bool is_negative() const { return units_ < 0; }

  friend constexpr auto operator<=>(Height a, Height b) = default;

  constexpr Height operator+(Height o) const { return from_units(units_ + o.units_); }
  constexpr Height operator-(Height o) const { return from_units(units_ - o.units_); }

  /// 2h, the ball-diameter threshold attached to depth h.
  constexpr Height doubled() const { return from_units(2 * units_); }

  constexpr Height min(Height o) const { return units_ < o.units_ ? *this : o; }
  constexpr Height max(Height o) const { return units_ > o.units_ ? *this : o; }

  /// Quantized multiple a*h.
  Height scaled(double a) const {
    const long double scaled = static_cast<long double>(units_) * static_cast<long double>(a);
    if (scaled >= 9.2e18L || scaled <= -9.2e18L) {
      throw std::invalid_argument("scaled height out of fixed-point range");
    }
    return from_units(static_cast<std::int64_t>(std::llroundl(scaled)));
  }

  /// Exact decimal rendering, trailing zeros trimmed ("3.25", "0").
  std::string str() const;

 private:
  std::int64_t units_ = 0;
};

}  // namespace umcalc
