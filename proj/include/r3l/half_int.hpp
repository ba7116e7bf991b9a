#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace r3l {

/// Fuzzy-sphere label j in N/2, stored exactly as 2j.
class HalfInt {
 public:
  constexpr HalfInt() = default;
  constexpr explicit HalfInt(std::uint32_t twice_j) : twice_j_(twice_j) {}

  static constexpr HalfInt from_twice(std::uint32_t twice_j) { return HalfInt(twice_j); }

  constexpr std::uint32_t twice() const { return twice_j_; }
  /// Matrix size 2j+1.
  constexpr std::size_t dim() const { return static_cast<std::size_t>(twice_j_) + 1; }
  constexpr double value() const { return 0.5 * static_cast<double>(twice_j_); }
  /// j(j+1), exact in double for every representable level.
  constexpr double casimir() const { return value() * (value() + 1.0); }
  /// Magnetic label m for storage row i (m = -j + i).
  constexpr double m_of(std::size_t row) const { return static_cast<double>(row) - value(); }

  constexpr HalfInt next() const { return HalfInt(twice_j_ + 1); }

  friend constexpr auto operator<=>(HalfInt, HalfInt) = default;

  std::string str() const {
    return (twice_j_ % 2 == 0) ? std::to_string(twice_j_ / 2) : std::to_string(twice_j_) + "/2";
  }

 private:
  std::uint32_t twice_j_ = 0;
};

}  // namespace r3l
