#pragma once

#include <cmath>
#include <iosfwd>
#include <limits>

namespace r3l {

/// Real number stored as sign and natural log of magnitude. Products,
/// quotients and factorials never leave the representable range; sums
/// factor out the larger magnitude.
class LogNumber {
 public:
  constexpr LogNumber() = default;  // zero

  static LogNumber from_log(double log_abs, int sign = 1);
  static LogNumber from_double(double x);
  static LogNumber zero() { return {}; }
  static LogNumber one() { return from_log(0.0); }
  /// n! via lgamma.
  static LogNumber factorial(unsigned n);

  int sign() const { return sign_; }
  /// Natural log of |x|; -inf for zero.
  double log_abs() const { return sign_ == 0 ? -std::numeric_limits<double>::infinity() : log_abs_; }
  bool is_zero() const { return sign_ == 0; }
  /// May overflow to +-inf or underflow to 0 for extreme magnitudes.
  double to_double() const;

  LogNumber operator-() const { return from_log(log_abs_, -sign_); }
  LogNumber inverse() const;  // throws DomainError on zero

  friend LogNumber operator*(const LogNumber& a, const LogNumber& b);
  friend LogNumber operator/(const LogNumber& a, const LogNumber& b);
  friend LogNumber operator+(const LogNumber& a, const LogNumber& b);
  friend LogNumber operator-(const LogNumber& a, const LogNumber& b) { return a + (-b); }
  LogNumber& operator*=(const LogNumber& o) { return *this = *this * o; }
  LogNumber& operator/=(const LogNumber& o) { return *this = *this / o; }
  LogNumber& operator+=(const LogNumber& o) { return *this = *this + o; }

  LogNumber pow(double exponent) const;  // requires sign >= 0 unless exponent is an integer

  friend bool operator==(const LogNumber& a, const LogNumber& b) {
    return a.sign_ == b.sign_ && (a.sign_ == 0 || a.log_abs_ == b.log_abs_);
  }

 private:
  int sign_ = 0;
  double log_abs_ = 0.0;
};

std::ostream& operator<<(std::ostream& os, const LogNumber& x);

}  // namespace r3l
