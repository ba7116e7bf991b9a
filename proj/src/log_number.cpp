#include "r3l/log_number.hpp"

#include <ostream>

#include "r3l/error.hpp"

namespace r3l {

LogNumber LogNumber::from_log(double log_abs, int sign) {
  LogNumber x;
  if (sign == 0 || log_abs == -std::numeric_limits<double>::infinity()) return x;
  x.sign_ = sign > 0 ? 1 : -1;
  x.log_abs_ = log_abs;
  return x;
}

LogNumber LogNumber::from_double(double v) {
  if (v == 0.0) return {};
  return from_log(std::log(std::abs(v)), v > 0 ? 1 : -1);
}

LogNumber LogNumber::factorial(unsigned n) { return from_log(std::lgamma(static_cast<double>(n) + 1.0)); }

double LogNumber::to_double() const { return sign_ == 0 ? 0.0 : sign_ * std::exp(log_abs_); }

LogNumber LogNumber::inverse() const {
  if (sign_ == 0) throw DomainError("LogNumber: inverse of zero");
  return from_log(-log_abs_, sign_);
}

LogNumber operator*(const LogNumber& a, const LogNumber& b) {
  if (a.sign_ == 0 || b.sign_ == 0) return {};
  return LogNumber::from_log(a.log_abs_ + b.log_abs_, a.sign_ * b.sign_);
}

LogNumber operator/(const LogNumber& a, const LogNumber& b) { return a * b.inverse(); }

LogNumber operator+(const LogNumber& a, const LogNumber& b) {
  if (a.sign_ == 0) return b;
  if (b.sign_ == 0) return a;
  const LogNumber& big = a.log_abs_ >= b.log_abs_ ? a : b;
  const LogNumber& small = a.log_abs_ >= b.log_abs_ ? b : a;
  const double ratio = std::exp(small.log_abs_ - big.log_abs_);
  if (big.sign_ == small.sign_) return LogNumber::from_log(big.log_abs_ + std::log1p(ratio), big.sign_);
  if (ratio == 1.0) return {};
  return LogNumber::from_log(big.log_abs_ + std::log1p(-ratio), big.sign_);
}

LogNumber LogNumber::pow(double exponent) const {
  if (sign_ == 0) return exponent == 0.0 ? one() : LogNumber{};
  int s = 1;
  if (sign_ < 0) {
    if (std::trunc(exponent) != exponent) throw DomainError("LogNumber: non-integer power of a negative number");
    s = (static_cast<long long>(exponent) % 2 == 0) ? 1 : -1;
  }
  return from_log(log_abs_ * exponent, s);
}

std::ostream& operator<<(std::ostream& os, const LogNumber& x) {
  return os << (x.sign() < 0 ? "-" : x.sign() == 0 ? "0*" : "+") << "exp(" << x.log_abs() << ")";
}

}  // namespace r3l
