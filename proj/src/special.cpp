#include "r3l/special.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "r3l/detail/real.hpp"
#include "r3l/error.hpp"
#include "r3l/params.hpp"

namespace r3l {

double erfcx(double x) {
  if (std::isnan(x)) return x;
  if (x >= 26.0) {
    if (std::isinf(x)) return 0.0;
    return detail::erfcx_continued_fraction<double>(x, 0.25 * std::numeric_limits<double>::epsilon());
  }
  const double hi = x * x;
  const double lo = std::fma(x, x, -hi);
  return std::exp(hi) * (1.0 + lo) * std::erfc(x);
}

KernelParams KernelParams::for_level(HalfInt j, double g2, double lambda) {
  if (!(g2 > 0) || !(lambda > 0)) throw DomainError("KernelParams: g2 and lambda must be > 0");
  const double w = level_weight(j, lambda);
  return {64.0 * w / (3.0 * g2), 2.0 * w / g2, w};
}

KernelParams KernelParams::raw(double A, double B, double w) {
  KernelParams kp{A, B, w};
  kp.validate();
  return kp;
}

void KernelParams::validate() const {
  if (!(A > 0) || !(B > 0) || !(w > 0) || !std::isfinite(A) || !std::isfinite(B) || !std::isfinite(w))
    throw DomainError("KernelParams: A, B, w must be finite and > 0");
}

bool KernelParams::consistent_with(HalfInt j, double g2, double lambda) const {
  const KernelParams ref = for_level(j, g2, lambda);
  auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::abs(b); };
  return close(A, ref.A) && close(B, ref.B) && close(w, ref.w);
}

LogNumber kernel_f(double s, const KernelParams& kp) {
  kp.validate();
  if (!(s > 0) || !std::isfinite(s)) throw DomainError("kernel_f: argument must be finite and > 0");
  const double ra = std::sqrt(kp.A);
  const double z = kp.B * s / (2.0 * ra);
  return LogNumber::from_log(std::log(0.5 * std::sqrt(std::numbers::pi) / ra) + std::log(erfcx(z)));
}

double kernel_f_derivative(double s, const KernelParams& kp, int n) {
  kp.validate();
  if (!(s > 0) || !std::isfinite(s)) throw DomainError("kernel_f_derivative: argument must be finite and > 0");
  if (n < 0) throw DomainError("kernel_f_derivative: order must be >= 0");
  const double ra = std::sqrt(kp.A);
  const double z = kp.B * s / (2.0 * ra);
  const auto moments = detail::scaled_moments<double>(z, n);
  // I_n = A^{-(n+1)/2} J_n(z); f^(n) = (-B)^n I_n
  const double scale = std::pow(-kp.B / ra, n) / ra;
  return scale * moments[static_cast<std::size_t>(n)];
}

}  // namespace r3l
