#pragma once

#include "r3l/half_int.hpp"
#include "r3l/log_number.hpp"

namespace r3l {

/// Scaled complementary error function e^{x^2} erfc(x).
///
/// x < 26: e^{x^2} is formed from the exact split x^2 = hi + lo (fma), so
/// the only rounding beyond std::erfc is a couple of ulps. x >= 26: the
/// Laplace continued fraction, which converges in a handful of terms there
/// and needs no exponentials. Relative accuracy is better than 1e-13 for
/// x >= 0. Negative x is accepted but overflows below about -26.6.
double erfcx(double x);

/// Constants of the post-HCIZ radial integral at one level:
/// f(s) = int_0^inf exp(-A t^2 - B s t) dt with A = 64 w/(3 g2),
/// B = 2 w/g2 and w = 8 pi lambda^3 (2j+1).
struct KernelParams {
  double A = 0.0;
  double B = 0.0;
  double w = 0.0;

  static KernelParams for_level(HalfInt j, double g2, double lambda);
  static KernelParams raw(double A, double B, double w = 1.0);
  void validate() const;
  /// True when (A, B, w) match for_level(j, g2, lambda) to 1e-12 relative.
  bool consistent_with(HalfInt j, double g2, double lambda) const;
};

/// f(s) = (1/2) sqrt(pi/A) erfcx(B s / (2 sqrt A)) for s > 0.
///
/// The kernel is defined as the integral itself. Printed variants with
/// prefactor sqrt(pi g2/(128 w)), erfc argument sqrt(w/(64 g2)) s and
/// exponent w s^2/(64 g2) disagree with that integral by a factor 3 in
/// the quartic coefficient and a factor 1/2 in the prefactor; the
/// quadrature oracle in oracle.hpp confirms the form used here.
LogNumber kernel_f(double s, const KernelParams& kp);

/// n-th derivative of f at s > 0: (-B)^n int t^n exp(-A t^2 - B s t) dt.
double kernel_f_derivative(double s, const KernelParams& kp, int n);

}  // namespace r3l
