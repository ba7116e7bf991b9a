#pragma once

// Scalar types for the determinant engine and the generic special-function
// kernels they need. double is the default; the cpp_bin_float types are the
// escalation tiers for ill-conditioned levels.

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <type_traits>
#include <vector>

#include "r3l/error.hpp"

namespace r3l {

double erfcx(double x);

namespace detail {

using Ext50 = boost::multiprecision::cpp_bin_float_50;
using Ext100 = boost::multiprecision::cpp_bin_float_100;

template <class Real>
Real pi_v() {
  return boost::math::constants::pi<Real>();
}

template <class Real>
double to_double(const Real& x) {
  if constexpr (std::is_same_v<Real, double>) {
    return x;
  } else {
    return x.template convert_to<double>();
  }
}

/// Laplace continued fraction for e^{x^2} erfc(x), x > 0; tol is relative.
template <class Real>
Real erfcx_continued_fraction(const Real& x, const Real& tol, int max_terms = 100000) {
  using std::abs;
  const Real tiny = std::numeric_limits<Real>::min() * 1024;
  Real f = x, c = x, d = 0;
  for (int k = 1; k <= max_terms; ++k) {
    const Real a = Real(k) / 2;
    d = x + a * d;
    if (d == 0) d = tiny;
    c = x + a / c;
    if (c == 0) c = tiny;
    d = 1 / d;
    const Real delta = c * d;
    f *= delta;
    if (abs(delta - 1) < tol) {
      using std::sqrt;
      return 1 / (f * sqrt(pi_v<Real>()));
    }
  }
  throw NumericalError("erfcx: continued fraction did not converge");
}

/// e^{x^2} erfc(x) in the engine's scalar type.
template <class Real>
Real erfcx_t(const Real& x) {
  if constexpr (std::is_same_v<Real, double>) {
    return erfcx(x);
  } else {
    using std::exp;
    if (x < 8) return boost::math::erfc(x) * exp(x * x);
    return erfcx_continued_fraction<Real>(x, std::numeric_limits<Real>::epsilon() / 4);
  }
}

/// J_n(z) = int_0^inf s^n exp(-s^2 - 2 z s) ds for n = 0..n_max, z >= 0.
/// Forward recurrence for z < 1; for larger z J_n is the minimal solution
/// of the recurrence and Miller's backward algorithm normalised by J_0 is
/// used instead.
template <class Real>
std::vector<Real> scaled_moments(const Real& z, int n_max) {
  using std::sqrt;
  std::vector<Real> out(static_cast<std::size_t>(n_max) + 1);
  const Real j0 = sqrt(pi_v<Real>()) / 2 * erfcx_t<Real>(z);
  out[0] = j0;
  if (n_max == 0) return out;
  if (z < 1) {
    out[1] = (1 - 2 * z * j0) / 2;
    for (int n = 1; n < n_max; ++n) out[n + 1] = (Real(n) * out[n - 1] - 2 * z * out[n]) / 2;
    return out;
  }
  const double digits = std::numeric_limits<Real>::digits10 + 4.0;
  const double span = digits * std::numbers::ln10 / (4.0 * to_double(z));
  const int top = n_max + 12 + static_cast<int>(std::ceil(2.0 * span * span));
  std::vector<Real> back(static_cast<std::size_t>(top) + 2);
  back[top + 1] = 0;
  back[top] = 1;
  const Real huge = Real(1e150);
  for (int n = top; n >= 1; --n) {
    back[n - 1] = (2 * back[n + 1] + 2 * z * back[n]) / Real(n);
    if (back[n - 1] > huge) {
      for (int k = n - 1; k <= top + 1; ++k) back[k] /= huge;
    }
  }
  const Real scale = j0 / back[0];
  for (int n = 1; n <= n_max; ++n) out[n] = back[n] * scale;
  return out;
}

}  // namespace detail
}  // namespace r3l
