#include <cmath>
#include <numbers>

#include "doctest.h"
#include "r3l/detail/real.hpp"
#include "r3l/error.hpp"
#include "r3l/special.hpp"

using namespace r3l;

namespace {

// tests/oracles/freeze_values.py (mpmath, 50 digits)
struct Ref {
  double x, value;
};
constexpr Ref kErfcx[] = {
    {0.0, 1.0},
    {0.25, 0.77034654773099674392},
    {0.5, 0.61569034419292587487},
    {1.0, 0.42758357615580700441},
    {2.0, 0.25539567631050574387},
    {3.5, 0.1552936556088942974},
    {5.0, 0.11070463773306862637},
    {10.0, 0.056140992743822585858},
    {26.0, 0.021683584850562906616},
    {27.0, 0.020881607990420940674},
    {50.0, 0.0112815362653237725},
    {300.0, 0.0018806214973780644895},
};

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("erfcx matches high-precision values") {
  for (const auto& r : kErfcx) {
    CAPTURE(r.x);
    CHECK(rel(erfcx(r.x), r.value) <= 1e-13);
  }
}

TEST_CASE("erfcx asymptote and continuity at the switch point") {
  const double x = 50.0;
  CHECK(std::abs(erfcx(x) * std::sqrt(std::numbers::pi) * x - (1.0 - 1.0 / (2 * x * x))) <= 3.0 / std::pow(x, 4));
  const double below = std::nextafter(26.0, 0.0);
  CHECK(rel(erfcx(below), erfcx(26.0)) <= 1e-14);
  CHECK(erfcx(0.0) == 1.0);
  CHECK(erfcx(INFINITY) == 0.0);
}

TEST_CASE("extended erfcx agrees with double on both sides of its switch") {
  for (double x : {0.3, 2.0, 7.9, 8.1, 40.0, 300.0}) {
    const auto e = detail::erfcx_t<detail::Ext50>(detail::Ext50(x));
    CHECK(rel(detail::to_double(e), erfcx(x)) <= 1e-14);
  }
}

TEST_CASE("kernel f closed form") {
  const auto kp = KernelParams::raw(64.0 / 3.0, 2.0);
  CHECK(rel(kernel_f(1.0, kp).to_double(), 0.15271429035386305083) <= 1e-13);

  // s -> 0+ gives the half Gaussian integral sqrt(pi)/2 at A = 1
  const auto unit = KernelParams::raw(1.0, 3.0);
  CHECK(rel(kernel_f(1e-12, unit).to_double(), std::sqrt(std::numbers::pi) / 2) <= 1e-10);

  // large argument: f ~ 1/(B s) once B s/(2 sqrt A) > 30
  const double s = 200.0;
  const double z = kp.B * s / (2 * std::sqrt(kp.A));
  REQUIRE(z > 30);
  CHECK(rel(kernel_f(s, kp).to_double(), 1.0 / (kp.B * s)) < 0.01);

  CHECK_THROWS_AS(kernel_f(0.0, kp), DomainError);
  CHECK_THROWS_AS(kernel_f(-1.0, kp), DomainError);
  CHECK_THROWS_AS(KernelParams::raw(0.0, 1.0), DomainError);
}

TEST_CASE("kernel f is positive and strictly decreasing") {
  const auto kp = KernelParams::for_level(HalfInt(3), 1.0, 0.9);
  double prev = INFINITY;
  for (double s = 0.01; s < 500; s *= 1.3) {
    const double v = kernel_f(s, kp).to_double();
    CHECK(v > 0);
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("derivatives of f match frozen moments") {
  const double small[] = {0.21733861779379653502, -0.19942903143476010619, 0.32390956578943525286,
                          -0.7171723617371480641};
  const double level[] = {0.0020537476440771557058, -0.00042032272108700780828, 0.00017058180297273580416,
                          -0.00010297883691365804861};
  const auto kp_small = KernelParams::raw(3.0, 5.0);
  const auto kp_level = KernelParams::for_level(HalfInt(1), 1.0, 1.0);
  for (int n = 0; n < 4; ++n) {
    CAPTURE(n);
    CHECK(rel(kernel_f_derivative(0.7, kp_small, n), small[n]) <= 1e-12);
    CHECK(rel(kernel_f_derivative(4.8, kp_level, n), level[n]) <= 1e-12);
  }
  CHECK(kernel_f_derivative(4.8, kp_level, 0) == doctest::Approx(kernel_f(4.8, kp_level).to_double()).epsilon(1e-15));
}

TEST_CASE("moment recurrences agree across the forward/backward switch") {
  // J_n is continuous in z; forward (z < 1) and Miller (z >= 1) must meet.
  const auto lo = detail::scaled_moments<double>(std::nextafter(1.0, 0.0), 6);
  const auto hi = detail::scaled_moments<double>(1.0, 6);
  for (int n = 0; n <= 6; ++n) CHECK(rel(lo[n], hi[n]) <= 1e-13);
  const auto ext = detail::scaled_moments<detail::Ext50>(detail::Ext50(37.5), 5);
  const auto dbl = detail::scaled_moments<double>(37.5, 5);
  for (int n = 0; n <= 5; ++n) CHECK(rel(dbl[n], detail::to_double(ext[n])) <= 1e-13);
}

TEST_CASE("kernel params for a level") {
  const auto kp = KernelParams::for_level(HalfInt(1), 1.0, 1.0);
  CHECK(kp.w == doctest::Approx(16.0 * std::numbers::pi));
  CHECK(kp.A == doctest::Approx(64.0 * 16.0 * std::numbers::pi / 3.0));
  CHECK(kp.B == doctest::Approx(32.0 * std::numbers::pi));
  CHECK(kp.consistent_with(HalfInt(1), 1.0, 1.0));
  CHECK_FALSE(kp.consistent_with(HalfInt(2), 1.0, 1.0));
}
