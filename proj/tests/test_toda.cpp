#include <cmath>
#include <random>

#include "doctest.h"
#include "r3l/error.hpp"
#include "r3l/oracle.hpp"
#include "r3l/toda.hpp"

using namespace r3l;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("zero source reduces to partition_level bitwise") {
  const ModelParams p;
  for (std::uint32_t t = 0; t <= 4; ++t) {
    const HalfInt j(t);
    const KernelParams kp = KernelParams::for_level(j, 1, 1);
    for (const Spectrum& s : {radial_spectrum(j, p), custom_spectrum(j, [&] {
                                std::vector<double> v;
                                for (std::uint32_t k = 0; k <= t; ++k) v.push_back(1.0 + 0.7 * k);
                                return v;
                              }())}) {
      const auto a = partition_level(s, kp, j, 1, 1);
      const auto b = partition_with_source(s, SourceSpectrum::zero(s.size()), kp, j, 1, 1);
      CHECK(a.log_Z == b.log_Z);
      CHECK(a.log_det_f == b.log_det_f);
      CHECK(a.log_vdm_sq == b.log_vdm_sq);
      CHECK(a.log_N == b.log_N);
    }
  }
}

TEST_CASE("j=0 with a source is f(2M + sigma)") {
  const HalfInt j(0);
  const KernelParams kp = KernelParams::for_level(j, 1, 1);
  const auto r = partition_with_source(custom_spectrum(j, {1.5}), {{0.25}}, kp, j, 1, 1);
  CHECK(r.log_Z.log_abs() == doctest::Approx(kernel_f(3.25, kp).log_abs()).epsilon(1e-14));
}

TEST_CASE("source partition function matches the shifted radial quadrature") {
  const HalfInt j(1);
  const KernelParams kp = KernelParams::for_level(j, 1, 1);
  const Spectrum s = custom_spectrum(j, {1, 2});
  const std::vector<double> sigma{0.1, 0.2};
  const double quad = radial_quadrature_Z_source(s, sigma, kp, j, 1, 1, QuadratureSpec::tensor(1e-10));
  CHECK(rel(partition_with_source(s, {sigma}, kp, j, 1, 1).log_Z.log_abs(), quad) <= 1e-6);
}

TEST_CASE("source partition function is symmetric under joint permutation") {
  const HalfInt j(2);
  const KernelParams kp = KernelParams::for_level(j, 1, 1);
  // the spectrum is stored sorted, so permuting (omega, sigma) pairs means
  // re-pairing sigma with the same sorted omegas through custom_spectrum
  const Spectrum s = custom_spectrum(j, {1.0, 2.5, 4.0});
  const std::vector<double> sigma{0.3, -0.2, 0.7};
  const double ref = partition_with_source(s, {sigma}, kp, j, 1, 1).log_Z.log_abs();
  // Lambda = omega + sigma as a set is what matters; shuffle the order
  const std::vector<double> lam{1.3, 2.3, 4.7};
  const std::vector<double> shuffled_lam{4.7, 1.3, 2.3};
  const auto a = level_ratio(s.omegas(), lam, kp), b = level_ratio(std::vector<double>{4.0, 1.0, 2.5}, shuffled_lam, kp);
  CHECK(a.log_ratio() == doctest::Approx(b.log_ratio()).epsilon(1e-13));
  CHECK(ref == doctest::Approx(log_normalization(j, 1, 1).log_abs() + std::lgamma(4.0) + a.log_ratio()).epsilon(1e-13));
}

TEST_CASE("shifted spectrum must stay positive") {
  const HalfInt j(1);
  const KernelParams kp = KernelParams::for_level(j, 1, 1);
  CHECK_THROWS_AS(partition_with_source(custom_spectrum(j, {1, 2}), {{-1.0, 0.0}}, kp, j, 1, 1), DomainError);
  CHECK_THROWS_AS(partition_with_source(custom_spectrum(j, {1, 2}), {{0.0}}, kp, j, 1, 1), DomainError);
}

TEST_CASE("toda times") {
  const Spectrum s = custom_spectrum(HalfInt(1), {1, 2});
  const TodaTimes a = toda_times(s, SourceSpectrum::zero(2), 3);
  CHECK(a.t[0] == 3.0);
  CHECK(a.t_bar[0] == 3.0);
  CHECK(a.t == a.t_bar);
  const TodaTimes b = toda_times(s, SourceSpectrum::uniform(2, 1.0), 2);
  CHECK(b.t[1] == 2.5);
  CHECK(b.t_bar[1] == 6.5);
  CHECK_THROWS_AS(toda_times(s, SourceSpectrum::zero(2), 0), DomainError);
}

TEST_CASE("Newton identities recover the characteristic polynomial") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.5, 3.0);
  for (std::uint32_t t = 0; t <= 6; ++t) {
    std::vector<double> w(t + 1);
    for (auto& x : w) x = u(rng);
    const Spectrum s = custom_spectrum(HalfInt(t), w);
    const TodaTimes tt = toda_times(s, SourceSpectrum::zero(s.size()), static_cast<int>(s.size()));
    const auto e = elementary_from_times(tt.t, s.size());
    // coefficients of prod (x - w_k) = sum (-1)^k e_k x^{n-k}
    std::vector<double> poly{1.0};
    for (double x : s.omegas()) {
      std::vector<double> next(poly.size() + 1, 0.0);
      for (std::size_t i = 0; i < poly.size(); ++i) {
        next[i] += poly[i];
        next[i + 1] -= x * poly[i];
      }
      poly = next;
    }
    for (std::size_t k = 0; k < poly.size(); ++k) {
      const double expect = (k % 2 ? -1.0 : 1.0) * e[k];
      CHECK(std::abs(poly[k] - expect) <= 1e-12 * std::max(1.0, std::abs(poly[k])));
    }
  }
}

TEST_CASE("condensate at j=0 is -f'/f scaled by 1/B") {
  const ModelParams p;
  const HalfInt j(0);
  const KernelParams kp = KernelParams::for_level(j, 1, 1);
  const auto c = condensate(radial_spectrum(j, p), kp, j, 1, 1);
  const double ratio = kernel_f_derivative(2.0, kp, 1) / kernel_f(2.0, kp).to_double();
  CHECK(rel(c.source_derivative, ratio) <= 1e-8);
  CHECK(c.expectation == doctest::Approx(-ratio / kp.B).epsilon(1e-8));
  CHECK(c.expectation > 0);
  CHECK(c.derivative_error < 1e-8 * std::abs(c.source_derivative));
}

TEST_CASE("condensate methods agree and decrease with M") {
  ModelParams p, heavy;
  heavy.M = 2.0;
  for (std::uint32_t t : {1u, 2u, 3u}) {
    const HalfInt j(t);
    const KernelParams kp = KernelParams::for_level(j, 1, 1);
    const auto u = condensate(radial_spectrum(j, p), kp, j, 1, 1);
    const auto c = condensate(radial_spectrum(j, p), kp, j, 1, 1, 0.0, CondensateMethod::PerComponent);
    CHECK(rel(u.expectation, c.expectation) <= 1e-7);
    CHECK(u.expectation > 0);
    const auto h = condensate(radial_spectrum(j, heavy), kp, j, 1, 1);
    CHECK(h.expectation < u.expectation);
  }
}

TEST_CASE("condensate agrees with the matrix-integral MC at j=1/2") {
  const ModelParams p;
  const HalfInt j(1);
  const auto fd = condensate(radial_spectrum(j, p), KernelParams::for_level(j, 1, 1), j, 1, 1);
  const auto mc = mc_condensate(p, 500000, 21);
  CHECK(mc.within(fd.expectation));
}

TEST_CASE("condensate step validation") {
  const HalfInt j(0);
  const KernelParams kp = KernelParams::for_level(j, 1, 1);
  const Spectrum s = custom_spectrum(j, {1.0});
  CHECK_THROWS_AS(condensate(s, kp, j, 1, 1, 2.0), DomainError);
  CHECK_THROWS_AS(condensate(s, kp, j, 1, 1, 1e-15), NumericalError);
}
