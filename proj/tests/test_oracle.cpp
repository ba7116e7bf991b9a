#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "r3l/error.hpp"
#include "r3l/exact_partition.hpp"
#include "r3l/oracle.hpp"

using namespace r3l;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

double engine_ln_z(const Spectrum& s, const EngineOptions& opt = {}) {
  const HalfInt j = s.level();
  return partition_level(s, KernelParams::for_level(j, 1.0, 1.0), j, 1.0, 1.0, opt).log_Z.log_abs();
}

double radial_ln_z(const Spectrum& s, double tol = 1e-10) {
  const HalfInt j = s.level();
  return radial_quadrature_Z(s, KernelParams::for_level(j, 1.0, 1.0), j, 1.0, 1.0, QuadratureSpec::tensor(tol));
}

constexpr double kFAtUnit = 0.15271429035386305083;  // A=64/3, B=2, s=1 (freeze_values.py)

}  // namespace

TEST_CASE("quad_kernel_f examples") {
  CHECK(quad_kernel_f(1e-12, KernelParams::raw(1.0, 1.0)) ==
        doctest::Approx(std::sqrt(std::numbers::pi) / 2).epsilon(1e-11));
  const KernelParams kp = KernelParams::raw(64.0 / 3.0, 2.0);
  const double q = quad_kernel_f(1.0, kp);
  CHECK(rel(q, kFAtUnit) <= 1e-12);
  CHECK(rel(q, kernel_f(1.0, kp).to_double()) <= 1e-10);
  CHECK(std::abs(quad_kernel_f(100.0, kp) / 0.005 - 1.0) <= 0.01);
  CHECK_THROWS_AS(quad_kernel_f(0.0, kp), DomainError);
}

TEST_CASE("quad_kernel_f tail stays below a tenth of the budget") {
  for (double b : {0.01, 1.0, 300.0}) {
    for (double A : {0.1, 30.0, 5000.0}) {
      const auto [T, tail] = kernel_truncation(b, A, 1e-15);
      CHECK(tail < 1e-15);
      CHECK(T > 0);
    }
  }
}

TEST_CASE("quad_kernel_f reports an unreachable tolerance") {
  QuadratureSpec q = QuadratureSpec::adaptive(1e-17);
  q.max_subdivisions = 1;
  CHECK_THROWS_AS(quad_kernel_f(1.0, KernelParams::raw(1.0, 1.0), q), NumericalError);
}

TEST_CASE("radial quadrature matches the engine") {
  const Spectrum a = custom_spectrum(HalfInt(1), {1.0, 2.0});
  CHECK(rel(engine_ln_z(a), radial_ln_z(a)) <= 1e-6);
  CHECK(rel(radial_ln_z(a), -22.219766114388504704) <= 1e-12);

  const Spectrum deg = custom_spectrum(HalfInt(1), {29.0 / 12.0, 29.0 / 12.0});
  EngineOptions conf;
  conf.policy = DegeneracyPolicy::DividedDifference;
  const double r = radial_ln_z(deg);
  CHECK(std::isfinite(r));
  CHECK(rel(engine_ln_z(deg, conf), r) <= 1e-5);

  const Spectrum b = custom_spectrum(HalfInt(2), {1.0, 2.0, 3.0});
  CHECK(rel(engine_ln_z(b), radial_ln_z(b, 1e-8)) <= 1e-5);
}

TEST_CASE("radial quadrature with a source uses the shifted second determinant") {
  const HalfInt j(1);
  const KernelParams kp = KernelParams::for_level(j, 1.0, 1.0);
  const Spectrum s = custom_spectrum(j, {1.0, 2.0});
  const std::vector<double> zero{0.0, 0.0};
  CHECK(radial_quadrature_Z_source(s, zero, kp, j, 1.0, 1.0) ==
        doctest::Approx(radial_quadrature_Z(s, kp, j, 1.0, 1.0)).epsilon(1e-12));
  const std::vector<double> bad{-5.0, 0.0};
  CHECK_THROWS_AS(radial_quadrature_Z_source(s, bad, kp, j, 1.0, 1.0), DomainError);
}

TEST_CASE("radial quadrature rejects large levels and inconsistent constants") {
  const HalfInt j(3);
  const Spectrum s = custom_spectrum(j, {1, 2, 3, 4});
  CHECK_THROWS_AS(radial_quadrature_Z(s, KernelParams::for_level(j, 1, 1), j, 1, 1), DomainError);
  const Spectrum h = custom_spectrum(HalfInt(1), {1, 2});
  CHECK_THROWS_AS(radial_quadrature_Z(h, KernelParams::raw(1, 1), HalfInt(1), 1, 1), DomainError);
}

TEST_CASE("Haar sampling moments") {
  std::mt19937_64 rng(5);
  const int n = 3;
  const int N = 40000;
  double s_abs = 0, s_abs2 = 0, s_re = 0, s_re2 = 0, unitarity = 0;
  for (int i = 0; i < N; ++i) {
    const Eigen::MatrixXcd U = haar_unitary(n, rng);
    unitarity = std::max(unitarity, (U.adjoint() * U - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff());
    const double a = std::norm(U(0, 0));
    s_abs += a;
    s_abs2 += a * a;
    s_re += U(0, 0).real();
    s_re2 += U(0, 0).real() * U(0, 0).real();
  }
  CHECK(unitarity <= 1e-12);
  const double m = s_abs / N, se = std::sqrt((s_abs2 / N - m * m) / N);
  CHECK(std::abs(m - 1.0 / n) <= 3 * se);
  const double mr = s_re / N, ser = std::sqrt((s_re2 / N - mr * mr) / N);
  CHECK(std::abs(mr) <= 3 * ser);
}

TEST_CASE("HCIZ closed form and Monte Carlo") {
  const std::vector<double> a1{0.4}, b1{2.5};
  const auto r1 = mc_haar_hciz(1, a1, b1, -0.3, 100, 1);
  CHECK(r1.closed_form.real() == doctest::Approx(std::exp(-0.3 * 0.4 * 2.5)).epsilon(1e-15));
  CHECK(r1.re.mean == doctest::Approx(r1.closed_form.real()).epsilon(1e-13));

  const std::vector<double> a{1, 2}, b{3, 4};
  const auto r2 = mc_haar_hciz(2, a, b, -0.1, 200000, 17);
  CHECK(r2.re.within(r2.closed_form.real()));
  CHECK(std::abs(r2.closed_form.imag()) <= 1e-14);

  // complex z: both parts estimated
  const auto rc = mc_haar_hciz(2, a, b, {-0.05, 0.2}, 200000, 18);
  CHECK(rc.re.within(rc.closed_form.real()));
  CHECK(rc.im.within(rc.closed_form.imag()));

  const std::vector<double> dup{1, 1};
  CHECK_THROWS_AS(mc_haar_hciz(2, dup, b, -0.1, 10, 1), DomainError);
  CHECK_THROWS_AS(mc_haar_hciz(2, a, b, 0.0, 10, 1), DomainError);
}

TEST_CASE("Andreief expansion equals n! det") {
  const KernelParams k0 = KernelParams::for_level(HalfInt(0), 1, 1);
  const auto [e1, d1] = andreief_check(custom_spectrum(HalfInt(0), {1.3}), k0);
  CHECK(e1.log_abs() == doctest::Approx(kernel_f(2.6, k0).log_abs()).epsilon(1e-14));
  CHECK(d1.log_abs() == doctest::Approx(kernel_f(2.6, k0).log_abs()).epsilon(1e-14));

  const KernelParams k1 = KernelParams::for_level(HalfInt(1), 1, 1);
  const auto [e2, d2] = andreief_check(custom_spectrum(HalfInt(1), {1, 2}), k1);
  const double f2 = kernel_f(2, k1).to_double(), f3 = kernel_f(3, k1).to_double(), f4 = kernel_f(4, k1).to_double();
  CHECK(rel(e2.to_double(), 2 * (f2 * f4 - f3 * f3)) <= 1e-8);
  CHECK(std::abs(e2.log_abs() - d2.log_abs()) <= 1e-12);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.5, 5.0);
  for (unsigned n = 3; n <= 4; ++n) {
    std::vector<double> w(n);
    for (auto& x : w) x = u(rng);
    const HalfInt j(n - 1);
    const auto [e, d] = andreief_check(custom_spectrum(j, w), KernelParams::for_level(j, 1, 1));
    CHECK(e.sign() == 1);
    CHECK(std::abs(std::expm1(e.log_abs() - d.log_abs())) <= 1e-12);
  }
  CHECK_THROWS_AS(andreief_check(custom_spectrum(HalfInt(1), {2, 2}), k1), DomainError);
}

TEST_CASE("full matrix MC ratio") {
  const ModelParams p;
  const auto same = mc_full_partition_ratio(p, p, 100000, 9);
  CHECK(same.mean == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(same.within(1.0));

  ModelParams p2 = p;
  p2.M = 2.0;
  const HalfInt j(1);
  const KernelParams kp = KernelParams::for_level(j, 1, 1);
  const double exact = std::exp(partition_level(radial_spectrum(j, p), kp, j, 1, 1).log_Z.log_abs() -
                                partition_level(radial_spectrum(j, p2), kp, j, 1, 1).log_Z.log_abs());
  const auto r = mc_full_partition_ratio(p, p2, 1000000, 10);
  CHECK(r.within(exact));
  CHECK(r.effective_samples > 0.5 * static_cast<double>(r.n_samples));

  ModelParams off = p;
  off.Omega = 0.5;
  CHECK_THROWS_AS(mc_full_partition_ratio(off, p, 100, 1), DomainError);
}

TEST_CASE("MC condensate decreases with M") {
  ModelParams p, heavy;
  heavy.M = 4.0;
  const auto a = mc_condensate(p, 200000, 4), b = mc_condensate(heavy, 200000, 5);
  CHECK(a.mean > 0);
  CHECK(b.mean < a.mean - 3 * (a.std_err + b.std_err));
}

TEST_CASE("MC results depend only on seed and sample count") {
  const ModelParams p;
  ModelParams p2 = p;
  p2.mu = 4.0;
  const auto s = mc_full_partition_ratio(p, p2, 50000, 77, Execution::serial());
  const auto o = mc_full_partition_ratio(p, p2, 50000, 77, Execution::openmp(3));
  CHECK(s.mean == o.mean);
  CHECK(s.std_err == o.std_err);
  const auto other = mc_full_partition_ratio(p, p2, 50000, 78, Execution::serial());
  CHECK(other.mean != s.mean);

  const std::vector<double> a{1, 2, 3}, b{0.5, 1, 4};
  const auto h1 = mc_haar_hciz(3, a, b, -0.05, 40000, 5, Execution::serial());
  const auto h2 = mc_haar_hciz(3, a, b, -0.05, 40000, 5, Execution::openmp(2));
  CHECK(h1.re.mean == h2.re.mean);
}
