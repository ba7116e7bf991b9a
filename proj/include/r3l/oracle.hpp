#pragma once

// Brute-force validators for each analytic step of the exact engine:
// quadrature of the kernel and of the radial integral, Haar Monte Carlo of
// the HCIZ integral, the permutation expansion behind the determinant, and
// importance-sampled full matrix integrals at j = 1/2.

#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "r3l/half_int.hpp"
#include "r3l/kinetic.hpp"
#include "r3l/log_number.hpp"
#include "r3l/parallel.hpp"
#include "r3l/params.hpp"
#include "r3l/special.hpp"

namespace r3l {

struct MCEstimate {
  double mean = 0.0;
  double std_err = 0.0;
  std::uint64_t n_samples = 0;
  std::uint64_t seed = 0;
  /// Kish effective sample size for weighted estimators; n_samples otherwise.
  double effective_samples = 0.0;

  /// |mean - ref| / std_err (infinite when std_err is zero and they differ).
  double z_score(double ref) const;
  bool within(double ref, double n_sigma = 3.0) const;
};

enum class QuadratureScheme { Adaptive1D, TensorGauss };

struct QuadratureSpec {
  double abs_tol = 0.0;  // 0: governed by rel_tol alone
  double rel_tol = 1e-12;
  /// Adaptive: bisection budget. Tensor: cap on panels per axis.
  int max_subdivisions = 4096;
  QuadratureScheme scheme = QuadratureScheme::Adaptive1D;
  /// Tensor scheme: starting panels per axis (doubled until converged).
  int panels = 4;
  Execution exec{};

  void validate() const;
  static QuadratureSpec adaptive(double rel_tol = 1e-12);
  static QuadratureSpec tensor(double rel_tol = 1e-9, int panels = 4);
};

/// int_0^inf exp(-A t^2 - B omega t) dt by adaptive Gauss-Kronrod on [0, T],
/// with T chosen so the discarded tail is below a tenth of the tolerance.
double quad_kernel_f(double omega, const KernelParams& kp, const QuadratureSpec& q = QuadratureSpec::adaptive());

/// Right end of the truncated kernel integral and the bound on its tail.
std::pair<double, double> kernel_truncation(double b, double A, double tail_tol);

/// ln Z_j from the radial integral
///   N^j int_{[0,inf)^n} det[phi_l(t_p)]^2 exp(-A sum t^2) dt,
/// where phi_l(t) is the divided difference of exp(-B t w) over
/// omega_0..omega_l (finite at coincident eigenvalues). Tensor composite
/// Gauss-Legendre, panels doubled until two successive values agree to
/// rel_tol. n = 2j+1 <= 3.
double radial_quadrature_Z(const Spectrum& s, const KernelParams& kp, HalfInt j, double g2, double lambda,
                           const QuadratureSpec& q = QuadratureSpec::tensor());

/// Source variant: the two determinants use omega and omega + sigma.
double radial_quadrature_Z_source(const Spectrum& s, std::span<const double> sigma, const KernelParams& kp,
                                  HalfInt j, double g2, double lambda,
                                  const QuadratureSpec& q = QuadratureSpec::tensor());

/// Haar-distributed n x n unitary: QR of a complex Gaussian matrix with the
/// phases of diag(R) moved into Q.
Eigen::MatrixXcd haar_unitary(int n, std::mt19937_64& rng);

struct HCIZResult {
  MCEstimate re;
  MCEstimate im;
  std::complex<double> closed_form;
};

/// MC average of exp(z tr(M U N U^dag)) over Haar U versus
///   prod_{k<n} k! z^{n(1-n)/2} det[exp(z a_k b_l)] / (Delta(a) Delta(b)).
HCIZResult mc_haar_hciz(int n, std::span<const double> lamM, std::span<const double> lamN, std::complex<double> z,
                        std::uint64_t n_samples, std::uint64_t seed, const Execution& ex = {});

/// Closed-form side of mc_haar_hciz alone.
std::complex<double> hciz_closed_form(std::span<const double> a, std::span<const double> b, std::complex<double> z);

/// (sum over permutation pairs of sgn prod f(omega_s1(k) + omega_s2(k)),
///  n! det f(omega_m + omega_n)). Both sides are evaluated with 50-digit
/// arithmetic; the expansion cancels about six digits at n = 4.
std::pair<LogNumber, LogNumber> andreief_check(const Spectrum& s, const KernelParams& kp);

/// Importance-sampling estimate of Z_{1/2}(p1) / Z_{1/2}(p2) over the eight
/// real degrees of freedom of a 2x2 complex Phi with Q = diag(radial
/// spectrum). The proposal is the complex Gaussian whose |Phi_mn|^2
/// coefficient is the smaller of the two models' quadratic coefficients,
/// so both importance weights are bounded by 1.
MCEstimate mc_full_partition_ratio(const ModelParams& p1, const ModelParams& p2, std::uint64_t n_samples,
                                   std::uint64_t seed, const Execution& ex = {});

/// <tr(Phi^dag Phi)> at j = 1/2: exact Gaussian samples of the quadratic
/// part reweighted by the quartic factor.
MCEstimate mc_condensate(const ModelParams& p, std::uint64_t n_samples, std::uint64_t seed,
                         const Execution& ex = {});

/// Minimum Kish effective sample fraction accepted by the weighted MC.
inline constexpr double kMinEffectiveFraction = 1e-3;

}  // namespace r3l
