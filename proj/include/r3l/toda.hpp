#pragma once

// Source-coupled level partition function, its Toda time variables and
// the condensate <tr(Phi^dag Phi)> obtained by differentiating in the source.
//
// With a hermitian source Sigma of eigenvalues sigma_k coupled as
// (2w/g2) tr(Phi^dag Sigma Phi), the second HCIZ integral sees the shifted
// spectrum Lambda_k = omega_k + sigma_k and
//   Z_j(Q; Sigma) = N^j (2j+1)! det f(omega_m + Lambda_n) / (Delta(omega) Delta(Lambda)).
// The same ratio can be written as a contour-integral Cauchy-Binet
// determinant, which identifies it with a two-dimensional Toda lattice tau
// function in the times t_n, tbar_n below; that form is a formal identity
// and is not used as a computation path.

#include <span>
#include <vector>

#include "r3l/exact_partition.hpp"

namespace r3l {

struct SourceSpectrum {
  /// sigma_k pairs with the k-th entry of the (sorted) spectrum.
  std::vector<double> sigmas;

  static SourceSpectrum zero(std::size_t n) { return {std::vector<double>(n, 0.0)}; }
  static SourceSpectrum uniform(std::size_t n, double sigma) { return {std::vector<double>(n, sigma)}; }
  /// omega_k + sigma_k; throws DomainError when an entry is not positive.
  std::vector<double> shifted(const Spectrum& s) const;
};

struct TodaTimes {
  std::vector<double> t;      // t_n = (1/n) sum omega_k^n, n = 1..N_max
  std::vector<double> t_bar;  // tbar_n = (1/n) sum (omega_k + sigma_k)^n
};

/// Same code path as partition_level; sigma = 0 returns a bitwise
/// identical result.
PartitionResult partition_with_source(const Spectrum& s, const SourceSpectrum& src, const KernelParams& kp,
                                      HalfInt j, double g2, double lambda, const EngineOptions& opt = {});

TodaTimes toda_times(const Spectrum& s, const SourceSpectrum& src, int n_max);

/// Elementary symmetric polynomials e_0..e_n from power sums p_k = k t_k
/// (Newton identities).
std::vector<double> elementary_from_times(std::span<const double> t, std::size_t n);

enum class CondensateMethod {
  /// d/d delta ln Z(sigma = delta (1,...,1)), which equals sum_k d/d sigma_k
  /// and keeps the degeneracy pattern of the spectrum intact.
  UniformShift,
  /// Separate central differences in each sigma_k, summed (50-digit engine).
  PerComponent,
};

struct CondensateResult {
  /// sum_k d ln Z / d sigma_k at sigma = 0 (Richardson-improved).
  double source_derivative = 0.0;
  /// <tr(Phi^dag Phi)> = -(g2 / 2w) source_derivative.
  double expectation = 0.0;
  /// |Richardson value - step-h/2 value| for the derivative.
  double derivative_error = 0.0;
  double step = 0.0;
};

/// Central differences with step h (h <= 0 selects 1e-4 min omega) and
/// h/2, combined by one Richardson step. Uses divided-difference confluent
/// evaluation so no epsilon-split noise enters the difference quotient.
CondensateResult condensate(const Spectrum& s, const KernelParams& kp, HalfInt j, double g2, double lambda,
                            double h = 0.0, CondensateMethod method = CondensateMethod::UniformShift);

}  // namespace r3l
