#pragma once

#include <span>
#include <string>

#include "r3l/half_int.hpp"
#include "r3l/kinetic.hpp"
#include "r3l/log_number.hpp"
#include "r3l/special.hpp"

namespace r3l {

/// How coincident eigenvalues are resolved in det f / Vandermonde^2.
enum class DegeneracyPolicy {
  /// Split each run symmetrically by eps, 2 eps/2, eps/4 and Richardson
  /// extrapolate the (even in eps) log-ratio to eps = 0.
  EpsilonSplit,
  /// Confluent rows/columns: derivative entries f^(i+k)/(i! k!) and a
  /// Vandermonde product over distinct values with multiplicity exponents.
  DividedDifference,
};

enum class Precision { Auto, Double, Extended50, Extended100 };

std::string to_string(DegeneracyPolicy p);
std::string to_string(Precision p);
DegeneracyPolicy parse_policy(const std::string& s);

struct EngineOptions {
  DegeneracyPolicy policy = DegeneracyPolicy::EpsilonSplit;
  Precision precision = Precision::Auto;
  /// First split half-width: split_rel times the run's value, capped at
  /// split_gap_fraction of the gap to the nearest other run over the run
  /// length. Halved twice for the Richardson table.
  double split_rel = 1e-2;
  double split_gap_fraction = 0.02;
  /// Relative tolerance the Richardson table must reach.
  double extrapolation_tol = 1e-9;
  /// Auto precision leaves double once the equilibrated f-matrix
  /// condition estimate exceeds this.
  double double_condition_limit = 1e12;
};

struct EngineDiagnostics {
  /// log10 of the 1-norm condition number of the row/column equilibrated
  /// f-matrix (worst over all evaluations).
  double log10_condition = 0.0;
  int digits = 0;  // decimal digits of the scalar type used
  double extrapolation_error = 0.0;
  int evaluations = 0;
  bool cholesky = false;  // symmetric path factored by Cholesky
};

/// ln det f(x_m + y_n) and ln Delta(x) Delta(y), both in the confluent
/// sense when x or y has coincident entries.
struct LevelRatio {
  double log_det = 0.0;
  double log_vdm = 0.0;
  DegeneracyPolicy policy = DegeneracyPolicy::EpsilonSplit;
  EngineDiagnostics diagnostics;
  double log_ratio() const { return log_det - log_vdm; }
};

/// ln [det f(x_m+y_n) / (Delta(x) Delta(y))] for positive node lists.
/// Inputs need not be sorted; the ratio is symmetric in each list.
LevelRatio level_ratio(std::span<const double> x, std::span<const double> y, const KernelParams& kp,
                       const EngineOptions& opt = {});

struct PartitionResult {
  HalfInt j;
  LogNumber log_Z;
  LogNumber log_N;
  LogNumber log_det_f;
  /// Delta^2(omega) at zero source; Delta(omega) Delta(omega+sigma) with one.
  LogNumber log_vdm_sq;
  DegeneracyPolicy degeneracy_policy_used = DegeneracyPolicy::EpsilonSplit;
  EngineDiagnostics diagnostics;

  /// N (2j+1)! det / vdm, the expression log_Z is built from.
  LogNumber recompose() const;
};

/// prod_{k<l} (v_l - v_k) in input order; sign 0 on exact coincidence.
LogNumber log_vandermonde(std::span<const double> values);
LogNumber log_vandermonde(const Spectrum& s);

/// N^j(g2) = (prod_{k=1}^{2j} k!)^2 (2w/g2)^{-2j(2j+1)}.
LogNumber log_normalization(HalfInt j, double g2, double lambda);

/// Z_j = N^j (2j+1)! det f(omega_m + omega_n) / Delta^2(omega).
PartitionResult partition_level(const Spectrum& s, const KernelParams& kp, HalfInt j, double g2, double lambda,
                                const EngineOptions& opt = {});

/// Assemble a PartitionResult from an already evaluated ratio.
PartitionResult assemble_partition(HalfInt j, double g2, double lambda, const LevelRatio& r);

}  // namespace r3l
