#pragma once

#include <span>
#include <vector>

#include "r3l/half_int.hpp"
#include "r3l/params.hpp"

namespace r3l {

/// Quadratic kernel of the gauge-fixed action at level j:
/// q(k,l) = M + mu lambda^2 j(j+1) + (2 Omega/lambda^2)(k+l)^2 + (2/lambda^2)(k-l)^2.
class QuadraticKernel {
 public:
  QuadraticKernel(HalfInt j, const ModelParams& p);

  HalfInt level() const { return j_; }
  const ModelParams& params() const { return p_; }
  /// Value at magnetic labels k, l in -j..j.
  double value(double k, double l) const;
  /// Value at storage indices (k = -j + row).
  double at(std::size_t row, std::size_t col) const { return values_[row * j_.dim() + col]; }
  double min_value() const;

 private:
  HalfInt j_;
  ModelParams p_;
  std::vector<double> values_;
};

/// Contiguous run [begin, begin+size) of equal eigenvalues.
struct MultiplicityGroup {
  std::size_t begin = 0;
  std::size_t size = 1;
};

inline constexpr double kDegeneracyRelTol = 1e-12;

/// Partition a sorted list into runs whose neighbours agree to relative tol.
std::vector<MultiplicityGroup> find_groups(std::span<const double> sorted, double rel_tol = kDegeneracyRelTol);

/// Positive eigenvalues omega_m of the level-j kinetic matrix, sorted
/// ascending, with equal-value runs recorded.
class Spectrum {
 public:
  HalfInt level() const { return j_; }
  std::span<const double> omegas() const { return omegas_; }
  std::size_t size() const { return omegas_.size(); }
  double operator[](std::size_t i) const { return omegas_[i]; }
  const std::vector<MultiplicityGroup>& groups() const { return groups_; }
  bool degenerate() const { return groups_.size() != omegas_.size(); }
  /// Number of runs of size >= 2.
  std::size_t degenerate_runs() const;

  /// Sorts and validates. Throws DomainError on length mismatch or a
  /// non-positive / non-finite entry.
  static Spectrum make(HalfInt j, std::vector<double> omegas);

 private:
  HalfInt j_;
  std::vector<double> omegas_;
  std::vector<MultiplicityGroup> groups_;
};

QuadraticKernel kernel(HalfInt j, const ModelParams& p);

/// Diagonal restriction k = l = m of the kernel:
/// omega_m = M + mu lambda^2 j(j+1) + (8 Omega/lambda^2) m^2.
/// This is the bridge used for the (2j+1)-dimensional level matrix; the
/// exact engine accepts any positive spectrum through custom_spectrum.
Spectrum radial_spectrum(HalfInt j, const ModelParams& p);

Spectrum custom_spectrum(HalfInt j, std::vector<double> omegas);

}  // namespace r3l
