#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>

#include "r3l/half_int.hpp"

namespace r3l {

using cplx = std::complex<double>;

/// One block M_{2j+1}(C) of the algebra. Row/column index i stores the
/// magnetic label m = -j + i (m increasing with i).
class LevelMatrix {
 public:
  LevelMatrix() = default;
  explicit LevelMatrix(HalfInt j);  // zero matrix
  LevelMatrix(HalfInt j, Eigen::MatrixXcd entries, bool hermitian = false);

  static LevelMatrix identity(HalfInt j);
  /// Canonical basis element v^j_{mn}.
  static LevelMatrix basis(HalfInt j, double m, double n);

  HalfInt level() const { return j_; }
  std::size_t dim() const { return j_.dim(); }
  const Eigen::MatrixXcd& entries() const { return a_; }
  Eigen::MatrixXcd& entries() { return a_; }
  bool hermitian() const { return hermitian_; }

  /// Entry by magnetic labels.
  cplx at(double m, double n) const;
  std::size_t row_of(double m) const;

  LevelMatrix adjoint() const { return {j_, a_.adjoint(), hermitian_}; }

  friend LevelMatrix operator*(const LevelMatrix& a, const LevelMatrix& b);
  friend LevelMatrix operator+(const LevelMatrix& a, const LevelMatrix& b);
  friend LevelMatrix operator-(const LevelMatrix& a, const LevelMatrix& b);
  friend LevelMatrix operator*(cplx s, const LevelMatrix& a) { return {a.j_, s * a.a_}; }

 private:
  HalfInt j_;
  Eigen::MatrixXcd a_;
  bool hermitian_ = false;
};

/// Max |X - X^dagger| entry.
double hermiticity_defect(const Eigen::MatrixXcd& x);
/// Max |X + X^dagger| entry.
double antihermiticity_defect(const Eigen::MatrixXcd& x);
/// Max abs entry.
double max_abs(const Eigen::MatrixXcd& x);

inline constexpr double kHermitianTol = 1e-12;

struct CoordinateSet {
  HalfInt j;
  double lambda = 1.0;
  std::array<LevelMatrix, 3> x;      // x_1, x_2, x_3 (length)
  double x0 = 0.0;                   // lambda * j times the unit (central)
  std::array<LevelMatrix, 3> theta;  // x_alpha / lambda^2 (mass)
};

CoordinateSet make_coordinates(HalfInt j, double lambda);

/// Largest entrywise residual of [x_a, x_b] = i lambda eps_abc x_c and
/// x0^2 + lambda x0 = sum x_i^2.
double check_structure(const CoordinateSet& c);

/// 8 pi lambda^3 (2j+1) tr_j(a b).
cplx ncg_trace(const LevelMatrix& a, const LevelMatrix& b, double lambda);

/// sum_{j=0,1/2..J} 8 pi lambda^3 (2j+1)^2. Grows like J^3 (the volume of a
/// ball of radius lambda*J up to a constant); only used as a diagnostic.
double volume_partial_sum(HalfInt J, double lambda);

/// Levi-Civita symbol on indices 0..2.
int levi_civita(int a, int b, int c);

/// D_alpha(a) = i [theta_alpha, a], alpha in 1..3.
LevelMatrix derivation(int alpha, const LevelMatrix& a, const CoordinateSet& c);

/// Components F_12, F_23, F_31 of
/// F_{mu nu} = [A_mu, A_nu] + (1/lambda) eps_{mu nu g} A_g
/// for anti-hermitian covariant coordinates A.
std::array<LevelMatrix, 3> curvature(const std::array<LevelMatrix, 3>& cov, double lambda);

}  // namespace r3l
