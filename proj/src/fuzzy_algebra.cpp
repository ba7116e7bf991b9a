#include "r3l/fuzzy_algebra.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "r3l/error.hpp"

namespace r3l {

namespace {

void require_same_level(const LevelMatrix& a, const LevelMatrix& b, const char* op) {
  if (a.level() != b.level())
    throw DomainError(std::string(op) + ": level mismatch (" + a.level().str() + " vs " + b.level().str() + ")");
}

}  // namespace

LevelMatrix::LevelMatrix(HalfInt j) : j_(j), a_(Eigen::MatrixXcd::Zero(j.dim(), j.dim())), hermitian_(true) {}

LevelMatrix::LevelMatrix(HalfInt j, Eigen::MatrixXcd entries, bool hermitian)
    : j_(j), a_(std::move(entries)), hermitian_(hermitian) {
  if (static_cast<std::size_t>(a_.rows()) != j.dim() || static_cast<std::size_t>(a_.cols()) != j.dim())
    throw DomainError("LevelMatrix: entries must be (2j+1)x(2j+1) for j=" + j.str());
  if (hermitian_ && hermiticity_defect(a_) > kHermitianTol)
    throw DomainError("LevelMatrix: hermitian flag set on a non-hermitian matrix");
}

LevelMatrix LevelMatrix::identity(HalfInt j) {
  return {j, Eigen::MatrixXcd::Identity(j.dim(), j.dim()), true};
}

LevelMatrix LevelMatrix::basis(HalfInt j, double m, double n) {
  LevelMatrix v(j);
  v.hermitian_ = (m == n);
  v.a_(v.row_of(m), v.row_of(n)) = 1.0;
  return v;
}

std::size_t LevelMatrix::row_of(double m) const {
  const double twice = 2.0 * (m + j_.value());
  if (twice < 0 || twice > 2.0 * static_cast<double>(j_.twice()) || std::fmod(twice, 2.0) != 0.0)
    throw DomainError("LevelMatrix: label m=" + std::to_string(m) + " is not in -j..j for j=" + j_.str());
  return static_cast<std::size_t>(twice / 2.0);
}

cplx LevelMatrix::at(double m, double n) const { return a_(row_of(m), row_of(n)); }

LevelMatrix operator*(const LevelMatrix& a, const LevelMatrix& b) {
  require_same_level(a, b, "product");
  return {a.j_, a.a_ * b.a_};
}

LevelMatrix operator+(const LevelMatrix& a, const LevelMatrix& b) {
  require_same_level(a, b, "sum");
  return {a.j_, a.a_ + b.a_};
}

LevelMatrix operator-(const LevelMatrix& a, const LevelMatrix& b) {
  require_same_level(a, b, "difference");
  return {a.j_, a.a_ - b.a_};
}

double max_abs(const Eigen::MatrixXcd& x) { return x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff(); }
double hermiticity_defect(const Eigen::MatrixXcd& x) { return max_abs(x - x.adjoint()); }
double antihermiticity_defect(const Eigen::MatrixXcd& x) { return max_abs(x + x.adjoint()); }

CoordinateSet make_coordinates(HalfInt j, double lambda) {
  if (!(lambda > 0)) throw DomainError("make_coordinates: lambda must be > 0");
  const auto n = static_cast<Eigen::Index>(j.dim());
  const double jv = j.value();
  Eigen::MatrixXcd x1 = Eigen::MatrixXcd::Zero(n, n), x2 = x1, x3 = x1;
  const cplx i{0.0, 1.0};
  for (Eigen::Index r = 0; r < n; ++r) {
    const double m = j.m_of(static_cast<std::size_t>(r));
    x3(r, r) = lambda * m;
    if (r > 0) {  // v_{m,m-1}
      const double c = 0.5 * lambda * std::sqrt((jv + m) * (jv - m + 1.0));
      x1(r, r - 1) = c;
      x2(r, r - 1) = -i * c;
    }
    if (r + 1 < n) {  // v_{m,m+1}
      const double c = 0.5 * lambda * std::sqrt((jv - m) * (jv + m + 1.0));
      x1(r, r + 1) = c;
      x2(r, r + 1) = i * c;
    }
  }
  CoordinateSet out;
  out.j = j;
  out.lambda = lambda;
  out.x = {LevelMatrix(j, x1, true), LevelMatrix(j, x2, true), LevelMatrix(j, x3, true)};
  out.x0 = lambda * jv;
  const double s = 1.0 / (lambda * lambda);
  for (int a = 0; a < 3; ++a) out.theta[a] = LevelMatrix(j, s * out.x[a].entries(), true);
  return out;
}

int levi_civita(int a, int b, int c) {
  if (a == b || b == c || a == c) return 0;
  return ((a + 1) % 3 == b) ? 1 : -1;
}

double check_structure(const CoordinateSet& c) {
  const auto n = static_cast<Eigen::Index>(c.j.dim());
  const cplx i{0.0, 1.0};
  double res = 0.0;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      const Eigen::MatrixXcd& xa = c.x[a].entries();
      const Eigen::MatrixXcd& xb = c.x[b].entries();
      Eigen::MatrixXcd lhs = xa * xb - xb * xa;
      for (int g = 0; g < 3; ++g) {
        if (const int e = levi_civita(a, b, g)) lhs -= (i * c.lambda * static_cast<double>(e)) * c.x[g].entries();
      }
      res = std::max(res, max_abs(lhs));
    }
  }
  Eigen::MatrixXcd cas = -(c.x0 * c.x0 + c.lambda * c.x0) * Eigen::MatrixXcd::Identity(n, n);
  for (const auto& x : c.x) cas += x.entries() * x.entries();
  return std::max(res, max_abs(cas));
}

cplx ncg_trace(const LevelMatrix& a, const LevelMatrix& b, double lambda) {
  require_same_level(a, b, "ncg_trace");
  return 8.0 * std::numbers::pi * lambda * lambda * lambda * static_cast<double>(a.dim()) *
         (a.entries() * b.entries()).trace();
}

double volume_partial_sum(HalfInt J, double lambda) {
  double s = 0.0;
  for (std::uint32_t t = 0; t <= J.twice(); ++t) {
    const double d = static_cast<double>(t) + 1.0;
    s += d * d;
  }
  return 8.0 * std::numbers::pi * lambda * lambda * lambda * s;
}

LevelMatrix derivation(int alpha, const LevelMatrix& a, const CoordinateSet& c) {
  if (alpha < 1 || alpha > 3) throw DomainError("derivation: alpha must be 1, 2 or 3");
  if (a.level() != c.j) throw DomainError("derivation: level mismatch");
  const Eigen::MatrixXcd& th = c.theta[alpha - 1].entries();
  return {a.level(), cplx{0.0, 1.0} * (th * a.entries() - a.entries() * th)};
}

std::array<LevelMatrix, 3> curvature(const std::array<LevelMatrix, 3>& cov, double lambda) {
  for (const auto& a : cov) {
    if (a.level() != cov[0].level()) throw DomainError("curvature: level mismatch");
    if (antihermiticity_defect(a.entries()) > kHermitianTol)
      throw DomainError("curvature: covariant coordinates must be anti-hermitian");
  }
  auto component = [&](int mu, int nu) {
    const Eigen::MatrixXcd& am = cov[mu].entries();
    const Eigen::MatrixXcd& an = cov[nu].entries();
    Eigen::MatrixXcd f = am * an - an * am;
    for (int g = 0; g < 3; ++g) {
      if (const int e = levi_civita(mu, nu, g)) f += (static_cast<double>(e) / lambda) * cov[g].entries();
    }
    return LevelMatrix(cov[0].level(), std::move(f));
  };
  return {component(0, 1), component(1, 2), component(2, 0)};
}

}  // namespace r3l
