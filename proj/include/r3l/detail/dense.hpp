#pragma once

// Small dense kernels for the determinant engine, generic over the scalar
// type. Sizes are at most a few dozen, so everything is O(n^3) and direct.

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

namespace r3l::detail {

template <class Real>
class Dense {
 public:
  explicit Dense(std::size_t n) : n_(n), a_(n * n, Real(0)) {}
  std::size_t n() const { return n_; }
  Real& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  const Real& operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

 private:
  std::size_t n_;
  std::vector<Real> a_;
};

template <class Real>
struct LogDet {
  int sign = 0;
  Real log_abs = 0;
};

/// Diagonal-pivoted Cholesky of a symmetric matrix. Empty when a pivot is
/// not strictly positive (matrix not numerically positive definite).
template <class Real>
std::optional<LogDet<Real>> cholesky_logdet(Dense<Real> m) {
  using std::log;
  using std::sqrt;
  const std::size_t n = m.n();
  LogDet<Real> out{1, Real(0)};
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (m(i, i) > m(piv, piv)) piv = i;
    }
    if (piv != k) {
      for (std::size_t i = 0; i < n; ++i) std::swap(m(k, i), m(piv, i));
      for (std::size_t i = 0; i < n; ++i) std::swap(m(i, k), m(i, piv));
    }
    const Real d = m(k, k);
    if (!(d > 0)) return std::nullopt;
    out.log_abs += log(d);
    const Real r = sqrt(d);
    for (std::size_t i = k + 1; i < n; ++i) m(i, k) /= r;
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j <= i; ++j) {
        m(i, j) -= m(i, k) * m(j, k);
        m(j, i) = m(i, j);
      }
    }
  }
  return out;
}

/// LU factorisation with full pivoting, kept for solves.
template <class Real>
class FullPivotLU {
 public:
  explicit FullPivotLU(Dense<Real> m) : lu_(std::move(m)), rows_(lu_.n()), cols_(lu_.n()) {
    using std::abs;
    using std::log;
    const std::size_t n = lu_.n();
    for (std::size_t i = 0; i < n; ++i) rows_[i] = cols_[i] = i;
    det_.sign = 1;
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t pr = k, pc = k;
      Real best = -1;
      for (std::size_t i = k; i < n; ++i) {
        for (std::size_t j = k; j < n; ++j) {
          if (abs(lu_(i, j)) > best) {
            best = abs(lu_(i, j));
            pr = i;
            pc = j;
          }
        }
      }
      if (best == 0) {
        det_.sign = 0;
        singular_ = true;
        return;
      }
      if (pr != k) {
        for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(pr, j));
        std::swap(rows_[k], rows_[pr]);
        det_.sign = -det_.sign;
      }
      if (pc != k) {
        for (std::size_t i = 0; i < n; ++i) std::swap(lu_(i, k), lu_(i, pc));
        std::swap(cols_[k], cols_[pc]);
        det_.sign = -det_.sign;
      }
      const Real p = lu_(k, k);
      if (p < 0) det_.sign = -det_.sign;
      det_.log_abs += log(abs(p));
      for (std::size_t i = k + 1; i < n; ++i) {
        lu_(i, k) /= p;
        for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= lu_(i, k) * lu_(k, j);
      }
    }
  }

  const LogDet<Real>& logdet() const { return det_; }
  bool singular() const { return singular_; }

  /// Solve A x = b.
  std::vector<Real> solve(const std::vector<Real>& b) const {
    const std::size_t n = lu_.n();
    std::vector<Real> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      Real s = b[rows_[i]];
      for (std::size_t j = 0; j < i; ++j) s -= lu_(i, j) * y[j];
      y[i] = s;
    }
    for (std::size_t i = n; i-- > 0;) {
      Real s = y[i];
      for (std::size_t j = i + 1; j < n; ++j) s -= lu_(i, j) * y[j];
      y[i] = s / lu_(i, i);
    }
    std::vector<Real> x(n);
    for (std::size_t i = 0; i < n; ++i) x[cols_[i]] = y[i];
    return x;
  }

 private:
  Dense<Real> lu_;
  std::vector<std::size_t> rows_, cols_;
  LogDet<Real> det_;
  bool singular_ = false;
};

/// 1-norm condition number from an explicit inverse; +inf when singular.
template <class Real>
double condition_1norm(const Dense<Real>& m, const FullPivotLU<Real>& lu) {
  using std::abs;
  const std::size_t n = m.n();
  if (lu.singular()) return HUGE_VAL;
  Real norm_a = 0, norm_inv = 0;
  for (std::size_t j = 0; j < n; ++j) {
    Real col = 0;
    for (std::size_t i = 0; i < n; ++i) col += abs(m(i, j));
    norm_a = std::max(norm_a, col);
    std::vector<Real> e(n, Real(0));
    e[j] = 1;
    const auto x = lu.solve(e);
    Real ci = 0;
    for (const auto& v : x) ci += abs(v);
    norm_inv = std::max(norm_inv, ci);
  }
  const Real c = norm_a * norm_inv;
  if constexpr (std::is_same_v<Real, double>) {
    return std::isfinite(c) ? c : HUGE_VAL;
  } else {
    return c.template convert_to<double>();
  }
}

}  // namespace r3l::detail
