#include "r3l/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include "r3l/detail/real.hpp"
#include "r3l/error.hpp"
#include "r3l/exact_partition.hpp"

namespace r3l {

double MCEstimate::z_score(double ref) const {
  const double d = std::abs(mean - ref);
  if (std_err > 0) return d / std_err;
  return d == 0 ? 0.0 : std::numeric_limits<double>::infinity();
}

bool MCEstimate::within(double ref, double n_sigma) const { return z_score(ref) <= n_sigma; }

void QuadratureSpec::validate() const {
  if (!(abs_tol >= 0) || !(rel_tol > 0)) throw DomainError("QuadratureSpec: tolerances must be positive");
  if (max_subdivisions < 1 || panels < 1) throw DomainError("QuadratureSpec: subdivision counts must be >= 1");
}

QuadratureSpec QuadratureSpec::adaptive(double rel_tol) {
  QuadratureSpec q;
  q.rel_tol = rel_tol;
  q.scheme = QuadratureScheme::Adaptive1D;
  return q;
}

QuadratureSpec QuadratureSpec::tensor(double rel_tol, int panels) {
  QuadratureSpec q;
  q.rel_tol = rel_tol;
  q.scheme = QuadratureScheme::TensorGauss;
  q.panels = panels;
  q.max_subdivisions = 64;
  return q;
}

// ---------------------------------------------------------------- kernel

std::pair<double, double> kernel_truncation(double b, double A, double tail_tol) {
  const auto tail = [&](double T) { return std::exp(-A * T * T - b * T) / (2.0 * A * T + b); };
  double hi = 1.0 / (b + std::sqrt(A));
  while (tail(hi) >= tail_tol) hi *= 2.0;
  double lo = hi / 2.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (tail(mid) >= tail_tol ? lo : hi) = mid;
  }
  return {hi, tail(hi)};
}

double quad_kernel_f(double omega, const KernelParams& kp, const QuadratureSpec& q) {
  kp.validate();
  q.validate();
  if (!(omega > 0) || !std::isfinite(omega)) throw DomainError("quad_kernel_f: omega must be finite and > 0");
  const double A = kp.A, b = kp.B * omega;
  // On [0, tau] the exponent is at least -2, which bounds the integral below.
  const double tau = 1.0 / (b + std::sqrt(A));
  const double floor_value = tau * std::exp(-2.0);
  const double tol = std::max(q.abs_tol, q.rel_tol * floor_value);
  const auto [T, tail] = kernel_truncation(b, A, tol / 10.0);
  (void)tail;
  const unsigned depth = static_cast<unsigned>(std::ceil(std::log2(static_cast<double>(q.max_subdivisions))));
  // Integrate in u = t / tau so every panel has O(1) width; the error
  // estimate of the Kronrod rule has an absolute floor that would otherwise
  // dominate when tau is tiny.
  const auto integrand = [&](double u) {
    const double t = u * tau;
    return std::exp(-A * t * t - b * t);
  };
  // Panels end where the exponent A t^2 + b t reaches 2, 4, 6, ..., so each
  // one spans a bounded dynamic range before adaptive refinement starts.
  double I = 0.0, err = 0.0, lo = 0.0;
  const double U = T / tau;
  for (int k = 1; lo < U; ++k) {
    const double hi = std::min(U, 4.0 * k / (tau * (b + std::sqrt(b * b + 8.0 * A * k))));
    double e = 0.0;
    I += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, lo, hi, depth, q.rel_tol, &e);
    err += e;
    lo = hi;
  }
  I *= tau;
  err *= tau;
  if (err > std::max(q.abs_tol, q.rel_tol * std::abs(I))) {
    std::ostringstream msg;
    msg << "quad_kernel_f: tolerance not reached within " << q.max_subdivisions << " subdivisions (error " << err
        << ")";
    throw NumericalError(msg.str());
  }
  return I;
}

// ------------------------------------------------------ radial integral

namespace {

using Gauss20 = boost::math::quadrature::gauss<double, 20>;

struct Rule {
  std::vector<double> x, w;
};

/// Gauss-Legendre 20 on panels [T (k/P)^2, T ((k+1)/P)^2]; the quadratic
/// grading puts most nodes where exp(-B omega t) lives.
Rule graded_rule(double T, int P) {
  std::vector<double> ab, wt;
  for (std::size_t i = 0; i < Gauss20::abscissa().size(); ++i) {
    const double a = Gauss20::abscissa()[i], w = Gauss20::weights()[i];
    ab.push_back(a);
    wt.push_back(w);
    if (a != 0.0) {
      ab.push_back(-a);
      wt.push_back(w);
    }
  }
  Rule r;
  for (int k = 0; k < P; ++k) {
    const double lo = T * std::pow(static_cast<double>(k) / P, 2), hi = T * std::pow(static_cast<double>(k + 1) / P, 2);
    const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    for (std::size_t i = 0; i < ab.size(); ++i) {
      r.x.push_back(mid + half * ab[i]);
      r.w.push_back(half * wt[i]);
    }
  }
  return r;
}

/// Row l of the table: divided difference of exp(-B t x) over x_0..x_l,
/// times sqrt(weight) exp(-A t^2 / 2). Read off the first column of the
/// exponential of the lower bidiagonal matrix with diagonal x.
std::vector<double> phi_table(const Rule& r, std::span<const double> x, const KernelParams& kp) {
  const std::size_t n = x.size();
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    J(i, i) = x[i];
    if (i > 0) J(i, i - 1) = 1.0;
  }
  std::vector<double> tab(r.x.size() * n);
  for (std::size_t p = 0; p < r.x.size(); ++p) {
    const double t = r.x[p];
    const Eigen::MatrixXd E = (-kp.B * t * J).exp();
    const double g = std::sqrt(r.w[p]) * std::exp(-0.5 * kp.A * t * t);
    for (std::size_t l = 0; l < n; ++l) tab[p * n + l] = E(l, 0) * g;
  }
  return tab;
}

double tensor_sum(const std::vector<double>& X, const std::vector<double>& Y, std::size_t n, std::size_t m,
                  const Execution& ex) {
  // det of the n x n matrix with columns taken from table rows p[0..n-1]
  const auto det = [n](const std::vector<double>& T, const std::array<std::size_t, 3>& p) {
    const auto a = [&](std::size_t l, std::size_t c) { return T[p[c] * n + l]; };
    if (n == 1) return a(0, 0);
    if (n == 2) return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
           a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
  };
  std::vector<double> outer(m, 0.0);
  const auto body = [&](std::int64_t i0) {
    double acc = 0.0;
    std::array<std::size_t, 3> p{static_cast<std::size_t>(i0), 0, 0};
    if (n == 1) {
      acc = det(X, p) * det(Y, p);
    } else if (n == 2) {
      for (std::size_t i1 = 0; i1 < m; ++i1) {
        p[1] = i1;
        acc += det(X, p) * det(Y, p);
      }
    } else {
      for (std::size_t i1 = 0; i1 < m; ++i1) {
        p[1] = i1;
        for (std::size_t i2 = 0; i2 < m; ++i2) {
          p[2] = i2;
          acc += det(X, p) * det(Y, p);
        }
      }
    }
    outer[static_cast<std::size_t>(i0)] = acc;
  };
  if (ex.parallel) {
#pragma omp parallel for schedule(static) num_threads(ex.workers())
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(m); ++i) body(i);
  } else {
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(m); ++i) body(i);
  }
  return std::accumulate(outer.begin(), outer.end(), 0.0);
}

double radial_integral(std::span<const double> x, std::span<const double> y, const KernelParams& kp,
                       const QuadratureSpec& q) {
  const std::size_t n = x.size();
  constexpr double L = 80.0;  // exp(-80) below any tolerance in use
  const double x0 = *std::min_element(x.begin(), x.end()), y0 = *std::min_element(y.begin(), y.end());
  const double T = std::min(std::sqrt(L / kp.A), L / (kp.B * (x0 + y0)));
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (int P = q.panels; P <= q.max_subdivisions; P *= 2) {
    const Rule r = graded_rule(T, P);
    const auto X = phi_table(r, x, kp);
    const auto Y = std::equal(x.begin(), x.end(), y.begin()) ? X : phi_table(r, y, kp);
    const double I = tensor_sum(X, Y, n, r.x.size(), q.exec);
    if (std::abs(I - prev) <= q.rel_tol * std::abs(I)) return I;
    prev = I;
  }
  std::ostringstream msg;
  msg << "radial quadrature: no convergence to " << q.rel_tol << " within " << q.max_subdivisions << " panels";
  throw NumericalError(msg.str());
}

void check_radial_args(const Spectrum& s, const KernelParams& kp, HalfInt j, double g2, double lambda) {
  if (s.level() != j) throw DomainError("radial_quadrature_Z: spectrum level does not match j");
  if (j.dim() > 3) throw DomainError("radial_quadrature_Z: tensor quadrature supports 2j+1 <= 3");
  if (!kp.consistent_with(j, g2, lambda))
    throw DomainError("radial_quadrature_Z: kernel parameters inconsistent with (j, g2, lambda)");
}

}  // namespace

double radial_quadrature_Z(const Spectrum& s, const KernelParams& kp, HalfInt j, double g2, double lambda,
                           const QuadratureSpec& q) {
  q.validate();
  check_radial_args(s, kp, j, g2, lambda);
  const double I = radial_integral(s.omegas(), s.omegas(), kp, q);
  return log_normalization(j, g2, lambda).log_abs() + std::log(I);
}

double radial_quadrature_Z_source(const Spectrum& s, std::span<const double> sigma, const KernelParams& kp,
                                  HalfInt j, double g2, double lambda, const QuadratureSpec& q) {
  q.validate();
  check_radial_args(s, kp, j, g2, lambda);
  if (sigma.size() != s.size()) throw DomainError("radial_quadrature_Z_source: sigma length must be 2j+1");
  std::vector<double> y(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    y[k] = s[k] + sigma[k];
    if (!(y[k] > 0)) throw DomainError("radial_quadrature_Z_source: shifted spectrum must stay positive");
  }
  const double I = radial_integral(s.omegas(), y, kp, q);
  return log_normalization(j, g2, lambda).log_abs() + std::log(I);
}

// --------------------------------------------------------------- HCIZ

Eigen::MatrixXcd haar_unitary(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXcd G(n, n);
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < n; ++r) {
      const double re = normal(rng), im = normal(rng);
      G(r, c) = std::complex<double>(re, im) * std::sqrt(0.5);
    }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(G);
  Eigen::MatrixXcd Q = qr.householderQ();
  for (int k = 0; k < n; ++k) {
    const std::complex<double> d = qr.matrixQR()(k, k);
    const double a = std::abs(d);
    if (a > 0) Q.col(k) *= d / a;
  }
  return Q;
}

namespace {

void require_increasing(std::span<const double> v, const char* what) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) throw DomainError(std::string("mc_haar_hciz: ") + what + " must be strictly increasing");
}

struct MomentAcc {
  double n = 0, s_re = 0, s_im = 0, q_re = 0, q_im = 0;
  void merge(const MomentAcc& o) {
    n += o.n;
    s_re += o.s_re;
    s_im += o.s_im;
    q_re += o.q_re;
    q_im += o.q_im;
  }
};

MCEstimate plain_estimate(double n, double s, double q, std::uint64_t seed) {
  MCEstimate e;
  e.n_samples = static_cast<std::uint64_t>(n);
  e.seed = seed;
  e.mean = s / n;
  const double var = std::max(0.0, (q - n * e.mean * e.mean) / (n - 1));
  e.std_err = std::sqrt(var / n);
  e.effective_samples = n;
  return e;
}

}  // namespace

std::complex<double> hciz_closed_form(std::span<const double> a, std::span<const double> b, std::complex<double> z) {
  const std::size_t n = a.size();
  if (b.size() != n || n == 0) throw DomainError("hciz_closed_form: spectra must have equal, nonzero length");
  if (z == std::complex<double>(0.0)) throw DomainError("hciz_closed_form: z must be nonzero");
  require_increasing(a, "lamM");
  require_increasing(b, "lamN");
  Eigen::MatrixXcd E(n, n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = 0; l < n; ++l) E(k, l) = std::exp(z * a[k] * b[l]);
  double pref = 1.0;
  for (std::size_t k = 1; k < n; ++k) pref *= std::tgamma(static_cast<double>(k) + 1.0);
  double vdm = 1.0;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = k + 1; l < n; ++l) vdm *= (a[l] - a[k]) * (b[l] - b[k]);
  const int power = -static_cast<int>(n * (n - 1) / 2);
  return pref * std::pow(z, power) * E.determinant() / vdm;
}

HCIZResult mc_haar_hciz(int n, std::span<const double> lamM, std::span<const double> lamN, std::complex<double> z,
                        std::uint64_t n_samples, std::uint64_t seed, const Execution& ex) {
  if (n < 1 || n > 4) throw DomainError("mc_haar_hciz: n must be in 1..4");
  if (lamM.size() != static_cast<std::size_t>(n) || lamN.size() != static_cast<std::size_t>(n))
    throw DomainError("mc_haar_hciz: spectra must have length n");
  if (n_samples < 2) throw DomainError("mc_haar_hciz: need at least 2 samples");
  HCIZResult out;
  out.closed_form = hciz_closed_form(lamM, lamN, z);
  const std::vector<double> a(lamM.begin(), lamM.end()), b(lamN.begin(), lamN.end());
  const MomentAcc acc = run_blocks<MomentAcc>(n_samples, kSampleBlock, ex, [&](std::uint64_t blk, std::uint64_t,
                                                                               std::uint64_t count) {
    auto rng = block_engine(seed, blk);
    MomentAcc m;
    for (std::uint64_t i = 0; i < count; ++i) {
      const Eigen::MatrixXcd U = haar_unitary(n, rng);
      double s = 0.0;
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) s += a[r] * std::norm(U(r, c)) * b[c];
      const std::complex<double> v = std::exp(z * s);
      m.n += 1;
      m.s_re += v.real();
      m.s_im += v.imag();
      m.q_re += v.real() * v.real();
      m.q_im += v.imag() * v.imag();
    }
    return m;
  });
  out.re = plain_estimate(acc.n, acc.s_re, acc.q_re, seed);
  out.im = plain_estimate(acc.n, acc.s_im, acc.q_im, seed);
  return out;
}

// ------------------------------------------------------------ Andreief

std::pair<LogNumber, LogNumber> andreief_check(const Spectrum& s, const KernelParams& kp) {
  using detail::Ext50;
  kp.validate();
  const std::size_t n = s.size();
  if (n > 4) throw DomainError("andreief_check: n must be <= 4");
  if (s.degenerate()) throw DomainError("andreief_check: spectrum must be non-degenerate");
  const Ext50 A(kp.A), B(kp.B);
  const Ext50 ra = sqrt(A);
  const Ext50 pref = sqrt(detail::pi_v<Ext50>()) / (2 * ra);
  std::vector<Ext50> F(n * n);
  for (std::size_t m = 0; m < n; ++m)
    for (std::size_t k = 0; k < n; ++k)
      F[m * n + k] = pref * detail::erfcx_t<Ext50>(B * (Ext50(s[m]) + Ext50(s[k])) / (2 * ra));
  std::vector<std::size_t> p1(n), p2(n);
  const auto parity = [](const std::vector<std::size_t>& p) {
    int inv = 0;
    for (std::size_t i = 0; i < p.size(); ++i)
      for (std::size_t k = i + 1; k < p.size(); ++k) inv += p[i] > p[k];
    return inv % 2 ? -1 : 1;
  };
  Ext50 sum = 0;
  std::iota(p1.begin(), p1.end(), 0);
  do {
    std::iota(p2.begin(), p2.end(), 0);
    do {
      Ext50 term = parity(p1) * parity(p2);
      for (std::size_t k = 0; k < n; ++k) term *= F[p1[k] * n + p2[k]];
      sum += term;
    } while (std::next_permutation(p2.begin(), p2.end()));
  } while (std::next_permutation(p1.begin(), p1.end()));
  const LogNumber expansion =
      sum == 0 ? LogNumber::zero() : LogNumber::from_log(detail::to_double(log(abs(sum))), sum > 0 ? 1 : -1);

  EngineOptions opt;
  opt.precision = Precision::Extended50;
  const LevelRatio r = level_ratio(s.omegas(), s.omegas(), kp, opt);
  const LogNumber det = LogNumber::factorial(static_cast<unsigned>(n)) * LogNumber::from_log(r.log_det);
  return {expansion, det};
}

// ---------------------------------------------------- full matrix MC

namespace {

struct RatioAcc {
  double n = 0, sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
  void add(double a, double b) {
    n += 1;
    sa += a;
    sb += b;
    saa += a * a;
    sbb += b * b;
    sab += a * b;
  }
  void merge(const RatioAcc& o) {
    n += o.n;
    sa += o.sa;
    sb += o.sb;
    saa += o.saa;
    sbb += o.sbb;
    sab += o.sab;
  }
};

/// mean(a)/mean(b) with its delta-method standard error.
MCEstimate ratio_estimate(const RatioAcc& r, std::uint64_t seed, double ess) {
  MCEstimate e;
  e.n_samples = static_cast<std::uint64_t>(r.n);
  e.seed = seed;
  const double ma = r.sa / r.n, mb = r.sb / r.n;
  const double R = ma / mb;
  const double vaa = (r.saa - r.n * ma * ma) / (r.n - 1);
  const double vbb = (r.sbb - r.n * mb * mb) / (r.n - 1);
  const double vab = (r.sab - r.n * ma * mb) / (r.n - 1);
  e.mean = R;
  e.std_err = std::sqrt(std::max(0.0, vaa - 2 * R * vab + R * R * vbb) / r.n) / mb;
  e.effective_samples = ess;
  return e;
}

struct LevelHalf {
  std::array<double, 4> c{};  // |Phi_mn|^2 coefficient, row-major 2x2
  double A = 0.0;
};

LevelHalf level_half(const ModelParams& p) {
  p.validate();
  if (!p.at_exact_point()) throw DomainError("full matrix MC requires Omega = 1/3");
  const HalfInt j(1);
  const Spectrum s = radial_spectrum(j, p);
  const KernelParams kp = KernelParams::for_level(j, p.g2, p.lambda);
  LevelHalf h;
  for (int m = 0; m < 2; ++m)
    for (int n = 0; n < 2; ++n) h.c[m * 2 + n] = kp.B * (s[m] + s[n]);
  h.A = kp.A;
  return h;
}

/// One Gaussian draw with E|Phi_mn|^2 = 1/c_mn: returns |Phi_mn|^2 and tr((Phi Phi^dag)^2).
struct Draw {
  std::array<double, 4> t{};
  double quartic = 0.0;
};

Draw draw_phi(const std::array<double, 4>& c, std::mt19937_64& rng, std::normal_distribution<double>& normal) {
  std::array<std::complex<double>, 4> phi;
  Draw d;
  for (int k = 0; k < 4; ++k) {
    const double sd = std::sqrt(0.5 / c[k]);
    const double re = normal(rng), im = normal(rng);
    phi[k] = {sd * re, sd * im};
    d.t[k] = std::norm(phi[k]);
  }
  // H = Phi Phi^dag; tr(H^2) = H00^2 + H11^2 + 2|H01|^2
  const double h00 = d.t[0] + d.t[1], h11 = d.t[2] + d.t[3];
  const std::complex<double> h01 = phi[0] * std::conj(phi[2]) + phi[1] * std::conj(phi[3]);
  d.quartic = h00 * h00 + h11 * h11 + 2.0 * std::norm(h01);
  return d;
}

void check_ess(double ess, double n, const char* who) {
  if (ess < kMinEffectiveFraction * n) {
    std::ostringstream msg;
    msg << who << ": effective sample size " << ess << " below threshold " << kMinEffectiveFraction * n;
    throw NumericalError(msg.str());
  }
}

}  // namespace

MCEstimate mc_full_partition_ratio(const ModelParams& p1, const ModelParams& p2, std::uint64_t n_samples,
                                   std::uint64_t seed, const Execution& ex) {
  if (n_samples < 2) throw DomainError("mc_full_partition_ratio: need at least 2 samples");
  const LevelHalf h1 = level_half(p1), h2 = level_half(p2);
  std::array<double, 4> cp;
  for (int k = 0; k < 4; ++k) cp[k] = std::min(h1.c[k], h2.c[k]);
  const RatioAcc acc = run_blocks<RatioAcc>(n_samples, kSampleBlock, ex, [&](std::uint64_t blk, std::uint64_t,
                                                                             std::uint64_t count) {
    auto rng = block_engine(seed, blk);
    std::normal_distribution<double> normal;
    RatioAcc r;
    for (std::uint64_t i = 0; i < count; ++i) {
      const Draw d = draw_phi(cp, rng, normal);
      double e1 = h1.A * d.quartic, e2 = h2.A * d.quartic;
      for (int k = 0; k < 4; ++k) {
        e1 += (h1.c[k] - cp[k]) * d.t[k];
        e2 += (h2.c[k] - cp[k]) * d.t[k];
      }
      r.add(std::exp(-e1), std::exp(-e2));
    }
    return r;
  });
  const double ess = std::min(acc.sa * acc.sa / acc.saa, acc.sb * acc.sb / acc.sbb);
  check_ess(ess, acc.n, "mc_full_partition_ratio");
  return ratio_estimate(acc, seed, ess);
}

MCEstimate mc_condensate(const ModelParams& p, std::uint64_t n_samples, std::uint64_t seed, const Execution& ex) {
  if (n_samples < 2) throw DomainError("mc_condensate: need at least 2 samples");
  const LevelHalf h = level_half(p);
  const RatioAcc acc = run_blocks<RatioAcc>(n_samples, kSampleBlock, ex, [&](std::uint64_t blk, std::uint64_t,
                                                                             std::uint64_t count) {
    auto rng = block_engine(seed, blk);
    std::normal_distribution<double> normal;
    RatioAcc r;
    for (std::uint64_t i = 0; i < count; ++i) {
      const Draw d = draw_phi(h.c, rng, normal);
      const double w = std::exp(-h.A * d.quartic);
      r.add(w * (d.t[0] + d.t[1] + d.t[2] + d.t[3]), w);
    }
    return r;
  });
  const double ess = acc.sb * acc.sb / acc.sbb;
  check_ess(ess, acc.n, "mc_condensate");
  return ratio_estimate(acc, seed, ess);
}

}  // namespace r3l
