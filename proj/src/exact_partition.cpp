#include "r3l/exact_partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "r3l/detail/dense.hpp"
#include "r3l/detail/real.hpp"
#include "r3l/error.hpp"

namespace r3l {

namespace {

using detail::Dense;

struct Grouped {
  std::vector<double> centers;
  std::vector<int> mult;
  std::size_t size() const {
    std::size_t n = 0;
    for (int k : mult) n += static_cast<std::size_t>(k);
    return n;
  }
  bool degenerate() const { return centers.size() != size(); }
};

Grouped group_nodes(std::span<const double> values) {
  std::vector<double> v(values.begin(), values.end());
  for (double x : v) {
    if (!std::isfinite(x) || x <= 0) throw DomainError("level_ratio: nodes must be finite and > 0");
  }
  std::sort(v.begin(), v.end());
  Grouped g;
  for (const auto& run : find_groups(v)) {
    // centre of the run; exact for true coincidences
    double c = 0.0;
    for (std::size_t i = 0; i < run.size; ++i) c += v[run.begin + i];
    g.centers.push_back(c / static_cast<double>(run.size));
    g.mult.push_back(static_cast<int>(run.size));
  }
  return g;
}

Grouped singletons(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  Grouped g;
  g.centers = std::move(v);
  g.mult.assign(g.centers.size(), 1);
  return g;
}

template <class Real>
struct Evaluation {
  int sign = 0;
  Real log_det = 0;
  Real log_vdm = 0;
  double cond = 0.0;
  bool cholesky = false;
};

template <class Real>
Real log_vdm_grouped(const Grouped& g) {
  using std::log;
  Real s = 0;
  for (std::size_t a = 0; a < g.centers.size(); ++a) {
    for (std::size_t b = a + 1; b < g.centers.size(); ++b) {
      s += Real(g.mult[a] * g.mult[b]) * log(Real(g.centers[b]) - Real(g.centers[a]));
    }
  }
  return s;
}

/// Confluent f-matrix over grouped nodes; plain f(x_m + y_n) when every
/// group is a singleton.
template <class Real>
Evaluation<Real> evaluate(const Grouped& x, const Grouped& y, const KernelParams& kp, bool symmetric) {
  using std::abs;
  using std::log;
  using std::sqrt;
  const std::size_t n = x.size();
  const Real A(kp.A), B(kp.B);
  const Real ra = sqrt(A);
  const Real step = -B / ra;  // f^(p) = step^p J_p / sqrt(A)

  std::vector<Real> inv_fact(n + 1);
  inv_fact[0] = 1;
  for (std::size_t k = 1; k <= n; ++k) inv_fact[k] = inv_fact[k - 1] / Real(k);

  Dense<Real> f(n);
  std::size_t r0 = 0;
  for (std::size_t g = 0; g < x.centers.size(); ++g) {
    std::size_t c0 = 0;
    for (std::size_t h = 0; h < y.centers.size(); ++h) {
      const int top = x.mult[g] - 1 + y.mult[h] - 1;
      const Real z = B * (Real(x.centers[g]) + Real(y.centers[h])) / (2 * ra);
      const auto mom = detail::scaled_moments<Real>(z, top);
      Real pw = 1;
      std::vector<Real> deriv(static_cast<std::size_t>(top) + 1);
      for (int p = 0; p <= top; ++p) {
        deriv[p] = pw * mom[p] / ra;
        pw *= step;
      }
      for (int i = 0; i < x.mult[g]; ++i) {
        for (int k = 0; k < y.mult[h]; ++k) f(r0 + i, c0 + k) = deriv[i + k] * inv_fact[i] * inv_fact[k];
      }
      c0 += static_cast<std::size_t>(y.mult[h]);
    }
    r0 += static_cast<std::size_t>(x.mult[g]);
  }

  Evaluation<Real> out;
  out.log_vdm = log_vdm_grouped<Real>(x) + log_vdm_grouped<Real>(y);

  if (symmetric) {
    // F = D P S P D with D = sqrt(diag F) and P the sign pattern (-1)^i of
    // the derivative rows, so det F = det(D)^2 det S and S is the unit-
    // diagonal positive definite matrix handed to Cholesky.
    std::vector<int> parity(n);
    std::size_t r = 0;
    for (std::size_t g = 0; g < x.centers.size(); ++g) {
      for (int i = 0; i < x.mult[g]; ++i) parity[r + i] = i % 2;
      r += static_cast<std::size_t>(x.mult[g]);
    }
    std::vector<Real> d(n);
    Real log_d = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(f(i, i) > 0)) return out;  // sign 0: not positive definite
      d[i] = sqrt(f(i, i));
      log_d += 2 * log(d[i]);
    }
    Dense<Real> sm(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const Real v = f(i, j) / (d[i] * d[j]);
        sm(i, j) = ((parity[i] + parity[j]) % 2) ? Real(-v) : v;
      }
    }
    detail::FullPivotLU<Real> lu(sm);
    out.cond = detail::condition_1norm(sm, lu);
    if (auto ch = detail::cholesky_logdet(sm)) {
      out.sign = 1;
      out.log_det = log_d + ch->log_abs;
      out.cholesky = true;
    } else {
      out.sign = lu.logdet().sign;
      out.log_det = log_d + lu.logdet().log_abs;
    }
    return out;
  }

  // Row then column max scaling, logs accumulated.
  Real log_scale = 0;
  for (std::size_t i = 0; i < n; ++i) {
    Real m = 0;
    for (std::size_t j = 0; j < n; ++j) m = std::max(m, Real(abs(f(i, j))));
    if (m == 0) return out;
    log_scale += log(m);
    for (std::size_t j = 0; j < n; ++j) f(i, j) /= m;
  }
  for (std::size_t j = 0; j < n; ++j) {
    Real m = 0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, Real(abs(f(i, j))));
    if (m == 0) return out;
    log_scale += log(m);
    for (std::size_t i = 0; i < n; ++i) f(i, j) /= m;
  }
  detail::FullPivotLU<Real> lu(f);
  out.cond = detail::condition_1norm(f, lu);
  out.sign = lu.logdet().sign;
  out.log_det = log_scale + lu.logdet().log_abs;
  return out;
}

std::vector<double> split_run_values(const Grouped& g, double eps_rel, double gap_frac) {
  std::vector<double> out;
  for (std::size_t a = 0; a < g.centers.size(); ++a) {
    const double c = g.centers[a];
    const int k = g.mult[a];
    if (k == 1) {
      out.push_back(c);
      continue;
    }
    double gap = std::numeric_limits<double>::infinity();
    if (a > 0) gap = std::min(gap, c - g.centers[a - 1]);
    if (a + 1 < g.centers.size()) gap = std::min(gap, g.centers[a + 1] - c);
    const double eps = std::min(eps_rel * c, gap_frac * gap / k);
    for (int i = 0; i < k; ++i) out.push_back(c + eps * (i - 0.5 * (k - 1)));
  }
  return out;
}

template <class Real>
int digits_of() {
  return std::numeric_limits<Real>::digits10;
}

/// Returns nullopt when the conditioning exceeds what Real can carry.
template <class Real>
std::optional<LevelRatio> run(const Grouped& x, const Grouped& y, const KernelParams& kp, bool symmetric,
                              const EngineOptions& opt, double cond_limit, bool last_tier) {
  LevelRatio out;
  out.policy = opt.policy;
  out.diagnostics.digits = digits_of<Real>();
  double worst = 0.0;
  bool chol = true;

  auto accept = [&](const Evaluation<Real>& e) {
    worst = std::max(worst, e.cond);
    chol = chol && e.cholesky;
    ++out.diagnostics.evaluations;
    return e.sign == 1 && e.cond <= cond_limit;
  };

  const bool degenerate = x.degenerate() || y.degenerate();
  if (!degenerate || opt.policy == DegeneracyPolicy::DividedDifference) {
    const auto e = evaluate<Real>(x, y, kp, symmetric);
    if (!accept(e)) return std::nullopt;
    out.log_det = detail::to_double(e.log_det);
    out.log_vdm = detail::to_double(e.log_vdm);
    out.policy = degenerate ? DegeneracyPolicy::DividedDifference : opt.policy;
  } else {
    // Richardson on R(eps), even in eps: two elimination steps.
    Real r[3];
    double eps = opt.split_rel, frac = opt.split_gap_fraction;
    for (int s = 0; s < 3; ++s, eps *= 0.5, frac *= 0.5) {
      const Grouped xs = singletons(split_run_values(x, eps, frac));
      const Grouped ys = symmetric ? xs : singletons(split_run_values(y, eps, frac));
      const auto e = evaluate<Real>(xs, ys, kp, symmetric);
      if (!accept(e)) return std::nullopt;
      r[s] = e.log_det - e.log_vdm;
    }
    const Real r1a = (4 * r[1] - r[0]) / 3;
    const Real r1b = (4 * r[2] - r[1]) / 3;
    const Real r2 = (16 * r1b - r1a) / 15;
    using std::abs;
    const double err = detail::to_double(Real(abs(r2 - r1b)));
    const double limit = detail::to_double(r2);
    out.diagnostics.extrapolation_error = err;
    const double required = opt.extrapolation_tol * std::max(1.0, std::abs(limit));
    if (err > required) {
      if (!last_tier) return std::nullopt;
      std::ostringstream msg;
      msg << "epsilon-split extrapolation did not converge: achieved " << err << ", required " << required;
      throw NumericalError(msg.str());
    }
    out.log_vdm = detail::to_double(Real(log_vdm_grouped<Real>(x) + log_vdm_grouped<Real>(y)));
    out.log_det = detail::to_double(Real(r2 + log_vdm_grouped<Real>(x) + log_vdm_grouped<Real>(y)));
  }
  out.diagnostics.log10_condition = std::log10(std::max(worst, 1.0));
  out.diagnostics.cholesky = symmetric && chol;
  return out;
}

}  // namespace

std::string to_string(DegeneracyPolicy p) {
  return p == DegeneracyPolicy::EpsilonSplit ? "epsilon-split" : "divided-difference";
}

std::string to_string(Precision p) {
  switch (p) {
    case Precision::Auto:
      return "auto";
    case Precision::Double:
      return "double";
    case Precision::Extended50:
      return "extended50";
    case Precision::Extended100:
      return "extended100";
  }
  return "auto";
}

DegeneracyPolicy parse_policy(const std::string& s) {
  if (s == "epsilon-split" || s == "epsilon") return DegeneracyPolicy::EpsilonSplit;
  if (s == "divided-difference" || s == "confluent") return DegeneracyPolicy::DividedDifference;
  throw DomainError("unknown degeneracy policy '" + s + "'");
}

LevelRatio level_ratio(std::span<const double> x, std::span<const double> y, const KernelParams& kp,
                       const EngineOptions& opt) {
  kp.validate();
  if (x.size() != y.size() || x.empty()) throw DomainError("level_ratio: node lists must be non-empty and equal length");
  const bool symmetric = std::equal(x.begin(), x.end(), y.begin());
  const Grouped gx = group_nodes(x);
  const Grouped gy = symmetric ? gx : group_nodes(y);

  // double, then 50 and 100 digits; each tier keeps ~12 digits of margin
  const double lim50 = 1e36, lim100 = 1e86;
  switch (opt.precision) {
    case Precision::Double:
      if (auto r = run<double>(gx, gy, kp, symmetric, opt, HUGE_VAL, true)) return *r;
      break;
    case Precision::Extended50:
      if (auto r = run<detail::Ext50>(gx, gy, kp, symmetric, opt, lim50, true)) return *r;
      break;
    case Precision::Extended100:
      if (auto r = run<detail::Ext100>(gx, gy, kp, symmetric, opt, lim100, true)) return *r;
      break;
    case Precision::Auto:
      if (auto r = run<double>(gx, gy, kp, symmetric, opt, opt.double_condition_limit, false)) return *r;
      if (auto r = run<detail::Ext50>(gx, gy, kp, symmetric, opt, lim50, false)) return *r;
      if (auto r = run<detail::Ext100>(gx, gy, kp, symmetric, opt, lim100, true)) return *r;
      break;
  }
  throw NumericalError("f-matrix determinant not resolvable at precision '" + to_string(opt.precision) +
                       "' (non-positive determinant or condition beyond the precision tier)");
}

LogNumber log_vandermonde(std::span<const double> values) {
  LogNumber p = LogNumber::one();
  for (std::size_t k = 0; k < values.size(); ++k) {
    for (std::size_t l = k + 1; l < values.size(); ++l) p *= LogNumber::from_double(values[l] - values[k]);
  }
  return p;
}

LogNumber log_vandermonde(const Spectrum& s) { return log_vandermonde(s.omegas()); }

LogNumber log_normalization(HalfInt j, double g2, double lambda) {
  const KernelParams kp = KernelParams::for_level(j, g2, lambda);
  const unsigned tj = j.twice();
  double log_fact = 0.0;
  for (unsigned k = 1; k <= tj; ++k) log_fact += std::lgamma(static_cast<double>(k) + 1.0);
  const double expo = static_cast<double>(tj) * static_cast<double>(tj + 1);
  return LogNumber::from_log(2.0 * log_fact - expo * std::log(kp.B));
}

LogNumber PartitionResult::recompose() const {
  return log_N * LogNumber::factorial(static_cast<unsigned>(j.dim())) * log_det_f / log_vdm_sq;
}

PartitionResult assemble_partition(HalfInt j, double g2, double lambda, const LevelRatio& r) {
  PartitionResult out;
  out.j = j;
  out.log_N = log_normalization(j, g2, lambda);
  out.log_det_f = LogNumber::from_log(r.log_det);
  out.log_vdm_sq = LogNumber::from_log(r.log_vdm);
  out.degeneracy_policy_used = r.policy;
  out.diagnostics = r.diagnostics;
  out.log_Z = out.recompose();
  return out;
}

PartitionResult partition_level(const Spectrum& s, const KernelParams& kp, HalfInt j, double g2, double lambda,
                                const EngineOptions& opt) {
  if (s.level() != j) throw DomainError("partition_level: spectrum level does not match j");
  if (!kp.consistent_with(j, g2, lambda))
    throw DomainError("partition_level: kernel parameters inconsistent with (j, g2, lambda)");
  const LevelRatio r = level_ratio(s.omegas(), s.omegas(), kp, opt);
  return assemble_partition(j, g2, lambda, r);
}

}  // namespace r3l
