#include "r3l/toda.hpp"

#include <algorithm>
#include <cmath>

#include "r3l/error.hpp"

namespace r3l {

std::vector<double> SourceSpectrum::shifted(const Spectrum& s) const {
  if (sigmas.size() != s.size()) throw DomainError("SourceSpectrum: sigma length must be 2j+1");
  std::vector<double> y(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (!std::isfinite(sigmas[k])) throw DomainError("SourceSpectrum: sigma must be finite");
    y[k] = s[k] + sigmas[k];
    if (!(y[k] > 0)) throw DomainError("SourceSpectrum: shifted spectrum omega + sigma must stay positive");
  }
  return y;
}

PartitionResult partition_with_source(const Spectrum& s, const SourceSpectrum& src, const KernelParams& kp,
                                      HalfInt j, double g2, double lambda, const EngineOptions& opt) {
  if (s.level() != j) throw DomainError("partition_with_source: spectrum level does not match j");
  if (!kp.consistent_with(j, g2, lambda))
    throw DomainError("partition_with_source: kernel parameters inconsistent with (j, g2, lambda)");
  const std::vector<double> y = src.shifted(s);
  const LevelRatio r = level_ratio(s.omegas(), y, kp, opt);
  return assemble_partition(j, g2, lambda, r);
}

TodaTimes toda_times(const Spectrum& s, const SourceSpectrum& src, int n_max) {
  if (n_max < 1) throw DomainError("toda_times: N_max must be >= 1");
  const std::vector<double> y = src.shifted(s);
  TodaTimes out;
  out.t.resize(n_max);
  out.t_bar.resize(n_max);
  for (int n = 1; n <= n_max; ++n) {
    double p = 0.0, pb = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
      p += std::pow(s[k], n);
      pb += std::pow(y[k], n);
    }
    out.t[n - 1] = p / n;
    out.t_bar[n - 1] = pb / n;
  }
  return out;
}

std::vector<double> elementary_from_times(std::span<const double> t, std::size_t n) {
  if (t.size() < n) throw DomainError("elementary_from_times: need at least n times");
  // k e_k = sum_{i=1}^k (-1)^{i-1} e_{k-i} p_i, p_i = i t_i
  std::vector<double> e(n + 1, 0.0);
  e[0] = 1.0;
  for (std::size_t k = 1; k <= n; ++k) {
    double acc = 0.0;
    for (std::size_t i = 1; i <= k; ++i) {
      const double p = static_cast<double>(i) * t[i - 1];
      acc += (i % 2 ? 1.0 : -1.0) * e[k - i] * p;
    }
    e[k] = acc / static_cast<double>(k);
  }
  return e;
}

CondensateResult condensate(const Spectrum& s, const KernelParams& kp, HalfInt j, double g2, double lambda, double h,
                            CondensateMethod method) {
  if (s.level() != j) throw DomainError("condensate: spectrum level does not match j");
  if (!kp.consistent_with(j, g2, lambda))
    throw DomainError("condensate: kernel parameters inconsistent with (j, g2, lambda)");
  const double wmin = s[0];
  if (h <= 0) h = 1e-4 * wmin;
  if (!std::isfinite(h) || h >= wmin) throw DomainError("condensate: step must keep omega - h positive");
  if (h < 1e-12 * wmin) throw NumericalError("condensate: step underflow");

  EngineOptions opt;
  opt.policy = DegeneracyPolicy::DividedDifference;
  if (method == CondensateMethod::PerComponent) opt.precision = Precision::Extended50;
  const auto x = s.omegas();
  const auto log_ratio_at = [&](const std::vector<double>& sigma) {
    std::vector<double> y(x.begin(), x.end());
    for (std::size_t k = 0; k < y.size(); ++k) y[k] += sigma[k];
    return level_ratio(x, y, kp, opt).log_ratio();
  };
  const auto derivative = [&](double step) {
    const std::size_t n = s.size();
    if (method == CondensateMethod::UniformShift) {
      return (log_ratio_at(std::vector<double>(n, step)) - log_ratio_at(std::vector<double>(n, -step))) /
             (2.0 * step);
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      std::vector<double> up(n, 0.0), dn(n, 0.0);
      up[k] = step;
      dn[k] = -step;
      sum += (log_ratio_at(up) - log_ratio_at(dn)) / (2.0 * step);
    }
    return sum;
  };
  const double d1 = derivative(h), d2 = derivative(0.5 * h);
  CondensateResult out;
  out.step = h;
  out.source_derivative = (4.0 * d2 - d1) / 3.0;
  out.derivative_error = std::abs(out.source_derivative - d2);
  out.expectation = -out.source_derivative / kp.B;
  return out;
}

}  // namespace r3l
