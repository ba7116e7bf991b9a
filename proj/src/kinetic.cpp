#include "r3l/kinetic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "r3l/error.hpp"

namespace r3l {

QuadraticKernel::QuadraticKernel(HalfInt j, const ModelParams& p) : j_(j), p_(p) {
  p_.validate();
  const std::size_t n = j.dim();
  const double l2 = p.lambda * p.lambda;
  const double base = p.M + p.mu * l2 * j.casimir();
  values_.resize(n * n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      const double k = j.m_of(r), l = j.m_of(c);
      values_[r * n + c] = base + (2.0 * p.Omega / l2) * (k + l) * (k + l) + (2.0 / l2) * (k - l) * (k - l);
    }
  }
  if (!(min_value() > 0)) throw DomainError("kernel: non-positive kernel value at level " + j.str());
}

double QuadraticKernel::value(double k, double l) const {
  const double rk = k + j_.value(), rl = l + j_.value();
  if (rk < 0 || rl < 0 || rk > 2 * j_.value() || rl > 2 * j_.value() || rk != std::floor(rk) || rl != std::floor(rl))
    throw DomainError("kernel: labels out of range for j=" + j_.str());
  return at(static_cast<std::size_t>(rk), static_cast<std::size_t>(rl));
}

double QuadraticKernel::min_value() const { return *std::min_element(values_.begin(), values_.end()); }

QuadraticKernel kernel(HalfInt j, const ModelParams& p) { return QuadraticKernel(j, p); }

std::vector<MultiplicityGroup> find_groups(std::span<const double> sorted, double rel_tol) {
  std::vector<MultiplicityGroup> groups;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (!groups.empty()) {
      const double prev = sorted[i - 1];
      if (std::abs(sorted[i] - prev) <= rel_tol * std::max(std::abs(sorted[i]), std::abs(prev))) {
        ++groups.back().size;
        continue;
      }
    }
    groups.push_back({i, 1});
  }
  return groups;
}

std::size_t Spectrum::degenerate_runs() const {
  return static_cast<std::size_t>(std::count_if(groups_.begin(), groups_.end(), [](auto g) { return g.size > 1; }));
}

Spectrum Spectrum::make(HalfInt j, std::vector<double> omegas) {
  if (omegas.size() != j.dim())
    throw DomainError("spectrum: expected " + std::to_string(j.dim()) + " eigenvalues for j=" + j.str() + ", got " +
                      std::to_string(omegas.size()));
  for (double w : omegas) {
    if (!std::isfinite(w) || w <= 0) throw DomainError("spectrum: eigenvalues must be finite and > 0");
  }
  std::sort(omegas.begin(), omegas.end());
  Spectrum s;
  s.j_ = j;
  s.omegas_ = std::move(omegas);
  s.groups_ = find_groups(s.omegas_);
  return s;
}

Spectrum radial_spectrum(HalfInt j, const ModelParams& p) {
  p.validate();
  const double l2 = p.lambda * p.lambda;
  const double base = p.M + p.mu * l2 * j.casimir();
  std::vector<double> w(j.dim());
  for (std::size_t r = 0; r < w.size(); ++r) {
    const double m = j.m_of(r);
    w[r] = base + (8.0 * p.Omega / l2) * m * m;
  }
  return Spectrum::make(j, std::move(w));
}

Spectrum custom_spectrum(HalfInt j, std::vector<double> omegas) { return Spectrum::make(j, std::move(omegas)); }

}  // namespace r3l
