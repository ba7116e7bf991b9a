#include "r3l/resummation.hpp"

#include <cmath>
#include <exception>
#include <stdexcept>

#include "r3l/error.hpp"

namespace r3l {

namespace {

PartitionResult evaluate_level(const ModelParams& p, HalfInt j, const ResumOptions& opt) {
  Spectrum s;
  if (opt.source == SpectrumSource::Radial) {
    s = radial_spectrum(j, p);
  } else {
    const auto it = opt.table.find(j.twice());
    if (it == opt.table.end()) throw DomainError("resum: custom table has no spectrum for j = " + j.str());
    s = custom_spectrum(j, it->second);
  }
  const KernelParams kp = KernelParams::for_level(j, p.g2, p.lambda);
  return partition_level(s, kp, j, p.g2, p.lambda, opt.engine);
}

std::optional<TailFit> fit_tail(const std::vector<double>& inc) {
  // levels j >= 1 in the last half of the run
  std::vector<double> lx, ly;
  double jmin = 0.0;
  for (std::size_t i = inc.size() / 2; i < inc.size(); ++i) {
    const double j = 0.5 * static_cast<double>(i);
    if (j < 1.0 || inc[i] == 0.0) continue;
    if (lx.empty()) jmin = j;
    lx.push_back(std::log(j));
    ly.push_back(std::log(std::abs(inc[i])));
  }
  if (lx.size() < 3) return std::nullopt;
  const double n = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  TailFit f;
  f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  f.intercept = (sy - f.slope * sx) / n;
  double rss = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - f.intercept - f.slope * lx[i];
    rss += r * r;
  }
  f.rms_residual = std::sqrt(rss / n);
  f.points = static_cast<int>(lx.size());
  f.j_min = jmin;
  return f;
}

}  // namespace

ResumReport resum(const ModelParams& params, HalfInt j_max, const ResumOptions& opt) {
  params.validate();
  if (!params.at_exact_point()) throw DomainError("resum: the exact engine requires Omega = 1/3");
  const std::size_t n = j_max.dim();
  ResumReport rep;
  rep.j_max = j_max;
  rep.levels.resize(n);
  std::vector<std::exception_ptr> errors(n);
  const auto body = [&](std::int64_t i) {
    try {
      rep.levels[i] = evaluate_level(params, HalfInt(static_cast<std::uint32_t>(i)), opt);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (opt.exec.parallel) {
#pragma omp parallel for schedule(dynamic, 1) num_threads(opt.exec.workers())
    for (std::int64_t i = static_cast<std::int64_t>(n) - 1; i >= 0; --i) body(i);
  } else {
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) body(i);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!errors[i]) continue;
    const std::string where = "level j = " + HalfInt(static_cast<std::uint32_t>(i)).str() + ": ";
    try {
      std::rethrow_exception(errors[i]);
    } catch (const NumericalError& e) {
      throw NumericalError(where + e.what());
    } catch (const DomainError& e) {
      throw DomainError(where + e.what());
    }
  }
  rep.increments.resize(n);
  rep.partial_sums.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const LogNumber& z = rep.levels[i].log_Z;
    if (z.sign() != 1) throw NumericalError("resum: non-positive Z at level " + rep.levels[i].j.str());
    rep.increments[i] = z.log_abs();
    rep.partial_sums[i] = (i == 0 ? 0.0 : rep.partial_sums[i - 1]) + rep.increments[i];
  }
  rep.tail_fit = fit_tail(rep.increments);
  const std::size_t start = n / 2;
  if (n - start >= 3) {
    bool up = true, down = true;
    for (std::size_t i = start + 1; i < n; ++i) {
      const double a = std::abs(rep.increments[i - 1]), b = std::abs(rep.increments[i]);
      up = up && b > a;
      down = down && b < a;
    }
    rep.eventually_monotone = up || down;
    rep.tail_direction = up ? 1 : (down ? -1 : 0);
  }
  return rep;
}

}  // namespace r3l
