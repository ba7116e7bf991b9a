#pragma once

// Partial sums of W(Q) = sum_j ln Z_j(Q) over levels 0, 1/2, ..., j_max.
// The report is diagnostic: nothing here decides whether W converges.

#include <map>
#include <optional>
#include <vector>

#include "r3l/exact_partition.hpp"
#include "r3l/parallel.hpp"

namespace r3l {

enum class SpectrumSource { Radial, CustomTable };

/// ln|increment| = intercept + slope ln j over the fitted levels.
struct TailFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
  int points = 0;
  double j_min = 0.0;
};

struct ResumReport {
  HalfInt j_max;
  std::vector<double> partial_sums;
  /// ln Z_j per level; partial_sums[i] = partial_sums[i-1] + increments[i]
  /// as computed in double.
  std::vector<double> increments;
  std::vector<PartitionResult> levels;
  std::optional<TailFit> tail_fit;
  /// |increment| is monotone over the last half of the levels.
  bool eventually_monotone = false;
  /// +1 growing, -1 shrinking, 0 undecided, over that window.
  int tail_direction = 0;
};

struct ResumOptions {
  SpectrumSource source = SpectrumSource::Radial;
  /// Custom spectra keyed by 2j; every level up to j_max must be present.
  std::map<std::uint32_t, std::vector<double>> table;
  EngineOptions engine{};
  Execution exec{};
};

/// Requires Omega = 1/3. Engine failures are rethrown with the level named.
ResumReport resum(const ModelParams& params, HalfInt j_max, const ResumOptions& opt = {});

}  // namespace r3l
