#pragma once

// The oracle gate suite: one function per acceptance gate, each returning
// its measured quantities and a pass flag. Shared by the CLI `validate`
// command and the acceptance binary.

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "r3l/parallel.hpp"

namespace r3l {

struct GateResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  /// Named measurements in a fixed order.
  std::vector<std::pair<std::string, double>> metrics;
};

struct ValidationConfig {
  std::uint64_t seed = 20240531;
  std::uint64_t hciz_samples = 1'000'000;
  std::uint64_t full_mc_samples = 10'000'000;
  std::uint64_t condensate_samples = 2'000'000;
  Execution exec{};
};

GateResult gate_algebra(const ValidationConfig& cfg);
GateResult gate_kernel(const ValidationConfig& cfg);
GateResult gate_hciz(const ValidationConfig& cfg);
GateResult gate_andreief(const ValidationConfig& cfg);
GateResult gate_radial(const ValidationConfig& cfg);
GateResult gate_full_mc(const ValidationConfig& cfg);
GateResult gate_degeneracy(const ValidationConfig& cfg);
GateResult gate_toda(const ValidationConfig& cfg);
GateResult gate_resummation(const ValidationConfig& cfg);

/// Gates 1..9 in order. Exceptions inside a gate become a failed result.
std::vector<GateResult> run_validation(const ValidationConfig& cfg);

/// Runs one gate, converting exceptions into a failed result.
GateResult run_gate(int id, const std::string& name, const std::function<GateResult(const ValidationConfig&)>& fn,
                    const ValidationConfig& cfg);

}  // namespace r3l
