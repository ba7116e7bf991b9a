#pragma once

// Batch front-end: commands spectrum | zlevel | resum | toda | condensate |
// validate. Configuration is one JSON document; command-line flags
// override it. Exit codes: 0 success, 1 validation gate failure, 2 config
// error, 3 numerical failure.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "r3l/exact_partition.hpp"
#include "r3l/params.hpp"
#include "r3l/toda.hpp"
#include "r3l/validation.hpp"

namespace r3l::cli {

enum ExitCode : int { kOk = 0, kGateFailure = 1, kConfigError = 2, kNumericalFailure = 3 };

/// Raised for any invalid configuration; the message names the field.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  ModelParams params;
  std::optional<std::uint32_t> twice_j;
  std::optional<std::uint32_t> twice_j_max;
  std::optional<std::vector<double>> spectrum;
  std::map<std::uint32_t, std::vector<double>> spectrum_table;
  std::optional<std::vector<double>> sigma;
  int n_max = 4;
  DegeneracyPolicy policy = DegeneracyPolicy::EpsilonSplit;
  Precision precision = Precision::Auto;
  double step = 0.0;
  CondensateMethod condensate_method = CondensateMethod::UniformShift;
  std::uint64_t seed = 20240531;
  std::optional<std::uint64_t> samples;
  int threads = 0;
  ValidationConfig validation;
  std::string format = "json";
  std::string out;
  bool timestamp = true;

  /// Field-level checks for the selected command; throws ConfigError.
  void validate() const;
};

/// Reads a JSON config document. Unknown keys and wrong types are errors.
RunConfig parse_config_json(const std::string& text);

/// FNV-1a 64 of the canonical JSON of the effective configuration.
std::string config_hash(const RunConfig& cfg);

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace r3l::cli
