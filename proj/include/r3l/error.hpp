#pragma once

#include <stdexcept>
#include <string>

namespace r3l {

/// Invalid input: a precondition on parameters, spectra or levels failed.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure did not reach its tolerance (quadrature,
/// extrapolation, precision escalation, effective sample size).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace r3l
