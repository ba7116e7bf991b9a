#pragma once

#include "r3l/half_int.hpp"

namespace r3l {

/// Couplings of the gauge-fixed model. Mass dimensions: [lambda] = -1,
/// [M] = 2, [mu] = 4, [Omega] = 0, [g2] = 1.
struct ModelParams {
  double lambda = 1.0;
  double M = 1.0;
  double mu = 1.0;
  double Omega = 1.0 / 3.0;
  double g2 = 1.0;

  /// Throws DomainError naming the offending field.
  void validate() const;
  bool at_exact_point() const;  // Omega == 1/3 to 1e-12

  static ModelParams make(double lambda, double M, double mu, double Omega, double g2);
};

/// w(j) = 8 pi lambda^3 (2j+1), the trace weight of one level.
double level_weight(HalfInt j, double lambda);

}  // namespace r3l
