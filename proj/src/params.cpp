#include "r3l/params.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "r3l/error.hpp"

namespace r3l {

namespace {
void require(bool ok, const char* field, const char* what, double value) {
  if (!ok) throw DomainError(std::string(field) + " must be " + what + " (got " + std::to_string(value) + ")");
}
}  // namespace

void ModelParams::validate() const {
  require(std::isfinite(lambda) && lambda > 0, "lambda", "> 0", lambda);
  require(std::isfinite(M) && M > 0, "M", "> 0", M);
  require(std::isfinite(mu) && mu > 0, "mu", "> 0", mu);
  require(std::isfinite(Omega) && Omega >= 0, "Omega", ">= 0", Omega);
  require(std::isfinite(g2) && g2 > 0, "g2", "> 0", g2);
}

bool ModelParams::at_exact_point() const { return std::abs(Omega - 1.0 / 3.0) <= 1e-12; }

ModelParams ModelParams::make(double lambda, double M, double mu, double Omega, double g2) {
  ModelParams p{lambda, M, mu, Omega, g2};
  p.validate();
  return p;
}

double level_weight(HalfInt j, double lambda) {
  return 8.0 * std::numbers::pi * lambda * lambda * lambda * static_cast<double>(j.dim());
}

}  // namespace r3l
