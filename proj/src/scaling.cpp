#include "starkdisk/scaling.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace starkdisk {

namespace {

void require_positive(double value, const char* name) {
  if (!std::isfinite(value) || value <= 0.0) {
    throw std::domain_error(std::string(name) + " must be finite and > 0");
  }
}

// Shared by beta_from_physical and dimensionless_r0 so both produce the
// same bits.
double coulomb_radius(const PhysicalParams& p) {
  return p.electron_mass * p.box_radius * p.coulomb_strength / (p.hbar * p.hbar);
}

}  // namespace

void validate(const PhysicalParams& p) {
  require_positive(p.electron_mass, "electron_mass");
  require_positive(p.coulomb_strength, "coulomb_strength");
  require_positive(p.elementary_charge, "elementary_charge");
  require_positive(p.hbar, "hbar");
  require_positive(p.box_radius, "box_radius");
  if (!std::isfinite(p.field_magnitude)) {
    throw std::domain_error("field_magnitude must be finite");
  }
}

void validate(const ModelParams& p) {
  require_positive(p.r0, "r0");
  if (!std::isfinite(p.lambda)) throw std::domain_error("lambda must be finite");
}

void validate(const BetaParams& p) {
  if (!std::isfinite(p.beta) || p.beta < 0.0) {
    throw std::domain_error("beta must be finite and >= 0");
  }
}

double lambda_from_physical(const PhysicalParams& p) {
  validate(p);
  const double h2 = p.hbar * p.hbar;
  const double k3 = p.coulomb_strength * p.coulomb_strength * p.coulomb_strength;
  return p.field_magnitude * p.elementary_charge * h2 * h2 /
         (p.electron_mass * p.electron_mass * k3);
}

double beta_from_physical(const PhysicalParams& p) {
  validate(p);
  return coulomb_radius(p);
}

double dimensionless_r0(const PhysicalParams& p) {
  validate(p);
  return coulomb_radius(p);
}

ModelParams model_from_physical(const PhysicalParams& p) {
  return ModelParams{dimensionless_r0(p), lambda_from_physical(p)};
}

}  // namespace starkdisk
