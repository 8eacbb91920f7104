#pragma once

// Unit conventions. Everything downstream of this header works with the
// dimensionless couplings in ModelParams / BetaParams only.

namespace starkdisk {

/// Raw physical inputs in any self-consistent unit system.
struct PhysicalParams {
  double electron_mass = 1.0;
  double coulomb_strength = 1.0;  // K in -K/r
  double field_magnitude = 0.0;   // signed
  double elementary_charge = 1.0;
  double hbar = 1.0;
  double box_radius = 1.0;
};

/// Dimensionless problem with the Coulomb length unit hbar^2/(m K):
///   H = -1/2 lap - 1/r - lambda r cos(phi),  0 <= r <= r0.
struct ModelParams {
  double r0 = 1.0;
  double lambda = 0.0;
};

/// Zero-field problem on the unit disk (length unit r0):
///   H = -1/2 lap - beta/r.
struct BetaParams {
  double beta = 0.0;
};

/// Throws std::domain_error unless all fields other than the field magnitude
/// are finite and strictly positive.
void validate(const PhysicalParams& p);
void validate(const ModelParams& p);
void validate(const BetaParams& p);

/// f e hbar^4 / (m^2 K^3). Odd in the field magnitude.
double lambda_from_physical(const PhysicalParams& p);

/// m r0 K / hbar^2.
double beta_from_physical(const PhysicalParams& p);

/// Box radius in units of hbar^2/(m K). Numerically identical to beta.
double dimensionless_r0(const PhysicalParams& p);

/// Convenience: both couplings of the Coulomb-unit problem.
ModelParams model_from_physical(const PhysicalParams& p);

}  // namespace starkdisk
