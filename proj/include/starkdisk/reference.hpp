#pragma once

namespace starkdisk {

/// Zero-field quantum numbers: radial n (0-based) and nu = |m|.
struct DiskLevel {
  int n = 0;
  int nu = 0;
};

/// Integer-order Bessel function of the first kind, x >= 0.
/// Absolute error below 1e-12 for x <= 100.
double bessel_j(int nu, double x);

/// k-th positive zero of J_nu (k >= 1), accurate to ~1e-12.
/// Throws NumericalError if Newton leaves the window around its starting
/// point.
double bessel_zero(int nu, int k);

/// Dirichlet eigenvalue of -1/2 lap on the unit disk: j_{nu,n+1}^2 / 2.
/// This is the r0 -> 0 limit of r0^2 E.
double particle_in_box_energy(const DiskLevel& level);

/// Unconfined two-dimensional hydrogen: -2 / (2n + 2nu + 1)^2.
double free_atom_energy(const DiskLevel& level);

struct ExactGroundState {
  double value;   // R(r)
  double energy;  // always -1/8
};

/// Closed-form ground state of -1/2 lap - (3/4)/r on the unit disk,
/// R(r) = (1-r) exp((1-r)/2) / sqrt(3e - 8), normalized so that the integral
/// of R^2 r dr over [0, 1] is one. Throws std::domain_error outside [0, 1].
ExactGroundState exact_beta34_ground(double r);

}  // namespace starkdisk
