#pragma once

// Matrix elements evaluated straight from their defining integrals by
// adaptive quadrature. The kinetic term uses the strong form -1/2 lap f_b
// (the production code uses the weak form), so the two only agree if the
// integration by parts is right.

#include <cmath>
#include <numbers>

#include "starkdisk/basis.hpp"
#include "support/quadrature.hpp"

namespace oracle {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline double angular(const starkdisk::BasisIndex& a, double phi) {
  return a.parity == starkdisk::Parity::Even ? std::cos(a.j * phi) : std::sin(a.j * phi);
}

/// r^p (c - r) evaluated term by term.
inline double wall_poly(int p, double c, double r) { return std::pow(r, p) * (c - r); }

/// (d2/dr2 + 1/r d/dr - m^2/r^2) applied to r^p (c - r): each monomial r^q
/// maps to (q^2 - m^2) r^(q-2).
inline double radial_laplacian(int p, int m, double c, double r) {
  const double lead = static_cast<double>(p * p - m * m);
  const double next = static_cast<double>((p + 1) * (p + 1) - m * m);
  const double first = lead == 0.0 ? 0.0 : c * lead * std::pow(r, p - 2);
  const double second = next == 0.0 ? 0.0 : next * std::pow(r, p - 1);
  return first - second;
}

inline double f2d(const starkdisk::BasisIndex& a, double r, double phi, double r0) {
  return wall_poly(a.i, r0, r) * angular(a, phi);
}

inline double overlap(const starkdisk::BasisIndex& a, const starkdisk::BasisIndex& b,
                      double r0) {
  return integrate2d(
      [&](double phi, double r) { return f2d(a, r, phi, r0) * f2d(b, r, phi, r0) * r; }, 0.0,
      kTwoPi, 0.0, r0);
}

inline double kinetic(const starkdisk::BasisIndex& a, const starkdisk::BasisIndex& b,
                      double r0) {
  return integrate2d(
      [&](double phi, double r) {
        const double lap_b = radial_laplacian(b.i, b.j, r0, r) * angular(b, phi);
        return -0.5 * f2d(a, r, phi, r0) * lap_b * r;
      },
      0.0, kTwoPi, 0.0, r0);
}

/// The 1/r of the potential is cancelled against the r of the measure.
inline double coulomb(const starkdisk::BasisIndex& a, const starkdisk::BasisIndex& b,
                      double r0) {
  return integrate2d(
      [&](double phi, double r) { return -f2d(a, r, phi, r0) * f2d(b, r, phi, r0); }, 0.0,
      kTwoPi, 0.0, r0);
}

inline double stark(const starkdisk::BasisIndex& a, const starkdisk::BasisIndex& b, double r0,
                    double lambda) {
  return integrate2d(
      [&](double phi, double r) {
        return -lambda * f2d(a, r, phi, r0) * f2d(b, r, phi, r0) * r * std::cos(phi) * r;
      },
      0.0, kTwoPi, 0.0, r0);
}

/// <f_a | H | f_b> over the whole disk for functions of any sectors.
inline double hamiltonian(const starkdisk::BasisIndex& a, const starkdisk::BasisIndex& b,
                          double r0, double lambda) {
  return integrate2d(
      [&](double phi, double r) {
        const double fb = f2d(b, r, phi, r0);
        const double lap_b = radial_laplacian(b.i, b.j, r0, r) * angular(b, phi);
        const double fa = f2d(a, r, phi, r0);
        return fa * (-0.5 * lap_b * r - fb - lambda * r * std::cos(phi) * fb * r);
      },
      0.0, kTwoPi, 0.0, r0);
}

// Radial problem on the unit disk, functions r^(i+nu) (1 - r).

inline double radial_overlap(int nu, int i, int k) {
  return integrate(
      [&](double r) { return wall_poly(i + nu, 1.0, r) * wall_poly(k + nu, 1.0, r) * r; }, 0.0,
      1.0);
}

inline double radial_hamiltonian(int nu, int i, int k, double beta) {
  return integrate(
      [&](double r) {
        const double fa = wall_poly(i + nu, 1.0, r);
        const double fb = wall_poly(k + nu, 1.0, r);
        return fa * (-0.5 * radial_laplacian(k + nu, nu, 1.0, r) * r - beta * fb);
      },
      0.0, 1.0);
}

/// max(|a - b| / max(1, |b|)): the "1e-10 absolute or relative, whichever is
/// larger" comparison.
inline double mixed_error(double value, double reference) {
  return std::abs(value - reference) / std::max(1.0, std::abs(reference));
}

}  // namespace oracle
