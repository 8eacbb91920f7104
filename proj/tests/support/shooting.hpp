#pragma once

// Radial shooting oracle for -1/2 (R'' + R'/r) - beta R / r = E R on (0, 1],
// R(1) = 0, nu = 0. Fixed-step RK4 from a short regular series at the origin.

#include <cmath>
#include <stdexcept>

namespace oracle {

/// R(1) for trial energy E; R(0) = 1.
inline double shoot(double beta, double energy, int steps = 20000) {
  // Regular solution: R = 1 - 2 beta r + (2 beta^2 - E/2) r^2 + ...
  const double r_start = 1e-6;
  const double c2 = (2.0 * beta * beta - 0.5 * energy) * 0.5;
  double r = r_start;
  double y = 1.0 - 2.0 * beta * r + c2 * r * r;
  double dy = -2.0 * beta + 2.0 * c2 * r;
  const double h = (1.0 - r_start) / steps;
  auto accel = [&](double x, double u, double du) {
    return -du / x - 2.0 * (beta / x + energy) * u;
  };
  for (int s = 0; s < steps; ++s) {
    const double k1y = dy;
    const double k1d = accel(r, y, dy);
    const double k2y = dy + 0.5 * h * k1d;
    const double k2d = accel(r + 0.5 * h, y + 0.5 * h * k1y, dy + 0.5 * h * k1d);
    const double k3y = dy + 0.5 * h * k2d;
    const double k3d = accel(r + 0.5 * h, y + 0.5 * h * k2y, dy + 0.5 * h * k2d);
    const double k4y = dy + h * k3d;
    const double k4d = accel(r + h, y + h * k3y, dy + h * k3d);
    y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
    dy += h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
    r += h;
  }
  return y;
}

/// Lowest E with R(1) = 0: scan upward from below the free-atom value for
/// the first sign change of R(1), then bisect.
inline double shooting_ground_energy(double beta) {
  double lo = -2.0 * beta * beta - 1.0;
  const double f_lo = shoot(beta, lo);
  if (!(f_lo > 0.0)) throw std::runtime_error("shooting: lower start already past a node");
  double hi = lo;
  for (int k = 0; k < 4000; ++k) {
    hi = lo + 0.05;
    if (shoot(beta, hi) <= 0.0) break;
    lo = hi;
  }
  if (shoot(beta, hi) > 0.0) throw std::runtime_error("shooting: no sign change found");
  for (int k = 0; k < 60; ++k) {
    const double mid = 0.5 * (lo + hi);
    (shoot(beta, mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace oracle
