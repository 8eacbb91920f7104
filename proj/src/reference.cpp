#include "starkdisk/reference.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "starkdisk/errors.hpp"

namespace starkdisk {

namespace {

constexpr double kSeriesLimit = 12.0;

// Summed in extended precision: terms reach ~4e3 at x = 12 and cancel.
double bessel_series(int nu, double x) {
  const long double half = 0.5L * x;
  long double term = 1.0L;
  for (int k = 1; k <= nu; ++k) term *= half / k;
  long double sum = term;
  const long double q = half * half;
  for (int k = 1; k < 200; ++k) {
    term *= -q / (static_cast<long double>(k) * (k + nu));
    sum += term;
    if (std::abs(term) < 1e-21L * std::abs(sum) && k > half) break;
  }
  return static_cast<double>(sum);
}

// Miller's backward recurrence J_{k-1} = (2k/x) J_k - J_{k+1}, normalized
// with 1 = J_0 + 2 sum_k J_{2k}.
double bessel_backward(int nu, double x) {
  int start = static_cast<int>(x) + nu + 20 + static_cast<int>(std::sqrt(40.0 * (x + nu)));
  start += start % 2;
  long double next = 0.0L;
  long double current = 1e-30L;
  long double result = 0.0L;
  long double norm = 0.0L;
  for (int k = start; k > 0; --k) {
    const long double previous = 2.0L * k / x * current - next;
    next = current;
    current = previous;
    if (std::abs(current) > 1e250) {
      current *= 1e-250;
      next *= 1e-250;
      result *= 1e-250;
      norm *= 1e-250;
    }
    // current now holds J_{k-1}
    if (k - 1 == nu) result = current;
    if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0 * current;
  }
  norm += current;
  return static_cast<double>(result / norm);
}

}  // namespace

double bessel_j(int nu, double x) {
  if (nu < 0) throw std::domain_error("bessel_j: negative order");
  if (!(x >= 0.0)) throw std::domain_error("bessel_j: negative argument");
  if (x == 0.0) return nu == 0 ? 1.0 : 0.0;
  return x <= kSeriesLimit ? bessel_series(nu, x) : bessel_backward(nu, x);
}

double bessel_zero(int nu, int k) {
  if (nu < 0) throw std::domain_error("bessel_zero: negative order");
  if (k < 1) throw std::domain_error("bessel_zero: k must be >= 1");

  // McMahon: j ~ b - (mu-1)/(8b) - 4(mu-1)(7mu-31)/(3(8b)^3)
  //              - 32(mu-1)(83mu^2-982mu+3779)/(15(8b)^5)
  const double mu = 4.0 * nu * nu;
  const double b = (k + 0.5 * nu - 0.25) * std::numbers::pi;
  const double b8 = 8.0 * b;
  const double guess = b - (mu - 1.0) / b8 -
                       4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * std::pow(b8, 3)) -
                       32.0 * (mu - 1.0) * (83.0 * mu * mu - 982.0 * mu + 3779.0) /
                           (15.0 * std::pow(b8, 5));

  const double window = 0.5 * std::numbers::pi;
  double x = guess;
  double last_step = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < 100; ++iter) {
    const double lower = nu == 0 ? -bessel_j(1, x) : bessel_j(nu - 1, x);
    const double derivative = 0.5 * (lower - bessel_j(nu + 1, x));
    const double step = bessel_j(nu, x) / derivative;
    x -= step;
    if (!std::isfinite(x) || std::abs(x - guess) > window) {
      std::ostringstream msg;
      msg << "bessel_zero(" << nu << ", " << k << "): Newton left the window around " << guess
          << " (iterate " << x << ")";
      throw NumericalError(msg.str());
    }
    // Converged, or the steps have reached the noise level of J itself.
    if (std::abs(step) <= 1e-15 * x) return x;
    if (iter > 2 && std::abs(step) >= std::abs(last_step)) return x;
    last_step = step;
  }
  std::ostringstream msg;
  msg << "bessel_zero(" << nu << ", " << k << "): Newton did not converge from " << guess;
  throw NumericalError(msg.str());
}

double particle_in_box_energy(const DiskLevel& level) {
  if (level.n < 0 || level.nu < 0) throw std::domain_error("disk level must have n, nu >= 0");
  const double zero = bessel_zero(level.nu, level.n + 1);
  return 0.5 * zero * zero;
}

double free_atom_energy(const DiskLevel& level) {
  if (level.n < 0 || level.nu < 0) throw std::domain_error("disk level must have n, nu >= 0");
  const double d = 2.0 * level.n + 2.0 * level.nu + 1.0;
  return -2.0 / (d * d);
}

ExactGroundState exact_beta34_ground(double r) {
  if (!(r >= 0.0 && r <= 1.0)) throw std::domain_error("exact_beta34_ground: r outside [0, 1]");
  const double u = 1.0 - r;
  const double norm = std::sqrt(3.0 * std::numbers::e - 8.0);
  return {u * std::exp(0.5 * u) / norm, -0.125};
}

}  // namespace starkdisk
