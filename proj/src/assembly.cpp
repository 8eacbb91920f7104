#include "starkdisk/assembly.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace starkdisk {

namespace {

constexpr Real kPi = std::numbers::pi_v<Real>;

// Integral of r^k (R - r)^2 over [0, R].
Real wall_moment(int k, Real R) {
  return R * R * radial_moment(k, R) - 2.0 * R * radial_moment(k + 1, R) +
         radial_moment(k + 2, R);
}

// Integral of d/dr[r^p (R - r)] d/dr[r^q (R - r)] r dr over [0, R].
// d/dr[r^p (R - r)] = p R r^(p-1) - (p+1) r^p.
Real derivative_moment(int p, int q, Real R) {
  Real sum = static_cast<Real>(p + 1) * (q + 1) * radial_moment(p + q + 1, R);
  const int cross = p * (q + 1) + q * (p + 1);
  if (cross != 0) sum -= cross * R * radial_moment(p + q, R);
  if (p * q != 0) sum += static_cast<Real>(p) * q * R * R * radial_moment(p + q - 1, R);
  return sum;
}

// 2 pi when both harmonics vanish, pi on the diagonal, zero otherwise.
Real cos_cos(int j, int jp) {
  if (j != jp) return 0.0;
  return j == 0 ? 2.0 * kPi : kPi;
}

Real sin_sin(int j, int jp) { return (j == jp && j != 0) ? kPi : 0.0; }

void require_same_sector(const BasisIndex& a, const BasisIndex& b) {
  if (a.parity != b.parity) throw std::invalid_argument("matrix element across parity sectors");
}

Real plain_angular(const BasisIndex& a, const BasisIndex& b) {
  return angular_product_integral(
      a.parity == Parity::Even ? AngularKind::CosCos : AngularKind::SinSin, a.j, b.j);
}

}  // namespace

Real radial_moment(int k, Real r0) {
  if (k < 0) throw std::domain_error("radial_moment: negative power");
  const int e = k + 1;
  Real power;
  if (e > 60) {
    power = std::pow(r0, e);
  } else {
    power = 1.0;
    for (int n = 0; n < e; ++n) power *= r0;
  }
  return power / e;
}

Real angular_product_integral(AngularKind kind, int j, int jp) {
  // cos(phi) cos(j phi) = [cos((j+1) phi) + cos((j-1) phi)] / 2
  // cos(phi) sin(j phi) = [sin((j+1) phi) + sin((j-1) phi)] / 2
  switch (kind) {
    case AngularKind::CosCos:
      return cos_cos(j, jp);
    case AngularKind::SinSin:
      return sin_sin(j, jp);
    case AngularKind::CosPhiCosCos:
      return 0.5 * (cos_cos(j + 1, jp) + cos_cos(std::abs(j - 1), jp));
    case AngularKind::CosPhiSinSin:
      // sin((j-1) phi) is odd in (j-1), so j = 0 contributes -sin(phi).
      return 0.5 * (sin_sin(j + 1, jp) + (j >= 1 ? sin_sin(j - 1, jp) : -sin_sin(1, jp)));
  }
  return 0.0;
}

Real overlap_element(const BasisIndex& a, const BasisIndex& b, Real r0) {
  require_same_sector(a, b);
  const Real ang = plain_angular(a, b);
  if (ang == 0.0) return 0.0;
  return ang * wall_moment(a.i + b.i + 1, r0);
}

Real kinetic_element(const BasisIndex& a, const BasisIndex& b, Real r0) {
  require_same_sector(a, b);
  const Real ang = plain_angular(a, b);
  if (ang == 0.0) return 0.0;
  // d/dphi turns cos into -j sin and sin into j cos; with j = j' both
  // products integrate to the same pi.
  Real value = ang * derivative_moment(a.i, b.i, r0);
  if (a.j != 0) {
    const Real ang_phi = static_cast<Real>(a.j) * b.j *
                           (a.parity == Parity::Even ? sin_sin(a.j, b.j) : cos_cos(a.j, b.j));
    value += ang_phi * wall_moment(a.i + b.i - 1, r0);
  }
  return 0.5 * value;
}

Real coulomb_element(const BasisIndex& a, const BasisIndex& b, Real r0) {
  require_same_sector(a, b);
  const Real ang = plain_angular(a, b);
  if (ang == 0.0) return 0.0;
  return -ang * wall_moment(a.i + b.i, r0);
}

Real stark_element(const BasisIndex& a, const BasisIndex& b, Real r0, Real lambda) {
  require_same_sector(a, b);
  if (std::abs(a.j - b.j) != 1) return 0.0;
  const Real ang = angular_product_integral(
      a.parity == Parity::Even ? AngularKind::CosPhiCosCos : AngularKind::CosPhiSinSin, a.j, b.j);
  // Kept as lambda * (unit-field element) so H is exactly linear in lambda.
  return lambda * -(ang * wall_moment(a.i + b.i + 2, r0));
}

MatrixPair assemble(std::span<const BasisIndex> basis, const ModelParams& params) {
  validate(params);
  const auto n = static_cast<Eigen::Index>(basis.size());
  MatrixPair pair;
  pair.hamiltonian = Matrix::Zero(n, n);
  pair.overlap = Matrix::Zero(n, n);
  pair.params = params;
  pair.basis.assign(basis.begin(), basis.end());
  int n_max = 0;
  for (const auto& idx : basis) n_max = std::max(n_max, idx.i);
  pair.spec = BasisSpec{n_max, basis.empty() ? Parity::Even : basis.front().parity, params.r0};

  const Real r0 = params.r0;
  for (Eigen::Index row = 0; row < n; ++row) {
    for (Eigen::Index col = row; col < n; ++col) {
      const auto& a = basis[static_cast<std::size_t>(row)];
      const auto& b = basis[static_cast<std::size_t>(col)];
      const Real s = overlap_element(a, b, r0);
      const Real h = kinetic_element(a, b, r0) + coulomb_element(a, b, r0) +
                       stark_element(a, b, r0, params.lambda);
      pair.overlap(row, col) = s;
      pair.overlap(col, row) = s;
      pair.hamiltonian(row, col) = h;
      pair.hamiltonian(col, row) = h;
    }
  }
  return pair;
}

MatrixPair assemble(const BasisSpec& spec, const ModelParams& params) {
  if (spec.r0 != params.r0) throw std::invalid_argument("assemble: basis r0 differs from model r0");
  const auto basis = enumerate(spec);
  auto pair = assemble(std::span<const BasisIndex>(basis), params);
  pair.spec = spec;
  return pair;
}

MatrixPair assemble_radial(const RadialBasisSpec& spec, const BetaParams& params) {
  validate(params);
  if (spec.nu < 0 || spec.size < 1) throw std::domain_error("assemble_radial: invalid basis spec");
  const Eigen::Index n = spec.size;
  MatrixPair pair;
  pair.hamiltonian = Matrix::Zero(n, n);
  pair.overlap = Matrix::Zero(n, n);
  pair.spec = spec;
  pair.params = params;

  const Real nu2 = static_cast<Real>(spec.nu) * spec.nu;
  for (Eigen::Index row = 0; row < n; ++row) {
    for (Eigen::Index col = row; col < n; ++col) {
      const int p = static_cast<int>(row) + spec.nu;
      const int q = static_cast<int>(col) + spec.nu;
      const Real s = wall_moment(p + q + 1, 1.0);
      Real kinetic = derivative_moment(p, q, 1.0);
      if (spec.nu != 0) kinetic += nu2 * wall_moment(p + q - 1, 1.0);
      const Real h = 0.5 * kinetic - params.beta * wall_moment(p + q, 1.0);
      pair.overlap(row, col) = s;
      pair.overlap(col, row) = s;
      pair.hamiltonian(row, col) = h;
      pair.hamiltonian(col, row) = h;
    }
  }
  return pair;
}

}  // namespace starkdisk
