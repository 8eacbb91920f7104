#pragma once

#include "starkdisk/real.hpp"

#include <span>
#include <variant>
#include <vector>

#include "starkdisk/basis.hpp"
#include "starkdisk/scaling.hpp"

namespace starkdisk {

/// Overlap and Hamiltonian matrices of one sector at one parameter point.
/// Both are filled once per unordered pair and mirrored, so they are
/// exactly symmetric.
struct MatrixPair {
  Matrix hamiltonian;
  Matrix overlap;
  std::variant<BasisSpec, RadialBasisSpec> spec;
  std::variant<ModelParams, BetaParams> params;
  // Index list behind the rows (2D problem only; empty for radial pairs).
  std::vector<BasisIndex> basis;

  Eigen::Index dimension() const { return overlap.rows(); }
};

/// Integral of r^k over [0, r0]. Throws std::domain_error for k < 0.
Real radial_moment(int k, Real r0);

enum class AngularKind {
  CosCos,        // cos(j phi) cos(j' phi)
  SinSin,        // sin(j phi) sin(j' phi)
  CosPhiCosCos,  // cos(phi) cos(j phi) cos(j' phi)
  CosPhiSinSin,  // cos(phi) sin(j phi) sin(j' phi)
};

/// Integral over one full period 0 <= phi < 2 pi.
Real angular_product_integral(AngularKind kind, int j, int jp);

// Matrix elements between two functions of one sector on the disk of radius
// r0, measure r dr dphi. Mixed-sector arguments throw std::invalid_argument.
Real overlap_element(const BasisIndex& a, const BasisIndex& b, Real r0);
/// 1/2 <grad f_a, grad f_b>, equal to <f_a| -1/2 lap |f_b> for functions
/// vanishing on the wall.
Real kinetic_element(const BasisIndex& a, const BasisIndex& b, Real r0);
Real coulomb_element(const BasisIndex& a, const BasisIndex& b, Real r0);
/// Element of -lambda r cos(phi). Nonzero only for |j - j'| = 1.
Real stark_element(const BasisIndex& a, const BasisIndex& b, Real r0, Real lambda);

/// Throws std::invalid_argument when spec.r0 != params.r0.
MatrixPair assemble(const BasisSpec& spec, const ModelParams& params);

/// Same as above over an arbitrary single-sector subset of functions (used
/// for the fixed-j blocks of the zero-field problem).
MatrixPair assemble(std::span<const BasisIndex> basis, const ModelParams& params);

/// Radial problem of the zero-field Hamiltonian -1/2 lap - beta/r on the unit
/// disk, for psi = R(r) exp(i nu phi). The angular 2 pi is dropped.
MatrixPair assemble_radial(const RadialBasisSpec& spec, const BetaParams& params);

}  // namespace starkdisk
