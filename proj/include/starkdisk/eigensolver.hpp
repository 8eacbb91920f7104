#pragma once

#include "starkdisk/real.hpp"

#include <cstddef>
#include <vector>

#include "starkdisk/assembly.hpp"
#include "starkdisk/errors.hpp"

namespace starkdisk {

struct SymmetricEigen {
  Vector values;   // ascending
  Matrix vectors;  // orthonormal columns
  int sweeps = 0;
};

/// Cyclic Jacobi diagonalization of a dense symmetric matrix.
///
/// Converges when the off-diagonal Frobenius norm drops below 1e-14 ||A||_F
/// and gives up after 100 sweeps. Equal eigenvalues are ordered by the row of
/// their eigenvector's largest component. Throws SolverError on
/// non-convergence and std::invalid_argument for non-square or asymmetric
/// input (relative tolerance 1e-12).
SymmetricEigen symmetric_eig(const Matrix& a);

struct EigenSolution {
  Vector eigenvalues;   // ascending
  Matrix coefficients;  // columns in the original basis, S-orthonormal
  Real s_condition = 1.0;      // max / min retained eigenvalue of equilibrated S
  std::size_t dropped = 0;       // near-null overlap directions discarded
};

inline constexpr Real kDefaultOverlapCutoff = 1e-15L;

/// Solves H c = E S c.
///
/// S is first rescaled to unit diagonal, then diagonalized; directions whose
/// eigenvalue falls below cutoff * max are discarded and H is whitened on the
/// rest. The whitened operator is filled once per unordered pair, so it
/// reaches the final diagonalization exactly symmetric. Eigenvalues are
/// unaffected by the rescaling. Throws SolverError if every direction is
/// dropped.
EigenSolution solve_generalized(const MatrixPair& pair, Real cutoff = kDefaultOverlapCutoff);

/// First k eigenvalues. Throws std::out_of_range if k exceeds the retained
/// dimension.
std::vector<Real> lowest_k(const MatrixPair& pair, std::size_t k,
                             Real cutoff = kDefaultOverlapCutoff);

// All quantities are measured in the equilibrated (unit-diagonal S) basis.
struct SolutionDiagnostics {
  // max_k ||H c - E S c|| / ((||H|| + |E| ||S||) ||c||)
  Real max_relative_residual = 0.0;
  // max |c_k^T S c_l - delta_kl|
  Real max_orthonormality_error = 0.0;
  // max |c_k^T S c_l - delta_kl| / (tol + n u ||S|| ||c_k|| ||c_l||): the
  // deviation in units of tolerance plus the rounding floor of evaluating
  // the product itself. Vectors dominated by near-null overlap directions
  // have ||c||^2 up to 1/cutoff, so the floor matters only for them.
  Real orthonormality_excess = 0.0;
};

SolutionDiagnostics diagnose(const MatrixPair& pair, const EigenSolution& solution);

/// When enabled, every solve_generalized call verifies the residual bound
/// (1e-9) and S-orthonormality (1e-9 above the rounding floor) and throws
/// SolverError on violation.
/// Off by default; the test binaries switch it on.
void set_solution_checks(bool enabled);
bool solution_checks_enabled();

inline constexpr Real kResidualTolerance = 1e-9L;

}  // namespace starkdisk
