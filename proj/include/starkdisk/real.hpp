#pragma once

#include <Eigen/Dense>

namespace starkdisk {

// Working precision of matrix assembly and the eigensolvers. The monomial
// overlap matrices reach condition numbers near 1e18, so the extra bits of
// the x87 format are what keep excited states accurate to ~1e-10.
using Real = long double;
using Matrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using Vector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

}  // namespace starkdisk
