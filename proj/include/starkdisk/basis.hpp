#pragma once

#include <compare>
#include <cstddef>
#include <string_view>
#include <vector>

namespace starkdisk {

/// Reflection sector under phi -> -phi. Even functions carry cos(j phi),
/// odd ones sin(j phi).
enum class Parity { Even, Odd };

std::string_view to_string(Parity p);

/// One polynomial basis function r^i (r0 - r) cos|sin(j phi).
struct BasisIndex {
  int i = 0;
  int j = 0;
  Parity parity = Parity::Even;

  friend bool operator==(const BasisIndex&, const BasisIndex&) = default;
};

/// Full basis of one sector truncated at radial power n_max.
struct BasisSpec {
  int n_max = 0;
  Parity parity = Parity::Even;
  double r0 = 1.0;
};

/// Radial functions r^(i+nu) (1 - r), i = 0 .. size-1, on the unit disk.
struct RadialBasisSpec {
  int nu = 0;
  int size = 1;
};

/// (N+1)(N+2)/2 for Even, N(N+1)/2 for Odd.
std::size_t basis_size(const BasisSpec& spec);

/// j-major, i-ascending. This ordering is relied on by matrix layouts and
/// coefficient vectors everywhere else.
std::vector<BasisIndex> enumerate(const BasisSpec& spec);

/// Throws std::domain_error outside 0 <= r <= r0.
double eval(const BasisIndex& idx, double r, double phi, double r0);

/// Throws std::domain_error outside [0, 1] and std::out_of_range for i >= size.
double eval_radial(const RadialBasisSpec& spec, int i, double r);

}  // namespace starkdisk
