#include "starkdisk/basis.hpp"

#include <cmath>
#include <stdexcept>

namespace starkdisk {

std::string_view to_string(Parity p) { return p == Parity::Even ? "even" : "odd"; }

std::size_t basis_size(const BasisSpec& spec) {
  if (spec.n_max < 0) throw std::domain_error("n_max must be >= 0");
  const auto n = static_cast<std::size_t>(spec.n_max);
  return spec.parity == Parity::Even ? (n + 1) * (n + 2) / 2 : n * (n + 1) / 2;
}

std::vector<BasisIndex> enumerate(const BasisSpec& spec) {
  std::vector<BasisIndex> out;
  out.reserve(basis_size(spec));
  const int j_first = spec.parity == Parity::Even ? 0 : 1;
  for (int j = j_first; j <= spec.n_max; ++j) {
    for (int i = j; i <= spec.n_max; ++i) out.push_back({i, j, spec.parity});
  }
  return out;
}

double eval(const BasisIndex& idx, double r, double phi, double r0) {
  if (!(r >= 0.0 && r <= r0)) throw std::domain_error("basis eval: r outside [0, r0]");
  const double angular =
      idx.parity == Parity::Even ? std::cos(idx.j * phi) : std::sin(idx.j * phi);
  return std::pow(r, idx.i) * (r0 - r) * angular;
}

double eval_radial(const RadialBasisSpec& spec, int i, double r) {
  if (!(r >= 0.0 && r <= 1.0)) throw std::domain_error("radial eval: r outside [0, 1]");
  if (i < 0 || i >= spec.size) throw std::out_of_range("radial eval: index out of range");
  return std::pow(r, i + spec.nu) * (1.0 - r);
}

}  // namespace starkdisk
