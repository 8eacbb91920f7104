#include "starkdisk/eigensolver.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <cmath>
#include <numeric>
#include <sstream>

namespace starkdisk {

namespace {

std::atomic<bool> g_checks{false};

constexpr int kMaxSweeps = 100;
constexpr Real kOffDiagonalTolerance = 1e-14;
constexpr Real kSymmetryTolerance = 1e-12;
// Entries below eps * 1e-6 * ||A|| are treated as zero outright.
constexpr Real kNegligibleScale = 1e-6;

Real off_diagonal_norm(const Matrix& a) {
  Real sum = 0.0;
  for (Eigen::Index q = 0; q < a.cols(); ++q) {
    for (Eigen::Index p = 0; p < q; ++p) sum += 2.0 * a(p, q) * a(p, q);
  }
  return std::sqrt(sum);
}

Eigen::Index dominant_row(const Vector& v) {
  Eigen::Index row = 0;
  v.cwiseAbs().maxCoeff(&row);
  return row;
}

// Ascending order; runs of equal values are ordered by dominant row.
std::vector<Eigen::Index> eigen_order(const Vector& values, const Matrix& vectors) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return values(a) < values(b); });
  std::size_t first = 0;
  while (first < order.size()) {
    std::size_t last = first + 1;
    while (last < order.size() && values(order[last]) == values(order[first])) ++last;
    if (last - first > 1) {
      std::stable_sort(order.begin() + static_cast<std::ptrdiff_t>(first),
                       order.begin() + static_cast<std::ptrdiff_t>(last),
                       [&](Eigen::Index a, Eigen::Index b) {
                         return dominant_row(vectors.col(a)) < dominant_row(vectors.col(b));
                       });
    }
    first = last;
  }
  return order;
}

void require_symmetric(const Matrix& a, const char* what) {
  if (a.rows() != a.cols()) throw std::invalid_argument(std::string(what) + ": matrix not square");
  const Real scale = a.norm();
  const Real asym = (a - a.transpose()).norm();
  if (asym > kSymmetryTolerance * scale) {
    std::ostringstream msg;
    msg << what << ": matrix not symmetric (relative asymmetry " << asym / scale << ")";
    throw std::invalid_argument(msg.str());
  }
}

struct Whitening {
  Vector scale;     // D = diag(S)^-1/2
  Matrix transform;  // X: equilibrated basis -> whitened coordinates
  Real s_condition = 1.0;
  std::size_t dropped = 0;
};

Whitening whiten(const Matrix& overlap, Real cutoff) {
  const Eigen::Index n = overlap.rows();
  Whitening w;
  w.scale.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Real d = overlap(i, i);
    if (!(d > 0.0)) throw SolverError("overlap matrix has a nonpositive diagonal entry");
    w.scale(i) = 1.0 / std::sqrt(d);
  }
  const Matrix equilibrated = w.scale.asDiagonal() * overlap * w.scale.asDiagonal();
  const auto s_eig = symmetric_eig(equilibrated);
  const Real s_max = s_eig.values.maxCoeff();
  if (!(s_max > 0.0)) throw SolverError("overlap matrix has no positive eigenvalue");

  std::vector<Eigen::Index> kept;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (s_eig.values(i) >= cutoff * s_max && s_eig.values(i) > 0.0) kept.push_back(i);
  }
  if (kept.empty()) throw SolverError("all overlap directions fall below the cutoff");

  w.transform.resize(n, static_cast<Eigen::Index>(kept.size()));
  Real s_min = s_max;
  for (std::size_t c = 0; c < kept.size(); ++c) {
    const Real s = s_eig.values(kept[c]);
    s_min = std::min(s_min, s);
    w.transform.col(static_cast<Eigen::Index>(c)) = s_eig.vectors.col(kept[c]) / std::sqrt(s);
  }
  w.s_condition = s_max / s_min;
  w.dropped = static_cast<std::size_t>(n) - kept.size();
  return w;
}

}  // namespace

void set_solution_checks(bool enabled) { g_checks.store(enabled); }
bool solution_checks_enabled() { return g_checks.load(); }

SymmetricEigen symmetric_eig(const Matrix& input) {
  require_symmetric(input, "symmetric_eig");
  const Eigen::Index n = input.rows();
  Matrix a = 0.5 * (input + input.transpose());
  Matrix v = Matrix::Identity(n, n);
  const Real norm = a.norm();

  // Rotations are skipped once |a_pq| <= eps sqrt(|a_pp a_qq|), which gives
  // small eigenvalues of a unit-diagonal positive matrix high relative
  // accuracy. A sweep without rotations also meets the Frobenius criterion,
  // since then off <= n eps max|a_ii|.
  const Real eps = std::numeric_limits<Real>::epsilon();
  const Real floor = eps * kNegligibleScale * norm;
  int sweep = 0;
  bool rotated = off_diagonal_norm(a) > 0.0;
  while (rotated) {
    if (sweep == kMaxSweeps) {
      std::ostringstream msg;
      msg << "Jacobi did not converge: n=" << n << " sweeps=" << sweep
          << " off-diagonal norm=" << static_cast<double>(off_diagonal_norm(a))
          << " matrix norm=" << static_cast<double>(norm);
      throw SolverError(msg.str());
    }
    ++sweep;
    rotated = false;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const Real apq = a(p, q);
        const Real abs_apq = std::abs(apq);
        if (abs_apq <= floor || abs_apq <= eps * std::sqrt(std::abs(a(p, p) * a(q, q)))) {
          continue;
        }
        rotated = true;
        const Real theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const Real t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::hypot(theta, 1.0));
        const Real c = 1.0 / std::sqrt(t * t + 1.0);
        const Real s = t * c;
        const Real tau = s / (1.0 + c);

        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = 0.0;
        // Only the upper triangle is updated here; it is mirrored at the end.
        auto rotate = [&](Real& g, Real& h) {
          const Real gv = g;
          const Real hv = h;
          g = gv - s * (hv + gv * tau);
          h = hv + s * (gv - hv * tau);
        };
        for (Eigen::Index k = 0; k < p; ++k) rotate(a(k, p), a(k, q));
        for (Eigen::Index k = p + 1; k < q; ++k) rotate(a(p, k), a(k, q));
        for (Eigen::Index k = q + 1; k < n; ++k) rotate(a(p, k), a(q, k));
        for (Eigen::Index k = 0; k < n; ++k) {
          const Real g = v(k, p);
          const Real h = v(k, q);
          v(k, p) = g - s * (h + g * tau);
          v(k, q) = h + s * (g - h * tau);
        }
      }
    }
  }
  a.triangularView<Eigen::StrictlyLower>() = a.transpose();
  if (off_diagonal_norm(a) >= kOffDiagonalTolerance * norm && norm > 0.0) {
    throw SolverError("Jacobi stopped above the off-diagonal tolerance");
  }

  const Vector diag = a.diagonal();
  const auto order = eigen_order(diag, v);
  SymmetricEigen out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    out.values(c) = diag(order[static_cast<std::size_t>(c)]);
    out.vectors.col(c) = v.col(order[static_cast<std::size_t>(c)]);
  }
  out.sweeps = sweep;
  return out;
}

EigenSolution solve_generalized(const MatrixPair& pair, Real cutoff) {
  if (!(cutoff > 0.0 && cutoff < 1.0)) throw std::invalid_argument("cutoff must lie in (0, 1)");
  require_symmetric(pair.overlap, "solve_generalized(S)");
  require_symmetric(pair.hamiltonian, "solve_generalized(H)");
  if (pair.hamiltonian.rows() != pair.overlap.rows()) {
    throw std::invalid_argument("solve_generalized: H and S dimensions differ");
  }

  const Whitening w = whiten(pair.overlap, cutoff);
  const Matrix h_eq = w.scale.asDiagonal() * pair.hamiltonian * w.scale.asDiagonal();
  const Matrix hx = h_eq * w.transform;
  const Eigen::Index m = w.transform.cols();
  Matrix whitened(m, m);
  for (Eigen::Index col = 0; col < m; ++col) {
    for (Eigen::Index row = 0; row <= col; ++row) {
      const Real value = w.transform.col(row).dot(hx.col(col));
      whitened(row, col) = value;
      whitened(col, row) = value;
    }
  }
  const auto w_eig = symmetric_eig(whitened);

  EigenSolution sol;
  sol.eigenvalues = w_eig.values;
  sol.coefficients = w.scale.asDiagonal() * (w.transform * w_eig.vectors);
  sol.s_condition = w.s_condition;
  sol.dropped = w.dropped;

  if (solution_checks_enabled()) {
    const auto diag = diagnose(pair, sol);
    if (diag.max_relative_residual > kResidualTolerance || diag.orthonormality_excess > 1.0) {
      std::ostringstream msg;
      msg << "solution check failed: residual=" << static_cast<double>(diag.max_relative_residual)
          << " orthonormality=" << static_cast<double>(diag.max_orthonormality_error)
          << " dropped=" << sol.dropped << " s_condition=" << static_cast<double>(sol.s_condition);
      throw SolverError(msg.str());
    }
  }
  return sol;
}

std::vector<Real> lowest_k(const MatrixPair& pair, std::size_t k, Real cutoff) {
  const auto sol = solve_generalized(pair, cutoff);
  if (k > static_cast<std::size_t>(sol.eigenvalues.size())) {
    throw std::out_of_range("lowest_k: requested more levels than the retained dimension");
  }
  return {sol.eigenvalues.data(), sol.eigenvalues.data() + k};
}

SolutionDiagnostics diagnose(const MatrixPair& pair, const EigenSolution& solution) {
  const Eigen::Index n = pair.overlap.rows();
  Vector scale(n);
  for (Eigen::Index i = 0; i < n; ++i) scale(i) = 1.0 / std::sqrt(pair.overlap(i, i));
  const Matrix s_eq = scale.asDiagonal() * pair.overlap * scale.asDiagonal();
  const Matrix h_eq = scale.asDiagonal() * pair.hamiltonian * scale.asDiagonal();
  const Matrix c_eq = scale.cwiseInverse().asDiagonal() * solution.coefficients;

  SolutionDiagnostics out;
  const Real h_norm = h_eq.norm();
  const Real s_norm = s_eq.norm();
  for (Eigen::Index k = 0; k < c_eq.cols(); ++k) {
    const Real e = solution.eigenvalues(k);
    const Vector residual = h_eq * c_eq.col(k) - e * (s_eq * c_eq.col(k));
    const Real bound = (h_norm + std::abs(e) * s_norm) * c_eq.col(k).norm();
    out.max_relative_residual = std::max(out.max_relative_residual, residual.norm() / bound);
  }
  const Matrix gram = c_eq.transpose() * s_eq * c_eq;
  const Real floor_scale = static_cast<Real>(n) * std::numeric_limits<Real>::epsilon() * s_norm;
  for (Eigen::Index l = 0; l < gram.cols(); ++l) {
    for (Eigen::Index k = 0; k < gram.rows(); ++k) {
      const Real err = std::abs(gram(k, l) - (k == l ? Real{1} : Real{0}));
      const Real allowed =
          kResidualTolerance + floor_scale * c_eq.col(k).norm() * c_eq.col(l).norm();
      out.max_orthonormality_error = std::max(out.max_orthonormality_error, err);
      out.orthonormality_excess = std::max(out.orthonormality_excess, err / allowed);
    }
  }
  return out;
}

}  // namespace starkdisk
