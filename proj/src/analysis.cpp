#include "starkdisk/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "starkdisk/assembly.hpp"
#include "starkdisk/eigensolver.hpp"
#include "starkdisk/errors.hpp"

namespace starkdisk {

namespace {

constexpr double kLambdaStep = 0.05;
constexpr std::size_t kLevelMargin = 4;
constexpr double kCollisionTolerance = 1e-6;
constexpr double kDegeneracyTolerance = 1e-8;
constexpr double kCrossingTolerance = 1e-10;
constexpr double kGoldenTolerance = 1e-7;

double collision_scale(double e) { return kCollisionTolerance * std::max(1.0, std::abs(e)); }

Vector unit_disk_shape(const Vector& coefficients, std::span<const BasisIndex> basis, double r0) {
  Vector shape(coefficients.size());
  for (Eigen::Index a = 0; a < coefficients.size(); ++a) {
    shape(a) = coefficients(a) * std::pow(static_cast<Real>(r0), basis[static_cast<std::size_t>(a)].i + 2);
  }
  return shape;
}

Matrix unit_overlap(Parity parity, int n_basis) {
  return assemble(BasisSpec{n_basis, parity, 1.0}, ModelParams{1.0, 0.0}).overlap;
}

std::vector<Parity> sectors_of(SectorChoice choice) {
  switch (choice) {
    case SectorChoice::Even:
      return {Parity::Even};
    case SectorChoice::Odd:
      return {Parity::Odd};
    case SectorChoice::Both:
      return {Parity::Even, Parity::Odd};
  }
  return {};
}

template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), std::max<std::size_t>(count, 1)));
  std::vector<std::exception_ptr> errors(count);
  auto run = [&](std::size_t index) {
    try {
      fn(index);
    } catch (...) {
      errors[index] = std::current_exception();
    }
  };
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) run(i);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < count; i += workers) run(i);
      });
    }
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::string point_name(SweepParameter parameter, double value) {
  std::ostringstream out;
  out << to_string(parameter) << "=" << value;
  return out.str();
}

[[noreturn]] void rethrow_at(SweepParameter parameter, double value) {
  try {
    throw;
  } catch (const SolverError& e) {
    throw SolverError("at " + point_name(parameter, value) + ": " + e.what());
  }
}

const Level* find_label(std::span<const Level> levels, const StateLabel& label) {
  for (const auto& level : levels) {
    if (level.label == label) return &level;
  }
  return nullptr;
}

std::vector<Level> truncated(std::vector<Level> levels, std::size_t count) {
  if (levels.size() > count) levels.resize(count);
  return levels;
}

ModelParams model_at(SweepParameter parameter, double value, const FixedParams& fixed) {
  ModelParams m{fixed.r0, fixed.lambda};
  if (parameter == SweepParameter::Lambda) m.lambda = value;
  if (parameter == SweepParameter::R0) m.r0 = value;
  return m;
}

bool zero_field_path(SweepParameter parameter, const FixedParams& fixed) {
  return parameter == SweepParameter::Beta ||
         (parameter == SweepParameter::R0 && fixed.lambda == 0.0);
}

// Energy of one (n, nu) block state of a sector at zero field.
double block_energy(double r0, Parity parity, int n_basis, const StateLabel& label) {
  if (label.nu < (parity == Parity::Even ? 0 : 1) || label.nu > n_basis) {
    throw std::invalid_argument("label nu outside the basis");
  }
  std::vector<BasisIndex> block;
  for (int i = label.nu; i <= n_basis; ++i) block.push_back({i, label.nu, parity});
  const auto sol = solve_generalized(assemble(std::span<const BasisIndex>(block), ModelParams{r0, 0.0}));
  if (label.n >= sol.eigenvalues.size()) throw std::invalid_argument("label n outside the basis");
  return static_cast<double>(sol.eigenvalues(label.n));
}

// Labeled levels of one sector along a grid (lambda path or r0 path at
// nonzero field). Element p holds `count` levels sorted by energy.
std::vector<std::vector<Level>> track_path(SweepParameter parameter, std::span<const double> grid,
                                           const FixedParams& fixed, Parity parity, int n_basis,
                                           std::size_t count, unsigned threads) {
  const std::size_t tracked = count + kLevelMargin;
  std::vector<std::vector<Level>> raw(grid.size());
  parallel_for(grid.size() > 0 ? grid.size() - 1 : 0, threads, [&](std::size_t k) {
    const std::size_t p = k + 1;
    const auto m = model_at(parameter, grid[p], fixed);
    try {
      raw[p] = truncated(solve_levels(m.r0, m.lambda, parity, n_basis), tracked);
    } catch (...) {
      rethrow_at(parameter, grid[p]);
    }
  });

  std::vector<std::vector<Level>> out(grid.size());
  if (grid.empty()) return out;
  const auto first = model_at(parameter, grid[0], fixed);
  try {
    out[0] = labeled_levels(first.r0, first.lambda, parity, n_basis, tracked);
  } catch (...) {
    rethrow_at(parameter, grid[0]);
  }
  for (std::size_t p = 1; p < grid.size(); ++p) {
    if (raw[p].size() < out[p - 1].size()) {
      throw SolverError("at " + point_name(parameter, grid[p]) + ": too few retained levels");
    }
    out[p] = continue_labels(out[p - 1], std::move(raw[p]), parity, n_basis);
  }
  return out;
}

std::vector<Curve> curves_from(const std::vector<std::vector<Level>>& path, std::size_t count,
                               SweepParameter parameter, std::span<const double> grid) {
  std::vector<Curve> curves;
  if (path.empty()) return curves;
  const std::size_t n = std::min(count, path[0].size());
  for (std::size_t c = 0; c < n; ++c) {
    Curve curve{path[0][c].label, {}};
    for (std::size_t p = 0; p < path.size(); ++p) {
      const Level* level = find_label(path[p], curve.label);
      if (level == nullptr) {
        throw SolverError("at " + point_name(parameter, grid[p]) + ": lost track of " +
                          to_string(curve.label));
      }
      curve.energies.push_back(level->energy);
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

std::vector<Curve> radial_sweep(const SweepRequest& req) {
  // Labels: the `levels` lowest (n, nu) at the first grid point.
  const int span = static_cast<int>(req.levels);
  std::vector<std::pair<double, StateLabel>> candidates;
  for (int nu = 0; nu < span; ++nu) {
    const auto sol = solve_generalized(
        assemble_radial(RadialBasisSpec{nu, req.basis.radial_size}, BetaParams{req.grid[0]}));
    for (int n = 0; n < span && n < sol.eigenvalues.size(); ++n) {
      candidates.push_back({static_cast<double>(sol.eigenvalues(n)), StateLabel{std::nullopt, n, nu}});
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  candidates.resize(std::min(candidates.size(), req.levels));

  std::vector<Curve> curves;
  for (const auto& c : candidates) curves.push_back({c.second, std::vector<double>(req.grid.size())});
  int max_nu = 0;
  for (const auto& c : curves) max_nu = std::max(max_nu, c.label.nu);

  parallel_for(req.grid.size(), resolve_threads(req.threads), [&](std::size_t p) {
    try {
      std::vector<Vector> spectra;
      for (int nu = 0; nu <= max_nu; ++nu) {
        spectra.push_back(solve_generalized(assemble_radial(RadialBasisSpec{nu, req.basis.radial_size},
                                                            BetaParams{req.grid[p]}))
                              .eigenvalues);
      }
      for (auto& curve : curves) {
        curve.energies[p] = static_cast<double>(
            spectra[static_cast<std::size_t>(curve.label.nu)](curve.label.n));
      }
    } catch (...) {
      rethrow_at(req.parameter, req.grid[p]);
    }
  });
  return curves;
}

std::vector<Curve> zero_field_sweep(const SweepRequest& req, Parity parity) {
  std::vector<std::vector<Level>> path(req.grid.size());
  parallel_for(req.grid.size(), resolve_threads(req.threads), [&](std::size_t p) {
    try {
      path[p] = zero_field_levels(req.grid[p], parity, req.basis.n_basis);
    } catch (...) {
      rethrow_at(req.parameter, req.grid[p]);
    }
  });
  return curves_from(path, req.levels, req.parameter, req.grid);
}

// Sign changes of E_a - E_b between points where the difference exceeds the
// degeneracy tolerance; identically degenerate pairs produce nothing.
void detect_crossings(const SweepResult& result, std::vector<LevelEvent>& events) {
  const auto& x = result.grid;
  for (std::size_t a = 0; a < result.curves.size(); ++a) {
    for (std::size_t b = a + 1; b < result.curves.size(); ++b) {
      const auto& ea = result.curves[a].energies;
      const auto& eb = result.curves[b].energies;
      std::optional<std::size_t> last;
      for (std::size_t p = 0; p < x.size(); ++p) {
        const double d = ea[p] - eb[p];
        if (std::abs(d) <= kDegeneracyTolerance * std::max(1.0, std::abs(ea[p]))) continue;
        if (last) {
          const double dl = ea[*last] - eb[*last];
          if ((dl > 0.0) != (d > 0.0)) {
            const double t = dl / (dl - d);
            events.push_back({EventKind::Crossing, x[*last] + t * (x[p] - x[*last]),
                              result.curves[a].label, result.curves[b].label, 0.0});
          }
        }
        last = p;
      }
    }
  }
}

// Golden-section minimum of f on [lo, hi].
template <class Fn>
std::pair<double, double> golden_minimum(double lo, double hi, Fn&& f) {
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - ratio * (hi - lo);
  double d = lo + ratio * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  while (hi - lo > kGoldenTolerance) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - ratio * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + ratio * (hi - lo);
      fd = f(d);
    }
  }
  return fc < fd ? std::pair{c, fc} : std::pair{d, fd};
}

// Gap between the levels at sorted positions lower < upper of one sector.
double sorted_gap(SweepParameter parameter, double value, const FixedParams& fixed, Parity parity,
                  int n_basis, std::size_t lower, std::size_t upper) {
  const auto m = model_at(parameter, value, fixed);
  const auto levels = solve_levels(m.r0, m.lambda, parity, n_basis);
  return levels.at(upper).energy - levels.at(lower).energy;
}

// A same-sector gap minimum counts as an avoided crossing when the gap
// reopens to at least 1.25 times its minimum on both sides within the sweep.
constexpr double kReopenFactor = 1.25;

void detect_avoided_crossings(const SweepRequest& req, SweepResult& result) {
  const auto& x = result.grid;
  if (x.size() < 3) return;
  const bool nonzero_field =
      (req.parameter == SweepParameter::R0 && req.fixed.lambda != 0.0) ||
      (req.parameter == SweepParameter::Lambda && (x.front() > 0.0 || x.back() < 0.0));
  if (!nonzero_field) return;

  for (const Parity parity : sectors_of(req.sector)) {
    std::vector<std::size_t> members;
    for (std::size_t c = 0; c < result.curves.size(); ++c) {
      if (result.curves[c].label.parity == parity) members.push_back(c);
    }
    // Curves of one sector never swap order at nonzero field, so neighbors
    // at the first point stay neighbors.
    std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
      return result.curves[a].energies[0] < result.curves[b].energies[0];
    });
    for (std::size_t m = 0; m + 1 < members.size(); ++m) {
      const auto& lower = result.curves[members[m]];
      const auto& upper = result.curves[members[m + 1]];
      std::vector<double> gap(x.size());
      for (std::size_t p = 0; p < x.size(); ++p) gap[p] = upper.energies[p] - lower.energies[p];
      for (std::size_t p = 1; p + 1 < x.size(); ++p) {
        if (!(gap[p] < gap[p - 1] && gap[p] <= gap[p + 1])) continue;
        const double left = *std::max_element(gap.begin(), gap.begin() + static_cast<std::ptrdiff_t>(p));
        const double right = *std::max_element(gap.begin() + static_cast<std::ptrdiff_t>(p), gap.end());
        if (std::min(left, right) < kReopenFactor * gap[p]) continue;

        LevelEvent event{EventKind::AvoidedCrossing, x[p], lower.label, upper.label, gap[p]};
        if (req.refine_events) {
          const auto [where, value] = golden_minimum(x[p - 1], x[p + 1], [&](double v) {
            return sorted_gap(req.parameter, v, req.fixed, parity, req.basis.n_basis, m, m + 1);
          });
          event.location = where;
          event.gap = value;
        }
        result.events.push_back(event);
      }
    }
  }
}

void validate_grid(std::span<const double> grid) {
  if (grid.empty()) throw std::invalid_argument("sweep grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("sweep grid must be strictly ascending");
  }
}

std::size_t tracked_count_for(const StateLabel& a, const StateLabel& b) {
  // Generous window: the labels sit near position n + nu in their sector.
  return static_cast<std::size_t>(std::max(a.n + a.nu, b.n + b.nu)) * 2 + 4;
}

std::vector<double> coarse_grid(double lo, double hi) {
  const auto intervals = static_cast<std::size_t>(std::max(20.0, std::ceil((hi - lo) / kLambdaStep)));
  std::vector<double> grid(intervals + 1);
  for (std::size_t i = 0; i <= intervals; ++i) {
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(intervals);
  }
  grid.back() = hi;
  return grid;
}

}  // namespace

std::string to_string(const StateLabel& label) {
  std::ostringstream out;
  if (label.parity) out << to_string(*label.parity);
  out << "(" << label.n << "," << label.nu << ")";
  return out.str();
}

std::string to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::Lambda:
      return "lambda";
    case SweepParameter::R0:
      return "r0";
    case SweepParameter::Beta:
      return "beta";
  }
  return "?";
}

unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  if (const char* env = std::getenv("STARKDISK_THREADS")) {
    const long value = std::strtol(env, nullptr, 10);
    if (value > 0) return static_cast<unsigned>(value);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<Level> solve_levels(double r0, double lambda, Parity parity, int n_basis) {
  const BasisSpec spec{n_basis, parity, r0};
  const auto pair = assemble(spec, ModelParams{r0, lambda});
  const auto sol = solve_generalized(pair);
  std::vector<Level> levels(static_cast<std::size_t>(sol.eigenvalues.size()));
  for (std::size_t k = 0; k < levels.size(); ++k) {
    const auto col = static_cast<Eigen::Index>(k);
    levels[k].label = StateLabel{parity, -1, -1};
    levels[k].energy = static_cast<double>(sol.eigenvalues(col));
    levels[k].shape = unit_disk_shape(sol.coefficients.col(col), pair.basis, r0);
  }
  return levels;
}

std::vector<Level> zero_field_levels(double r0, Parity parity, int n_basis) {
  const auto basis = enumerate(BasisSpec{n_basis, parity, r0});
  const auto full = static_cast<Eigen::Index>(basis.size());
  std::vector<Level> levels;
  std::size_t offset = 0;
  for (int j = parity == Parity::Even ? 0 : 1; j <= n_basis; ++j) {
    std::vector<BasisIndex> block;
    for (int i = j; i <= n_basis; ++i) block.push_back({i, j, parity});
    const auto sol = solve_generalized(assemble(std::span<const BasisIndex>(block), ModelParams{r0, 0.0}));
    const Matrix shapes = [&] {
      Matrix s(static_cast<Eigen::Index>(block.size()), sol.coefficients.cols());
      for (Eigen::Index c = 0; c < sol.coefficients.cols(); ++c) {
        s.col(c) = unit_disk_shape(sol.coefficients.col(c), block, r0);
      }
      return s;
    }();
    for (Eigen::Index n = 0; n < sol.eigenvalues.size(); ++n) {
      Level level;
      level.label = StateLabel{parity, static_cast<int>(n), j};
      level.energy = static_cast<double>(sol.eigenvalues(n));
      level.shape = Vector::Zero(full);
      level.shape.segment(static_cast<Eigen::Index>(offset), static_cast<Eigen::Index>(block.size())) =
          shapes.col(n);
      levels.push_back(std::move(level));
    }
    offset += block.size();
  }
  std::stable_sort(levels.begin(), levels.end(),
                   [](const Level& a, const Level& b) { return a.energy < b.energy; });
  return levels;
}

std::vector<Level> continue_labels(std::span<const Level> previous, std::vector<Level> next,
                                   Parity parity, int n_basis) {
  std::vector<Level> prev(previous.begin(), previous.end());
  std::stable_sort(prev.begin(), prev.end(),
                   [](const Level& a, const Level& b) { return a.energy < b.energy; });
  const std::size_t m = prev.size();
  if (next.size() < m) throw std::invalid_argument("continue_labels: fewer new levels than tracked");
  next.resize(m);

  // Energy order first.
  for (std::size_t k = 0; k < m; ++k) next[k].label = prev[k].label;

  // Collision runs: consecutive positions that are near-degenerate on
  // either side of the step.
  std::optional<Matrix> overlap;
  std::size_t first = 0;
  while (first < m) {
    std::size_t last = first;
    while (last + 1 < m &&
           (prev[last + 1].energy - prev[last].energy <= collision_scale(prev[last].energy) ||
            next[last + 1].energy - next[last].energy <= collision_scale(next[last].energy))) {
      ++last;
    }
    if (last > first) {
      if (!overlap) overlap = unit_overlap(parity, n_basis);
      const std::size_t size = last - first + 1;
      Matrix score(static_cast<Eigen::Index>(size), static_cast<Eigen::Index>(size));
      for (std::size_t p = 0; p < size; ++p) {
        for (std::size_t q = 0; q < size; ++q) {
          score(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) =
              std::abs(prev[first + p].shape.dot(*overlap * next[first + q].shape));
        }
      }
      std::vector<bool> used_prev(size, false), used_next(size, false);
      for (std::size_t round = 0; round < size; ++round) {
        Real best = -1;
        std::size_t bp = 0, bq = 0;
        for (std::size_t p = 0; p < size; ++p) {
          if (used_prev[p]) continue;
          for (std::size_t q = 0; q < size; ++q) {
            if (used_next[q]) continue;
            const Real s = score(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q));
            if (s > best) {
              best = s;
              bp = p;
              bq = q;
            }
          }
        }
        used_prev[bp] = used_next[bq] = true;
        next[first + bq].label = prev[first + bp].label;
      }
    }
    first = last + 1;
  }
  return next;
}

std::vector<Level> labeled_levels(double r0, double lambda, Parity parity, int n_basis,
                                  std::size_t count) {
  validate(ModelParams{r0, lambda});
  const std::size_t tracked = count + kLevelMargin;
  auto current = truncated(zero_field_levels(r0, parity, n_basis), tracked);
  if (current.size() < count) throw std::out_of_range("labeled_levels: basis too small for count");
  if (lambda != 0.0) {
    const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(lambda) / kLambdaStep)));
    for (int s = 1; s <= steps; ++s) {
      const double value = lambda * s / steps;
      auto next = solve_levels(r0, value, parity, n_basis);
      if (next.size() < current.size()) throw SolverError("labeled_levels: too few retained levels");
      current = continue_labels(current, std::move(next), parity, n_basis);
    }
  }
  current.resize(count);
  return current;
}

double radial_energy(int n, int nu, double beta, int radial_size) {
  const auto sol = solve_generalized(assemble_radial(RadialBasisSpec{nu, radial_size}, BetaParams{beta}));
  if (n < 0 || n >= sol.eigenvalues.size()) throw std::out_of_range("radial_energy: n outside basis");
  return static_cast<double>(sol.eigenvalues(n));
}

SweepResult sweep(const SweepRequest& req) {
  validate_grid(req.grid);
  if (req.levels < 1) throw std::invalid_argument("sweep needs at least one level");
  SweepResult result;
  result.parameter = req.parameter;
  result.grid = req.grid;

  if (req.parameter == SweepParameter::Beta) {
    result.curves = radial_sweep(req);
  } else {
    for (const Parity parity : sectors_of(req.sector)) {
      std::vector<Curve> curves;
      if (zero_field_path(req.parameter, req.fixed)) {
        curves = zero_field_sweep(req, parity);
      } else {
        const auto path = track_path(req.parameter, req.grid, req.fixed, parity, req.basis.n_basis,
                                     req.levels, resolve_threads(req.threads));
        curves = curves_from(path, req.levels, req.parameter, req.grid);
      }
      for (auto& c : curves) result.curves.push_back(std::move(c));
    }
  }

  detect_crossings(result, result.events);
  detect_avoided_crossings(req, result);
  return result;
}

double check_lambda_parity(double r0, double lambda, Parity parity, int n_basis, std::size_t k) {
  const BasisSpec spec{n_basis, parity, r0};
  const auto plus = lowest_k(assemble(spec, ModelParams{r0, lambda}), k);
  const auto minus = lowest_k(assemble(spec, ModelParams{r0, -lambda}), k);
  double worst = 0.0;
  for (std::size_t i = 0; i < k; ++i) worst = std::max(worst, static_cast<double>(std::abs(plus[i] - minus[i])));
  return worst;
}

std::vector<DegeneracyGroup> detect_degeneracy(std::span<const double> energies, double rel_tol) {
  std::vector<DegeneracyGroup> groups;
  std::size_t first = 0;
  while (first < energies.size()) {
    std::size_t last = first;
    double sum = energies[first];
    while (last + 1 < energies.size() &&
           std::abs(energies[last + 1] - energies[last]) <=
               rel_tol * std::max(1.0, std::abs(energies[last]))) {
      ++last;
      sum += energies[last];
    }
    groups.push_back({last - first + 1, sum / static_cast<double>(last - first + 1)});
    first = last + 1;
  }
  return groups;
}

CrossingResult find_crossing(const StateLabel& a, const StateLabel& b, SweepParameter parameter,
                             double lo, double hi, const FixedParams& fixed,
                             const BasisSettings& basis) {
  if (a == b) throw std::invalid_argument("find_crossing: identical labels");
  if (!(hi > lo)) throw std::invalid_argument("find_crossing: empty bracket");
  const bool zero_field = zero_field_path(parameter, fixed);
  const bool split_parity = a.parity && b.parity && *a.parity != *b.parity;
  if (!split_parity && !(zero_field && a.nu != b.nu)) {
    throw std::invalid_argument(
        "find_crossing: labels must differ in parity, or in nu on a zero-field path");
  }
  if (!zero_field && (!a.parity || !b.parity)) {
    throw std::invalid_argument("find_crossing: labels need a parity at nonzero field");
  }

  auto no_sign_change = [&] {
    std::ostringstream msg;
    msg << "find_crossing: " << to_string(a) << " - " << to_string(b) << " keeps its sign on ["
        << lo << ", " << hi << "]";
    return BracketError(msg.str());
  };

  if (zero_field) {
    auto energy = [&](const StateLabel& label, double value) {
      if (parameter == SweepParameter::Beta) {
        return radial_energy(label.n, label.nu, value, basis.radial_size);
      }
      return block_energy(value, label.parity.value_or(Parity::Even), basis.n_basis, label);
    };
    auto diff = [&](double v) { return energy(a, v) - energy(b, v); };
    double flo = diff(lo);
    const double fhi = diff(hi);
    if ((flo > 0.0) == (fhi > 0.0) && flo != 0.0 && fhi != 0.0) throw no_sign_change();
    double left = lo, right = hi;
    while (right - left > kCrossingTolerance) {
      const double mid = 0.5 * (left + right);
      const double fm = diff(mid);
      if (fm == 0.0) {
        left = right = mid;
        break;
      }
      if ((fm > 0.0) == (flo > 0.0)) {
        left = mid;
        flo = fm;
      } else {
        right = mid;
      }
    }
    const double where = 0.5 * (left + right);
    return {where, energy(a, where), energy(b, where)};
  }

  // Nonzero field: labels are carried along a coarse path, then bisection
  // continues from the labeled state at the lower end of the bracket.
  const std::size_t count = tracked_count_for(a, b);
  const auto grid = coarse_grid(lo, hi);
  const auto path_a = track_path(parameter, grid, fixed, *a.parity, basis.n_basis, count, 1);
  const auto path_b = track_path(parameter, grid, fixed, *b.parity, basis.n_basis, count, 1);
  auto energy_in = [](const std::vector<Level>& levels, const StateLabel& label) {
    const Level* level = find_label(levels, label);
    if (level == nullptr) throw std::invalid_argument("find_crossing: label not among tracked levels");
    return level->energy;
  };
  std::optional<std::size_t> cell;
  for (std::size_t p = 0; p + 1 < grid.size() && !cell; ++p) {
    const double d0 = energy_in(path_a[p], a) - energy_in(path_b[p], b);
    const double d1 = energy_in(path_a[p + 1], a) - energy_in(path_b[p + 1], b);
    if (d0 == 0.0 || (d0 > 0.0) != (d1 > 0.0)) cell = p;
  }
  if (!cell) throw no_sign_change();

  std::vector<Level> state_a = path_a[*cell];
  std::vector<Level> state_b = path_b[*cell];
  double left = grid[*cell];
  double right = grid[*cell + 1];
  const double sign_left = energy_in(state_a, a) - energy_in(state_b, b);
  double ea = energy_in(state_a, a), eb = energy_in(state_b, b);
  while (right - left > kCrossingTolerance) {
    const double mid = 0.5 * (left + right);
    const auto m = model_at(parameter, mid, fixed);
    auto next_a = continue_labels(state_a, solve_levels(m.r0, m.lambda, *a.parity, basis.n_basis),
                                  *a.parity, basis.n_basis);
    auto next_b = continue_labels(state_b, solve_levels(m.r0, m.lambda, *b.parity, basis.n_basis),
                                  *b.parity, basis.n_basis);
    ea = energy_in(next_a, a);
    eb = energy_in(next_b, b);
    const double d = ea - eb;
    if (d != 0.0 && (d > 0.0) == (sign_left > 0.0)) {
      left = mid;
      state_a = std::move(next_a);
      state_b = std::move(next_b);
    } else {
      right = mid;
    }
  }
  return {0.5 * (left + right), ea, eb};
}

std::optional<AvoidedCrossing> find_avoided_crossing(const StateLabel& a, const StateLabel& b,
                                                     SweepParameter parameter, double lo,
                                                     double hi, const FixedParams& fixed,
                                                     const BasisSettings& basis) {
  if (a == b) throw std::invalid_argument("find_avoided_crossing: identical labels");
  if (!a.parity || !b.parity || *a.parity != *b.parity) {
    throw std::invalid_argument("find_avoided_crossing: labels must share a parity sector");
  }
  if (parameter == SweepParameter::Beta) {
    throw std::invalid_argument("find_avoided_crossing: zero-field radial levels may cross exactly");
  }
  if (parameter == SweepParameter::R0 && fixed.lambda == 0.0) {
    throw std::invalid_argument("find_avoided_crossing: requires a nonzero field");
  }
  if (parameter == SweepParameter::Lambda && lo <= 0.0 && hi >= 0.0) {
    throw std::invalid_argument("find_avoided_crossing: lambda interval contains zero field");
  }
  if (!(hi > lo)) throw std::invalid_argument("find_avoided_crossing: empty interval");

  const Parity parity = *a.parity;
  const auto grid = coarse_grid(lo, hi);
  const auto path = track_path(parameter, grid, fixed, parity, basis.n_basis, tracked_count_for(a, b), 1);
  std::vector<double> gap(grid.size());
  std::vector<std::pair<std::size_t, std::size_t>> position(grid.size());
  for (std::size_t p = 0; p < grid.size(); ++p) {
    std::size_t ia = path[p].size(), ib = path[p].size();
    for (std::size_t k = 0; k < path[p].size(); ++k) {
      if (path[p][k].label == a) ia = k;
      if (path[p][k].label == b) ib = k;
    }
    if (ia == path[p].size() || ib == path[p].size()) {
      throw std::invalid_argument("find_avoided_crossing: label not among tracked levels");
    }
    gap[p] = std::abs(path[p][ib].energy - path[p][ia].energy);
    position[p] = {std::min(ia, ib), std::max(ia, ib)};
  }
  const auto best = static_cast<std::size_t>(std::min_element(gap.begin(), gap.end()) - gap.begin());
  if (best == 0 || best + 1 == grid.size()) return std::nullopt;

  const auto [lower, upper] = position[best];
  const auto [where, value] = golden_minimum(grid[best - 1], grid[best + 1], [&](double v) {
    return sorted_gap(parameter, v, fixed, parity, basis.n_basis, lower, upper);
  });
  return AvoidedCrossing{where, value};
}

std::vector<double> stark_splitting(double r0, std::span<const double> lambdas,
                                    const BasisSettings& basis) {
  if (std::find(lambdas.begin(), lambdas.end(), 0.0) == lambdas.end()) {
    throw std::invalid_argument("stark_splitting: the lambda grid must contain zero");
  }
  std::vector<double> grid(lambdas.begin(), lambdas.end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  SweepRequest req;
  req.parameter = SweepParameter::Lambda;
  req.grid = grid;
  req.fixed.r0 = r0;
  req.sector = SectorChoice::Both;
  req.basis = basis;
  req.levels = 4;
  req.refine_events = false;
  const auto result = sweep(req);

  const Curve* even = nullptr;
  const Curve* odd = nullptr;
  for (const auto& c : result.curves) {
    if (c.label == StateLabel{Parity::Even, 0, 1}) even = &c;
    if (c.label == StateLabel{Parity::Odd, 0, 1}) odd = &c;
  }
  if (even == nullptr || odd == nullptr) throw SolverError("stark_splitting: (0,1) pair not tracked");

  std::vector<double> out;
  for (const double l : lambdas) {
    const auto p = static_cast<std::size_t>(std::lower_bound(grid.begin(), grid.end(), l) - grid.begin());
    out.push_back(odd->energies[p] - even->energies[p]);
  }
  return out;
}

}  // namespace starkdisk
