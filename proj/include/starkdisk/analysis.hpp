#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "starkdisk/basis.hpp"
#include "starkdisk/real.hpp"

namespace starkdisk {

/// Zero-field quantum numbers carried along a parameter path. Radial-problem
/// states (no field, separable) have no parity.
struct StateLabel {
  std::optional<Parity> parity;
  int n = 0;
  int nu = 0;

  friend bool operator==(const StateLabel&, const StateLabel&) = default;
};

/// "even(0,1)", "odd(1,2)" or "(0,2)" for radial states.
std::string to_string(const StateLabel& label);

enum class SweepParameter { Lambda, R0, Beta };
enum class SectorChoice { Even, Odd, Both };

std::string to_string(SweepParameter p);

/// Values of the parameters that are not swept.
struct FixedParams {
  double r0 = 0.75;
  double lambda = 0.0;
  double beta = 0.75;
};

struct BasisSettings {
  int n_basis = 12;      // N of the two-dimensional basis
  int radial_size = 20;  // functions per nu block of the radial basis
};

/// One labeled level at one parameter point. `shape` holds the coefficients
/// rescaled to the unit disk (c_a r0^(i_a + 2)), so shapes taken at different
/// r0 can be compared through the unit-disk overlap matrix.
struct Level {
  StateLabel label;
  double energy = 0.0;
  Vector shape;
};

/// Ascending levels of one sector, unlabeled.
std::vector<Level> solve_levels(double r0, double lambda, Parity parity, int n_basis);

/// All levels of one sector at zero field, solved block by block in the
/// angular harmonic so each carries its exact (n, nu) label. Sorted by energy.
std::vector<Level> zero_field_levels(double r0, Parity parity, int n_basis);

/// Carries labels from `previous` onto the unlabeled ascending `next`.
/// Levels are paired in energy order; runs of levels closer than the
/// collision tolerance at either point are paired by maximal shape overlap.
std::vector<Level> continue_labels(std::span<const Level> previous, std::vector<Level> next,
                                   Parity parity, int n_basis);

/// The lowest `count` levels of one sector at (r0, lambda), labeled by
/// continuation from zero field in steps of at most 0.05 in lambda.
std::vector<Level> labeled_levels(double r0, double lambda, Parity parity, int n_basis,
                                  std::size_t count);

/// Energy of (n, nu) for -1/2 lap - beta/r on the unit disk.
double radial_energy(int n, int nu, double beta, int radial_size);

enum class EventKind { Crossing, AvoidedCrossing };

struct LevelEvent {
  EventKind kind = EventKind::Crossing;
  double location = 0.0;
  StateLabel a;
  StateLabel b;
  double gap = 0.0;  // zero for crossings
};

struct Curve {
  StateLabel label;
  std::vector<double> energies;  // one per grid point
};

struct SweepResult {
  SweepParameter parameter = SweepParameter::Lambda;
  std::vector<double> grid;
  std::vector<Curve> curves;
  std::vector<LevelEvent> events;
};

struct SweepRequest {
  SweepParameter parameter = SweepParameter::Lambda;
  std::vector<double> grid;  // ascending
  FixedParams fixed;
  SectorChoice sector = SectorChoice::Both;
  BasisSettings basis;
  std::size_t levels = 6;  // per sector (radial: in total)
  unsigned threads = 0;    // 0: STARKDISK_THREADS or hardware concurrency
  bool refine_events = true;
};

/// Solves every grid point (in parallel), then links the levels into
/// labeled curves and detects crossings and avoided crossings.
///
/// Labels come from zero field: the radial problem and zero-field r0 sweeps
/// are labeled exactly per angular block; otherwise the first grid point is
/// reached by continuation in lambda and each later point by
/// continue_labels. Throws SolverError naming the failing grid point.
SweepResult sweep(const SweepRequest& request);

/// Number of workers for sweeps when the caller asks for `requested`
/// (0 = STARKDISK_THREADS, else hardware concurrency).
unsigned resolve_threads(unsigned requested);

/// max_k |E_k(lambda) - E_k(-lambda)| over the k lowest levels of a sector.
double check_lambda_parity(double r0, double lambda, Parity parity, int n_basis, std::size_t k);

struct DegeneracyGroup {
  std::size_t multiplicity = 0;
  double energy = 0.0;  // mean of the group
};

/// Groups consecutive energies with |dE| <= rel_tol max(1, |E|).
std::vector<DegeneracyGroup> detect_degeneracy(std::span<const double> energies,
                                               double rel_tol = 1e-8);

struct CrossingResult {
  double location = 0.0;
  double energy_a = 0.0;
  double energy_b = 0.0;
};

/// Bisection (to 1e-10 in the parameter) on E_a - E_b.
///
/// The labels must differ in parity, or, on zero-field paths (beta, or r0 at
/// lambda = 0), in nu. Throws std::invalid_argument otherwise and
/// BracketError when E_a - E_b keeps its sign over the bracket.
CrossingResult find_crossing(const StateLabel& a, const StateLabel& b, SweepParameter parameter,
                             double lo, double hi, const FixedParams& fixed,
                             const BasisSettings& basis = {});

struct AvoidedCrossing {
  double location = 0.0;
  double gap = 0.0;
};

/// Golden-section minimization of |E_b - E_a| for two labels of one parity
/// sector at nonzero field. Returns nullopt when the gap is smallest at an
/// end of the interval (no interior event). Throws std::invalid_argument for
/// cross-sector labels, the radial path, zero field, or a lambda interval
/// containing zero.
std::optional<AvoidedCrossing> find_avoided_crossing(const StateLabel& a, const StateLabel& b,
                                                     SweepParameter parameter, double lo,
                                                     double hi, const FixedParams& fixed,
                                                     const BasisSettings& basis = {});

/// E_odd(0,1) - E_even(0,1) at each lambda for fixed r0. The grid must
/// contain zero.
std::vector<double> stark_splitting(double r0, std::span<const double> lambdas,
                                    const BasisSettings& basis = {});

}  // namespace starkdisk
