#pragma once

// Geometric multigrid for the periodic MAC Stokes system: standard coarsening,
// rediscretized coarse operators, 6-point velocity / 4-point pressure
// restriction with prolongation 4 R^T, and a dense deflated direct solve on
// the coarsest (or, for two-grid, the first coarse) level.

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "macmg/grid.hpp"
#include "macmg/relaxation.hpp"

namespace macmg {

enum class CycleKind { TwoGrid, V, W };

std::string_view tag(CycleKind kind);
std::optional<CycleKind> parse_cycle_kind(std::string_view tag);

/// Which fine-grid neighbours enter the 6-point velocity restriction.
/// Standard: for u, the two fine u-values straddling the coarse point on the
/// same vertical line (weight 1/4) and the four on the lines x +- h (1/8);
/// v is the transpose. AxisSwapped applies v's offsets to u and vice versa. It
/// is still a weighted average with an exact adjoint, but it mislocates the
/// coarse velocities; kept to show that adjointness alone does not pin R.
enum class TransferConvention { Standard, AxisSwapped };

struct CycleSpec {
  int nu1 = 1;
  int nu2 = 0;
  CycleKind kind = CycleKind::TwoGrid;
  int coarsest_n = 4;
  RelaxScheme scheme = RelaxScheme::QDR;
  RelaxParams params = preset(RelaxScheme::QDR);
  SweepOptions sweep;
  TransferConvention transfer = TransferConvention::Standard;

  int nu() const { return nu1 + nu2; }
  /// Recursive coarse-grid calls per level (1 for V, 2 for W).
  int gamma() const { return kind == CycleKind::W ? 2 : 1; }

  /// nu1 = ceil(nu/2), nu2 = floor(nu/2).
  static CycleSpec split(int nu, CycleKind kind, RelaxScheme scheme, const RelaxParams& params);
};

void validate(const CycleSpec& spec);

/// Grids from the finest down to `coarsest_n`, halving n at each level.
class Hierarchy {
 public:
  Hierarchy(const GridSpec& finest, int coarsest_n);

  const std::vector<GridSpec>& levels() const { return levels_; }
  const GridSpec& level(std::size_t l) const { return levels_.at(l); }
  std::size_t depth() const { return levels_.size(); }

 private:
  std::vector<GridSpec> levels_;
};

/// Full-weighting style restriction to the next coarser grid.
StaggeredField restrict_field(const StaggeredField& fine,
                              TransferConvention convention = TransferConvention::Standard);
/// 4 R^T, applied as a scatter with the transposed weights.
StaggeredField prolong_field(const StaggeredField& coarse,
                             TransferConvention convention = TransferConvention::Standard);

class InconsistentSystemError : public std::runtime_error {
 public:
  InconsistentSystemError(double inconsistency, double rhs_norm);
  double inconsistency() const { return inconsistency_; }

 private:
  double inconsistency_;
};

/// Dense LU of L_h bordered by the three constant null vectors,
///   [ L  N ] [x]   [b]
///   [ N' 0 ] [l] = [0],
/// which returns the zero-mean solution of L x = b - N l where N l is the
/// component of b outside range(L). L is assembled column by column from
/// apply_stokes, so the solve uses exactly the rediscretized operator.
class DirectSolver {
 public:
  /// Throws std::invalid_argument if grid.n() > kMaxDirectN.
  explicit DirectSolver(const GridSpec& grid);

  struct Info {
    /// Norm of the part of b removed because it lies outside range(L).
    double inconsistency = 0.0;
  };

  /// Throws InconsistentSystemError if the removed part exceeds
  /// `consistency_tol` times the same measure taken on abs(b).
  StaggeredField solve(const StaggeredField& b, Info* info = nullptr,
                       double consistency_tol = 1e-10) const;

  const GridSpec& grid() const { return grid_; }

  /// Process-wide cache of factorizations keyed by n. Factorizations are
  /// immutable once built and safe to share between threads.
  static std::shared_ptr<const DirectSolver> shared(const GridSpec& grid);

 private:
  GridSpec grid_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

/// Largest grid the dense direct solver accepts (3 n^2 + 3 unknowns).
inline constexpr int kMaxDirectN = 32;

/// Direct solve on the 4x4 coarsest grid; throws std::invalid_argument otherwise.
StaggeredField coarsest_solve(const GridSpec& grid, const StaggeredField& b);

class MultigridSolver {
 public:
  MultigridSolver(const CycleSpec& spec, const GridSpec& finest);

  /// One cycle on the finest level.
  StaggeredField cycle(const StaggeredField& b, const StaggeredField& x) const;
  /// One cycle on hierarchy level `level` (0 = finest).
  StaggeredField cycle(std::size_t level, const StaggeredField& b, const StaggeredField& x) const;

  const CycleSpec& spec() const { return spec_; }
  const Hierarchy& hierarchy() const { return hierarchy_; }

 private:
  StaggeredField coarse_correction(std::size_t level, const StaggeredField& rc) const;

  CycleSpec spec_;
  Hierarchy hierarchy_;
  std::shared_ptr<const DirectSolver> direct_;
};

struct MeasureOptions {
  int k_max = 100;
  std::uint64_t seed = 1;
  /// Rescale the iterate to unit defect after every cycle. With b = 0 the
  /// cycle is linear, so this leaves the defect ratios unchanged while keeping
  /// all k_max cycles above roundoff.
  bool renormalize = true;
  /// Without renormalization, stop at the first k with ||d_k|| / ||d_0|| below this.
  double stagnation = 1e-12;
  /// Relative defect growth that counts as divergence.
  double divergence_factor = 1e3;
};

struct RhoMeasurement {
  double rho = 0.0;
  int k_eff = 0;
  double initial_defect = 0.0;
  /// ||d_k|| / ||d_{k-1}|| for every cycle.
  std::vector<double> contraction;
};

class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateMeasurementError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Uniform [-0.5, 0.5] entries from a seeded mt19937_64, mean-projected.
StaggeredField random_field(const GridSpec& grid, std::uint64_t seed);

/// rho_m = (||d_k|| / ||d_0||)^(1/k) for the homogeneous problem b = 0 with a
/// random initial guess.
RhoMeasurement measure_rho(const CycleSpec& spec, const GridSpec& grid,
                           const MeasureOptions& options = {});
RhoMeasurement measure_rho_from(const CycleSpec& spec, const GridSpec& grid,
                                const StaggeredField& x0, const MeasureOptions& options = {});

}  // namespace macmg
