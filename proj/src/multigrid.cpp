#include "macmg/multigrid.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <random>
#include <sstream>

#include "macmg/operators.hpp"

namespace macmg {

std::string_view tag(CycleKind kind) {
  switch (kind) {
    case CycleKind::TwoGrid: return "two-grid";
    case CycleKind::V: return "V";
    case CycleKind::W: return "W";
  }
  throw std::logic_error("unknown CycleKind");
}

std::optional<CycleKind> parse_cycle_kind(std::string_view name) {
  if (name == "two-grid" || name == "twogrid" || name == "two") return CycleKind::TwoGrid;
  if (name == "V" || name == "v") return CycleKind::V;
  if (name == "W" || name == "w") return CycleKind::W;
  return std::nullopt;
}

CycleSpec CycleSpec::split(int nu, CycleKind kind, RelaxScheme scheme, const RelaxParams& params) {
  CycleSpec s;
  s.nu1 = (nu + 1) / 2;
  s.nu2 = nu / 2;
  s.kind = kind;
  s.scheme = scheme;
  s.params = params;
  return s;
}

void validate(const CycleSpec& spec) {
  if (spec.nu1 < 0 || spec.nu2 < 0 || spec.nu() < 1) {
    throw std::invalid_argument("CycleSpec: need nu1, nu2 >= 0 and nu1 + nu2 >= 1");
  }
  if (spec.coarsest_n < 4 || !is_power_of_two(spec.coarsest_n)) {
    throw std::invalid_argument("CycleSpec: coarsest_n must be a power of two >= 4");
  }
  validate(spec.params);
}

Hierarchy::Hierarchy(const GridSpec& finest, int coarsest_n) {
  if (coarsest_n > finest.n()) {
    throw std::invalid_argument("Hierarchy: coarsest grid is finer than the finest grid");
  }
  levels_.push_back(finest);
  while (levels_.back().n() > coarsest_n) levels_.push_back(levels_.back().coarser());
}

namespace {

struct Tap {
  int di;
  int dj;
  double w;
};

// Offsets relative to fine index (2I, 2J) for the coarse point (I, J).
constexpr Tap kUTaps[] = {{0, 0, 0.25},   {0, 1, 0.25},  {-1, 0, 0.125},
                          {-1, 1, 0.125}, {1, 0, 0.125}, {1, 1, 0.125}};
constexpr Tap kVTaps[] = {{0, 0, 0.25},   {1, 0, 0.25},  {0, -1, 0.125},
                          {1, -1, 0.125}, {0, 1, 0.125}, {1, 1, 0.125}};
constexpr Tap kPTaps[] = {{0, 0, 0.25}, {1, 0, 0.25}, {0, 1, 0.25}, {1, 1, 0.25}};

template <std::size_t N>
Array2D restrict_component(const Array2D& fine, const Tap (&taps)[N]) {
  const int nc = fine.n() / 2;
  Array2D coarse(nc);
  for (int J = 0; J < nc; ++J) {
    for (int I = 0; I < nc; ++I) {
      double s = 0.0;
      for (const Tap& t : taps) s += t.w * fine.at_wrapped(2 * I + t.di, 2 * J + t.dj);
      coarse(I, J) = s;
    }
  }
  return coarse;
}

template <std::size_t N>
Array2D prolong_component(const Array2D& coarse, const Tap (&taps)[N]) {
  const int nc = coarse.n();
  Array2D fine(2 * nc);
  for (int J = 0; J < nc; ++J) {
    for (int I = 0; I < nc; ++I) {
      const double c = 4.0 * coarse(I, J);
      for (const Tap& t : taps) {
        fine(fine.wrap(2 * I + t.di), fine.wrap(2 * J + t.dj)) += t.w * c;
      }
    }
  }
  return fine;
}

}  // namespace

StaggeredField restrict_field(const StaggeredField& fine, TransferConvention convention) {
  if (fine.n() < 8 || !is_power_of_two(fine.n())) {
    throw std::invalid_argument("restrict_field: fine grid must be at least 8x8");
  }
  const bool swapped = convention == TransferConvention::AxisSwapped;
  StaggeredField c;
  c.u = swapped ? restrict_component(fine.u, kVTaps) : restrict_component(fine.u, kUTaps);
  c.v = swapped ? restrict_component(fine.v, kUTaps) : restrict_component(fine.v, kVTaps);
  c.p = restrict_component(fine.p, kPTaps);
  return c;
}

StaggeredField prolong_field(const StaggeredField& coarse, TransferConvention convention) {
  const bool swapped = convention == TransferConvention::AxisSwapped;
  StaggeredField f;
  f.u = swapped ? prolong_component(coarse.u, kVTaps) : prolong_component(coarse.u, kUTaps);
  f.v = swapped ? prolong_component(coarse.v, kUTaps) : prolong_component(coarse.v, kVTaps);
  f.p = prolong_component(coarse.p, kPTaps);
  return f;
}

InconsistentSystemError::InconsistentSystemError(double inconsistency, double rhs_norm)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << "direct solve: right-hand side has a component of norm " << inconsistency
           << " outside the range of L_h (||b|| = " << rhs_norm << ")";
        return os.str();
      }()),
      inconsistency_(inconsistency) {}

namespace {

Eigen::VectorXd flatten(const StaggeredField& x) {
  const std::size_t m = x.p.size();
  Eigen::VectorXd out(3 * m);
  for (std::size_t k = 0; k < m; ++k) {
    out(k) = x.u.values()[k];
    out(m + k) = x.v.values()[k];
    out(2 * m + k) = x.p.values()[k];
  }
  return out;
}

StaggeredField unflatten(const GridSpec& grid, const Eigen::Ref<const Eigen::VectorXd>& v) {
  StaggeredField x(grid);
  const std::size_t m = grid.size();
  for (std::size_t k = 0; k < m; ++k) {
    x.u.values()[k] = v(k);
    x.v.values()[k] = v(m + k);
    x.p.values()[k] = v(2 * m + k);
  }
  return x;
}

}  // namespace

DirectSolver::DirectSolver(const GridSpec& grid) : grid_(grid) {
  if (grid.n() > kMaxDirectN) {
    throw std::invalid_argument("DirectSolver: n = " + std::to_string(grid.n()) +
                                " exceeds the dense limit " + std::to_string(kMaxDirectN));
  }
  const Eigen::Index m = static_cast<Eigen::Index>(grid.size());
  const Eigen::Index dim = 3 * m;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim + 3, dim + 3);
  Eigen::VectorXd unit = Eigen::VectorXd::Zero(dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    unit(c) = 1.0;
    a.col(c).head(dim) = flatten(apply_stokes(grid, unflatten(grid, unit)));
    unit(c) = 0.0;
  }
  for (Eigen::Index blk = 0; blk < 3; ++blk) {
    a.block(blk * m, dim + blk, m, 1).setOnes();
    a.block(dim + blk, blk * m, 1, m).setOnes();
  }
  lu_.compute(a);
}

StaggeredField DirectSolver::solve(const StaggeredField& b, Info* info,
                                   double consistency_tol) const {
  require_on_grid(b, grid_, "DirectSolver::solve");
  const Eigen::Index dim = 3 * static_cast<Eigen::Index>(grid_.size());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim + 3);
  rhs.head(dim) = flatten(b);
  const Eigen::VectorXd sol = lu_.solve(rhs);
  // The part of b outside range(L) is its per-component mean times ones;
  // compare it with the same quantity built from |b| so that roundoff in
  // an otherwise consistent b does not trip the check.
  double off = 0.0;
  double scale = 0.0;
  for (const Array2D* c : {&b.u, &b.v, &b.p}) {
    double s = 0.0;
    double a = 0.0;
    for (double e : c->values()) {
      s += e;
      a += std::abs(e);
    }
    off += s * s;
    scale += a * a;
  }
  const double inconsistency = std::sqrt(off) / grid_.n();
  if (info) info->inconsistency = inconsistency;
  if (inconsistency > consistency_tol * std::sqrt(scale) / grid_.n()) {
    throw InconsistentSystemError(inconsistency, rhs.norm());
  }
  StaggeredField x = unflatten(grid_, sol.head(dim));
  x.subtract_means();
  return x;
}

std::shared_ptr<const DirectSolver> DirectSolver::shared(const GridSpec& grid) {
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const DirectSolver>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[grid.n()];
  if (!slot) slot = std::make_shared<const DirectSolver>(grid);
  return slot;
}

StaggeredField coarsest_solve(const GridSpec& grid, const StaggeredField& b) {
  if (grid.n() != 4) throw std::invalid_argument("coarsest_solve: expects the 4x4 grid");
  return DirectSolver::shared(grid)->solve(b);
}

MultigridSolver::MultigridSolver(const CycleSpec& spec, const GridSpec& finest)
    : spec_(spec), hierarchy_(finest, spec.coarsest_n) {
  validate(spec_);
  if (hierarchy_.depth() < 2) {
    throw std::invalid_argument("MultigridSolver: the finest grid must be coarser-able");
  }
  const GridSpec& direct_grid = spec_.kind == CycleKind::TwoGrid
                                    ? hierarchy_.level(1)
                                    : hierarchy_.levels().back();
  direct_ = DirectSolver::shared(direct_grid);
}

StaggeredField MultigridSolver::cycle(const StaggeredField& b, const StaggeredField& x) const {
  return cycle(0, b, x);
}

StaggeredField MultigridSolver::coarse_correction(std::size_t level,
                                                  const StaggeredField& rc) const {
  const std::size_t coarse = level + 1;
  const bool direct = spec_.kind == CycleKind::TwoGrid || coarse + 1 == hierarchy_.depth();
  if (direct) return direct_->solve(rc);
  StaggeredField ec(hierarchy_.level(coarse));
  for (int g = 0; g < spec_.gamma(); ++g) ec = cycle(coarse, rc, ec);
  return ec;
}

StaggeredField MultigridSolver::cycle(std::size_t level, const StaggeredField& b,
                                      const StaggeredField& x0) const {
  const GridSpec& grid = hierarchy_.level(level);
  require_on_grid(x0, grid, "MultigridSolver::cycle");
  StaggeredField x = x0;
  for (int s = 0; s < spec_.nu1; ++s) x = sweep(grid, spec_.scheme, spec_.params, b, x, spec_.sweep);
  // In exact arithmetic the residual is mean-free; drop the roundoff-level
  // mean left by cancellation in b - L x before the coarse solve.
  StaggeredField rc = restrict_field(residual(grid, b, x), spec_.transfer);
  rc.subtract_means();
  x += prolong_field(coarse_correction(level, rc), spec_.transfer);
  if (spec_.sweep.project_mean) x.subtract_means();
  for (int s = 0; s < spec_.nu2; ++s) x = sweep(grid, spec_.scheme, spec_.params, b, x, spec_.sweep);
  return x;
}

StaggeredField random_field(const GridSpec& grid, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-0.5, 0.5);
  StaggeredField x(grid);
  for (Array2D* c : {&x.u, &x.v, &x.p}) {
    for (double& e : c->values()) e = dist(rng);
  }
  x.subtract_means();
  return x;
}

RhoMeasurement measure_rho(const CycleSpec& spec, const GridSpec& grid,
                           const MeasureOptions& options) {
  return measure_rho_from(spec, grid, random_field(grid, options.seed), options);
}

RhoMeasurement measure_rho_from(const CycleSpec& spec, const GridSpec& grid,
                                const StaggeredField& x0, const MeasureOptions& options) {
  if (options.k_max < 1) throw std::invalid_argument("measure_rho: k_max must be >= 1");
  const MultigridSolver solver(spec, grid);
  const StaggeredField b(grid);
  StaggeredField x = x0;

  RhoMeasurement out;
  out.initial_defect = norm2(residual(grid, b, x));
  if (!(out.initial_defect > 0.0)) {
    throw DegenerateMeasurementError(
        "measure_rho: initial defect is zero; the initial guess already solves the problem");
  }

  // log(||d_k|| / ||d_0||), accumulated cycle by cycle.
  double log_ratio = 0.0;
  double previous = out.initial_defect;
  for (int k = 1; k <= options.k_max; ++k) {
    x = solver.cycle(b, x);
    const double dk = norm2(residual(grid, b, x));
    const double step = dk / previous;
    out.contraction.push_back(step);
    log_ratio += std::log(step);
    out.k_eff = k;
    if (!std::isfinite(log_ratio) && dk != 0.0) {
      throw DivergenceError("measure_rho: non-finite defect");
    }
    if (log_ratio > std::log(options.divergence_factor)) {
      std::ostringstream os;
      os << "measure_rho: defect grew by more than " << options.divergence_factor << " ("
         << tag(spec.scheme) << ", " << tag(spec.kind) << ", n = " << grid.n()
         << ", nu = " << spec.nu() << ", omega = " << spec.params.omega
         << ", alpha = " << spec.params.alpha << ", sigma = " << spec.params.sigma
         << ", omega_j = " << spec.params.omega_j << ")";
      throw DivergenceError(os.str());
    }
    if (dk == 0.0) break;
    if (options.renormalize) {
      x *= 1.0 / dk;
      previous = 1.0;
    } else {
      previous = dk;
      if (std::exp(log_ratio) < options.stagnation) break;
    }
  }
  out.rho = std::exp(log_ratio / out.k_eff);
  return out;
}

}  // namespace macmg
