#pragma once

// Block relaxation sweeps for the periodic MAC Stokes system.
//
// Every sweep has the form x <- x + omega * W(b - L x), where W applies one
// of the block preconditioners below with C^{-1} replaced either by the
// bilinear mass stencil Q (mass-based schemes) or by (h^2/4) I (diagonal
// Jacobi baselines).

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "macmg/grid.hpp"
#include "macmg/operators.hpp"

namespace macmg {

enum class RelaxScheme {
  QDR,                    ///< mass-based distributive relaxation
  QBSRExact,              ///< mass-based Braess-Sarazin, exact Schur solve
  QIBSR,                  ///< mass-based Braess-Sarazin, one weighted-Jacobi Schur step
  QSigmaUzawa,            ///< mass-based sigma-Uzawa
  DWJBaseline,            ///< distributive weighted Jacobi, C = diag(A)
  DiagIBSRBaseline,       ///< inexact Braess-Sarazin, C = diag(A)
  DiagSigmaUzawaBaseline  ///< sigma-Uzawa, C = diag(A)
};

enum class SchemeFamily { Distributive, BraessSarazinExact, BraessSarazinInexact, Uzawa };

inline constexpr RelaxScheme kAllSchemes[] = {
    RelaxScheme::QDR,         RelaxScheme::QBSRExact,        RelaxScheme::QIBSR,
    RelaxScheme::QSigmaUzawa, RelaxScheme::DWJBaseline,      RelaxScheme::DiagIBSRBaseline,
    RelaxScheme::DiagSigmaUzawaBaseline};

SchemeFamily family(RelaxScheme scheme);
bool is_baseline(RelaxScheme scheme);
bool uses_sigma(RelaxScheme scheme);
bool uses_omega_j(RelaxScheme scheme);

/// Short tag used on the command line and in CSV output ("qdr", "diag-uzawa", ...).
std::string_view tag(RelaxScheme scheme);
std::optional<RelaxScheme> parse_scheme(std::string_view tag);

/// Approximation of C^{-1} on each velocity component.
Stencil9 velocity_inverse(RelaxScheme scheme);
/// Approximation of E^{-1} at cell centers (distributive schemes).
Stencil9 pressure_inverse(RelaxScheme scheme);

/// Diagonal of B K B^T for the 9-point velocity stencil K. It does not depend
/// on h: 4/3 for the mass stencil, 1 for the Jacobi baseline.
double schur_jacobi_diagonal(const Stencil9& velocity_inverse);

/// omega: outer damping. alpha: scaling of C (alpha_D, alpha_B or alpha_U).
/// sigma: Uzawa Schur scaling, D = sigma^{-1} I. omega_j: weight of the single
/// Jacobi step on the Schur system (inexact Braess-Sarazin only).
/// Parameters a scheme does not use are ignored but must still be positive.
struct RelaxParams {
  double omega = 1.0;
  double alpha = 1.0;
  double sigma = 1.0;
  double omega_j = 1.0;

  friend bool operator==(const RelaxParams&, const RelaxParams&) = default;
};

/// Throws std::invalid_argument unless every parameter is finite and > 0.
void validate(const RelaxParams& params);

/// Default parameters. For the mass-based schemes these are the values with
/// optimal smoothing; the baselines use points on their optimal sets.
RelaxParams preset(RelaxScheme scheme);

/// The alternative Uzawa assignment (omega = 4/3, alpha = 1, sigma = 1/2) that
/// appears in the caption of the Uzawa convergence table. It does not satisfy
/// the optimality relations; kept for comparison runs.
RelaxParams uzawa_caption_preset();

/// Optimal sigma-Uzawa family parametrized by omega:
/// alpha = 8 omega^2 / (3 (3 omega - 1)), sigma = 1 / (3 omega - 1).
RelaxParams quzawa_optimal_params(double omega);

struct SchurSolveControl {
  double relative_tolerance = 1e-12;
  /// Iteration cap is `max_iterations_per_unknown * n^2`.
  int max_iterations_per_unknown = 10;
};

struct SweepOptions {
  /// Remove the constant mode from u, v and p after the update. Constants are
  /// invisible to L_h on a periodic grid and would otherwise drift.
  bool project_mean = true;
  SchurSolveControl schur;
};

struct SchurSolveStats {
  int iterations = 0;
  double relative_residual = 0.0;
};

class SchurSolveError : public std::runtime_error {
 public:
  SchurSolveError(int iterations, double achieved);
  int iterations() const { return iterations_; }
  double achieved_residual() const { return achieved_; }

 private:
  int iterations_;
  double achieved_;
};

/// Solves (B K B^T) q = rhs on mean-free pressures by conjugate gradients.
/// rhs is projected onto mean-free functions before the solve and the result
/// is returned with zero mean.
Array2D solve_schur(const GridSpec& grid, const Stencil9& velocity_inverse, const Array2D& rhs,
                    const SchurSolveControl& control, SchurSolveStats* stats = nullptr);

/// delta = W r for the scheme's block preconditioner (without omega).
StaggeredField correction(const GridSpec& grid, RelaxScheme scheme, const RelaxParams& params,
                          const StaggeredField& r, const SweepOptions& options = {});

/// One sweep: returns x + omega * W (b - L x).
StaggeredField sweep(const GridSpec& grid, RelaxScheme scheme, const RelaxParams& params,
                     const StaggeredField& b, const StaggeredField& x,
                     const SweepOptions& options = {});

StaggeredField sweep_qdr(const GridSpec& grid, const RelaxParams& params, const StaggeredField& b,
                         const StaggeredField& x, const SweepOptions& options = {});
StaggeredField sweep_qbsr_exact(const GridSpec& grid, const RelaxParams& params,
                                const StaggeredField& b, const StaggeredField& x,
                                const SweepOptions& options = {});
StaggeredField sweep_qibsr(const GridSpec& grid, const RelaxParams& params,
                           const StaggeredField& b, const StaggeredField& x,
                           const SweepOptions& options = {});
StaggeredField sweep_quzawa(const GridSpec& grid, const RelaxParams& params,
                            const StaggeredField& b, const StaggeredField& x,
                            const SweepOptions& options = {});
/// Baseline sweeps; throws std::invalid_argument for a mass-based tag.
StaggeredField sweep_baseline(const GridSpec& grid, RelaxScheme scheme, const RelaxParams& params,
                              const StaggeredField& b, const StaggeredField& x,
                              const SweepOptions& options = {});

}  // namespace macmg
