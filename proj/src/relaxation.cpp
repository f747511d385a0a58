#include "macmg/relaxation.hpp"

#include <cmath>
#include <sstream>

namespace macmg {

SchemeFamily family(RelaxScheme scheme) {
  switch (scheme) {
    case RelaxScheme::QDR:
    case RelaxScheme::DWJBaseline:
      return SchemeFamily::Distributive;
    case RelaxScheme::QBSRExact:
      return SchemeFamily::BraessSarazinExact;
    case RelaxScheme::QIBSR:
    case RelaxScheme::DiagIBSRBaseline:
      return SchemeFamily::BraessSarazinInexact;
    case RelaxScheme::QSigmaUzawa:
    case RelaxScheme::DiagSigmaUzawaBaseline:
      return SchemeFamily::Uzawa;
  }
  throw std::logic_error("unknown RelaxScheme");
}

bool is_baseline(RelaxScheme scheme) {
  return scheme == RelaxScheme::DWJBaseline || scheme == RelaxScheme::DiagIBSRBaseline ||
         scheme == RelaxScheme::DiagSigmaUzawaBaseline;
}

bool uses_sigma(RelaxScheme scheme) { return family(scheme) == SchemeFamily::Uzawa; }

bool uses_omega_j(RelaxScheme scheme) {
  return family(scheme) == SchemeFamily::BraessSarazinInexact;
}

std::string_view tag(RelaxScheme scheme) {
  switch (scheme) {
    case RelaxScheme::QDR: return "qdr";
    case RelaxScheme::QBSRExact: return "qbsr";
    case RelaxScheme::QIBSR: return "qibsr";
    case RelaxScheme::QSigmaUzawa: return "quzawa";
    case RelaxScheme::DWJBaseline: return "dwj";
    case RelaxScheme::DiagIBSRBaseline: return "diag-ibsr";
    case RelaxScheme::DiagSigmaUzawaBaseline: return "diag-uzawa";
  }
  throw std::logic_error("unknown RelaxScheme");
}

std::optional<RelaxScheme> parse_scheme(std::string_view name) {
  for (RelaxScheme s : kAllSchemes) {
    if (tag(s) == name) return s;
  }
  return std::nullopt;
}

Stencil9 velocity_inverse(RelaxScheme scheme) {
  return is_baseline(scheme) ? Stencil9::jacobi() : Stencil9::mass();
}

Stencil9 pressure_inverse(RelaxScheme scheme) { return velocity_inverse(scheme); }

double schur_jacobi_diagonal(const Stencil9& k) {
  // B^T of a cell impulse is (1/h)(e_i - e_{i+1}) on u and the same on v; each
  // contributes (2 center - 2 edge) after the h^2 scaling cancels.
  return 4.0 * (k.center - k.edge);
}

void validate(const RelaxParams& p) {
  auto check = [](double value, const char* name) {
    if (!std::isfinite(value) || value <= 0.0) {
      std::ostringstream os;
      os << "RelaxParams: " << name << " must be positive, got " << value;
      throw std::invalid_argument(os.str());
    }
  };
  check(p.omega, "omega");
  check(p.alpha, "alpha");
  check(p.sigma, "sigma");
  check(p.omega_j, "omega_j");
}

RelaxParams preset(RelaxScheme scheme) {
  switch (scheme) {
    case RelaxScheme::QDR: return {.omega = 0.75, .alpha = 1.0};
    case RelaxScheme::QBSRExact: return {.omega = 0.75, .alpha = 1.0};
    case RelaxScheme::QIBSR: return {.omega = 0.75 * 1.4, .alpha = 1.4, .omega_j = 1.0};
    case RelaxScheme::QSigmaUzawa: return {.omega = 1.0, .alpha = 4.0 / 3.0, .sigma = 0.5};
    case RelaxScheme::DWJBaseline: return {.omega = 0.8, .alpha = 1.0};
    case RelaxScheme::DiagIBSRBaseline: return {.omega = 1.0, .alpha = 1.25, .omega_j = 0.8};
    case RelaxScheme::DiagSigmaUzawaBaseline: return {.omega = 0.6, .alpha = 0.9, .sigma = 0.5};
  }
  throw std::logic_error("unknown RelaxScheme");
}

RelaxParams uzawa_caption_preset() { return {.omega = 4.0 / 3.0, .alpha = 1.0, .sigma = 0.5}; }

RelaxParams quzawa_optimal_params(double omega) {
  if (!(omega > 1.0 / 3.0)) {
    throw std::invalid_argument("quzawa_optimal_params: omega must exceed 1/3");
  }
  const double d = 3.0 * omega - 1.0;
  return {.omega = omega, .alpha = 8.0 * omega * omega / (3.0 * d), .sigma = 1.0 / d};
}

SchurSolveError::SchurSolveError(int iterations, double achieved)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << "Schur solve did not converge in " << iterations
           << " iterations (relative residual " << achieved << ")";
        return os.str();
      }()),
      iterations_(iterations),
      achieved_(achieved) {}

namespace {

Array2D apply_schur(const GridSpec& grid, const Stencil9& k, const Array2D& q) {
  const Array2D gu = apply_stencil9(grid, k, apply_gradient_x(grid, q));
  const Array2D gv = apply_stencil9(grid, k, apply_gradient_y(grid, q));
  return apply_b(grid, gu, gv);
}

}  // namespace

Array2D solve_schur(const GridSpec& grid, const Stencil9& k, const Array2D& rhs_in,
                    const SchurSolveControl& control, SchurSolveStats* stats) {
  require_on_grid(rhs_in, grid, "solve_schur");
  Array2D rhs = rhs_in;
  rhs.subtract_mean();
  Array2D q(grid.n());
  const double rhs_norm = std::sqrt(dot(rhs, rhs));
  if (rhs_norm == 0.0) {
    if (stats) *stats = {0, 0.0};
    return q;
  }
  const int cap = control.max_iterations_per_unknown * static_cast<int>(grid.size());
  Array2D r = rhs;
  Array2D d = r;
  double rr = dot(r, r);
  int it = 0;
  double rel = 1.0;
  while (it < cap) {
    Array2D sd = apply_schur(grid, k, d);
    const double step = rr / dot(d, sd);
    q.axpy(step, d);
    r.axpy(-step, sd);
    r.subtract_mean();
    const double rr_new = dot(r, r);
    ++it;
    rel = std::sqrt(rr_new) / rhs_norm;
    if (rel <= control.relative_tolerance) break;
    d *= rr_new / rr;
    d += r;
    rr = rr_new;
  }
  if (rel > control.relative_tolerance) throw SchurSolveError(it, rel);
  q.subtract_mean();
  if (stats) *stats = {it, rel};
  return q;
}

namespace {

StaggeredField distributive_correction(const GridSpec& grid, RelaxScheme scheme,
                                       const RelaxParams& prm, const StaggeredField& r) {
  const Stencil9 cinv = velocity_inverse(scheme);
  const Stencil9 einv = pressure_inverse(scheme);
  const double inv_alpha = 1.0 / prm.alpha;
  // Relax the transformed system K = L P, then map back with P.
  Array2D du_hat = apply_stencil9(grid, cinv, r.u);
  du_hat *= inv_alpha;
  Array2D dv_hat = apply_stencil9(grid, cinv, r.v);
  dv_hat *= inv_alpha;
  Array2D dp_hat = apply_stencil9(grid, einv, r.p - apply_b(grid, du_hat, dv_hat));
  dp_hat *= inv_alpha;

  StaggeredField d;
  d.u = du_hat + apply_gradient_x(grid, dp_hat);
  d.v = dv_hat + apply_gradient_y(grid, dp_hat);
  d.p = apply_pressure_laplacian(grid, dp_hat);
  d.p *= -1.0;
  return d;
}

StaggeredField braess_sarazin_correction(const GridSpec& grid, RelaxScheme scheme,
                                         const RelaxParams& prm, const StaggeredField& r,
                                         const SweepOptions& options) {
  const Stencil9 cinv = velocity_inverse(scheme);
  // Schur stage: (B C^{-1} B^T) dp = B C^{-1} r_U - alpha r_p.
  Array2D rhs = apply_b(grid, apply_stencil9(grid, cinv, r.u), apply_stencil9(grid, cinv, r.v));
  rhs.axpy(-prm.alpha, r.p);

  StaggeredField d;
  if (family(scheme) == SchemeFamily::BraessSarazinExact) {
    d.p = solve_schur(grid, cinv, rhs, options.schur);
  } else {
    d.p = (prm.omega_j / schur_jacobi_diagonal(cinv)) * rhs;
  }
  // Velocity stage: dU = (1/alpha) C^{-1} (r_U - B^T dp).
  d.u = apply_stencil9(grid, cinv, r.u - apply_gradient_x(grid, d.p));
  d.u *= 1.0 / prm.alpha;
  d.v = apply_stencil9(grid, cinv, r.v - apply_gradient_y(grid, d.p));
  d.v *= 1.0 / prm.alpha;
  return d;
}

StaggeredField uzawa_correction(const GridSpec& grid, RelaxScheme scheme, const RelaxParams& prm,
                                const StaggeredField& r) {
  const Stencil9 cinv = velocity_inverse(scheme);
  StaggeredField d;
  d.u = apply_stencil9(grid, cinv, r.u);
  d.u *= 1.0 / prm.alpha;
  d.v = apply_stencil9(grid, cinv, r.v);
  d.v *= 1.0 / prm.alpha;
  d.p = apply_b(grid, d.u, d.v) - r.p;
  d.p *= prm.sigma;
  return d;
}

}  // namespace

StaggeredField correction(const GridSpec& grid, RelaxScheme scheme, const RelaxParams& params,
                          const StaggeredField& r, const SweepOptions& options) {
  validate(params);
  require_on_grid(r, grid, "correction");
  switch (family(scheme)) {
    case SchemeFamily::Distributive:
      return distributive_correction(grid, scheme, params, r);
    case SchemeFamily::BraessSarazinExact:
    case SchemeFamily::BraessSarazinInexact:
      return braess_sarazin_correction(grid, scheme, params, r, options);
    case SchemeFamily::Uzawa:
      return uzawa_correction(grid, scheme, params, r);
  }
  throw std::logic_error("unknown SchemeFamily");
}

StaggeredField sweep(const GridSpec& grid, RelaxScheme scheme, const RelaxParams& params,
                     const StaggeredField& b, const StaggeredField& x,
                     const SweepOptions& options) {
  require_on_grid(x, grid, "sweep");
  const StaggeredField r = residual(grid, b, x);
  StaggeredField next = x;
  next.axpy(params.omega, correction(grid, scheme, params, r, options));
  if (options.project_mean) next.subtract_means();
  return next;
}

StaggeredField sweep_qdr(const GridSpec& grid, const RelaxParams& params, const StaggeredField& b,
                         const StaggeredField& x, const SweepOptions& options) {
  return sweep(grid, RelaxScheme::QDR, params, b, x, options);
}

StaggeredField sweep_qbsr_exact(const GridSpec& grid, const RelaxParams& params,
                                const StaggeredField& b, const StaggeredField& x,
                                const SweepOptions& options) {
  return sweep(grid, RelaxScheme::QBSRExact, params, b, x, options);
}

StaggeredField sweep_qibsr(const GridSpec& grid, const RelaxParams& params,
                           const StaggeredField& b, const StaggeredField& x,
                           const SweepOptions& options) {
  return sweep(grid, RelaxScheme::QIBSR, params, b, x, options);
}

StaggeredField sweep_quzawa(const GridSpec& grid, const RelaxParams& params,
                            const StaggeredField& b, const StaggeredField& x,
                            const SweepOptions& options) {
  return sweep(grid, RelaxScheme::QSigmaUzawa, params, b, x, options);
}

StaggeredField sweep_baseline(const GridSpec& grid, RelaxScheme scheme, const RelaxParams& params,
                              const StaggeredField& b, const StaggeredField& x,
                              const SweepOptions& options) {
  if (!is_baseline(scheme)) {
    throw std::invalid_argument("sweep_baseline: '" + std::string(tag(scheme)) +
                                "' is not a baseline scheme");
  }
  return sweep(grid, scheme, params, b, x, options);
}

}  // namespace macmg
