#pragma once

// Local Fourier analysis of the MAC Stokes operator and its block smoothers.
//
// A grid function sampled as exp(i theta . x / h) at each unknown's physical
// location is an eigenfunction of every periodic stencil operator; the 3x3
// matrix acting on the (u, v, p) amplitudes is the operator's symbol.

#include <array>
#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "macmg/relaxation.hpp"

namespace macmg::lfa {

using cplx = std::complex<double>;
using Mat3 = Eigen::Matrix3cd;
using Vec3 = Eigen::Vector3cd;

inline constexpr double kPi = 3.14159265358979323846;

struct Frequency {
  double theta1 = 0.0;
  double theta2 = 0.0;

  /// theta in [-pi/2, pi/2)^2.
  bool is_low() const;
  /// theta in [-pi/2, 3pi/2)^2 minus the low box.
  bool is_high() const;
};

/// m(theta) = sin^2(theta1/2) + sin^2(theta2/2), so that -Lap_h has symbol 4m/h^2.
double m(const Frequency& t);
/// m_s(theta) = 9 / ((2 + cos theta1)(2 + cos theta2)); Q has symbol h^2 / m_s.
double m_s(const Frequency& t);
/// m_r = 4 m / m_s, the symbol of Q (-Lap_h).
double m_r(const Frequency& t);

struct FreqSymbol {
  Mat3 entries = Mat3::Zero();
  double m = 0.0;
  double m_s = 0.0;
  double m_r = 0.0;
};

/// Symbol of an h^2-weighted 9-point stencil.
double stencil_symbol(const Stencil9& s, const Frequency& t, double h);

/// Symbol of L_h.
FreqSymbol stokes_symbol(const Frequency& t, double h);

/// Symbol of the block preconditioner W (r -> delta) of one sweep, built from
/// the same stage sequence as `macmg::correction`.
Mat3 correction_symbol(RelaxScheme scheme, const RelaxParams& params, const Frequency& t,
                       double h);

/// Error propagation symbol I - omega W L of one sweep. Throws
/// std::domain_error at the zero frequency, where W is singular.
FreqSymbol relaxation_symbol(RelaxScheme scheme, const RelaxParams& params, const Frequency& t,
                             double h = 1.0);

/// Eigenvalues of a 3x3 complex matrix from its characteristic cubic.
///
/// The matrix is shifted by its mean eigenvalue and normalized before the
/// cubic is solved. Roots closer than 1e-4 are grouped; a simple root gets one
/// guarded Newton step on p, a pair is refined as the simple root of p', and a
/// triple is the root of p''. This stays accurate for defective matrices.
/// Output is sorted by (real, imag).
std::array<cplx, 3> eig3(const Mat3& a);

double spectral_radius(const Mat3& a);

/// Node lattice theta_k = -pi/2 + 2 pi k / resolution, k = 0..resolution-1, in
/// each direction, restricted to T^high. For resolution divisible by 4 the
/// lattice contains the T^high boundary theta_i = pi/2 and theta_i = pi.
std::vector<Frequency> high_frequency_lattice(int resolution);

struct SmoothingResult {
  double mu = 0.0;
  Frequency argmax;
};

/// max over the T^high lattice of the spectral radius of the sweep's symbol.
/// Throws std::invalid_argument if resolution < 16.
SmoothingResult smoothing_factor(RelaxScheme scheme, const RelaxParams& params, int resolution);

/// Closed-form quantities of the mass-based sigma-Uzawa smoothing analysis at
/// one value of m_r.
struct UzawaDiagnostics {
  double m2 = 0.0;           ///< 4 alpha sigma / (1 + sigma)^2
  double lambda_star = 0.0;  ///< m_r / alpha
  std::array<cplx, 2> d_roots{};
  double discriminant = 0.0;
  bool complex_branch = false;  ///< m_r < m2
  double upsilon_sq = 0.0;      ///< 1 + (omega/alpha)(omega sigma - sigma - 1) m_r
  double upsilon = 0.0;         ///< sqrt(max(0, upsilon_sq))
  std::optional<double> chi_plus;   ///< real branch only
  std::optional<double> chi_minus;  ///< real branch only
  std::optional<double> mu_r;       ///< defined when m2 <= 16/9
  std::optional<double> mu_c;       ///< defined when m2 >= 8/9
  double x = 0.0;  ///< (1 + sigma) omega / alpha
  double y = 0.0;  ///< omega^2 sigma / alpha
};

/// Throws std::invalid_argument for invalid params or m_r outside [8/9, 16/9].
UzawaDiagnostics uzawa_branches(const RelaxParams& params, double m_r);

/// Inclusive range lo, lo + step, ..., hi. A range with lo == hi is a single
/// fixed value.
struct ParamRange {
  double lo = 1.0;
  double hi = 1.0;
  double step = 1.0;

  static ParamRange fixed(double v) { return {v, v, 1.0}; }
  std::vector<double> values() const;
};

struct SearchSpec {
  ParamRange omega = ParamRange::fixed(1.0);
  ParamRange alpha = ParamRange::fixed(1.0);
  ParamRange sigma = ParamRange::fixed(1.0);
  ParamRange omega_j = ParamRange::fixed(1.0);
  /// theta lattice used during the search.
  int resolution = 16;
  /// Number of times the box is shrunk to +-1 step around the incumbent and
  /// re-searched with a 5x finer step.
  int refinements = 1;
  /// Lattice used to re-evaluate the final incumbent.
  int report_resolution = 64;
};

struct SearchResult {
  RelaxParams params;
  double mu = 0.0;
  long evaluations = 0;
};

/// Default search box for each scheme; contains the known optimum.
SearchSpec default_search(RelaxScheme scheme);

/// Exhaustive grid search of the smoothing factor over the box. Axes a scheme
/// does not use are pinned to 1. Throws std::domain_error for an empty box.
SearchResult optimize_params(RelaxScheme scheme, const SearchSpec& spec);

/// Optimal smoothing factor for each scheme under the mass/Jacobi approximations.
double analytic_optimum(RelaxScheme scheme);

}  // namespace macmg::lfa
