#include "macmg/lfa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/LU>

namespace macmg::lfa {

bool Frequency::is_low() const {
  return theta1 >= -kPi / 2 && theta1 < kPi / 2 && theta2 >= -kPi / 2 && theta2 < kPi / 2;
}

bool Frequency::is_high() const {
  const bool in_box = theta1 >= -kPi / 2 && theta1 < 3 * kPi / 2 && theta2 >= -kPi / 2 &&
                      theta2 < 3 * kPi / 2;
  return in_box && !is_low();
}

double m(const Frequency& t) {
  const double s1 = std::sin(t.theta1 / 2);
  const double s2 = std::sin(t.theta2 / 2);
  return s1 * s1 + s2 * s2;
}

double m_s(const Frequency& t) {
  return 9.0 / ((2.0 + std::cos(t.theta1)) * (2.0 + std::cos(t.theta2)));
}

double m_r(const Frequency& t) { return 4.0 * m(t) / m_s(t); }

double stencil_symbol(const Stencil9& s, const Frequency& t, double h) {
  const double c1 = std::cos(t.theta1);
  const double c2 = std::cos(t.theta2);
  return h * h * (s.center + 2.0 * s.edge * (c1 + c2) + 4.0 * s.corner * c1 * c2);
}

namespace {

struct Parts {
  cplx g1;   // symbol of (d/dx)_{h/2}; B^T = (g1, g2), B = (-g1, -g2)
  cplx g2;
  double a;  // symbol of -Lap_h
};

Parts parts(const Frequency& t, double h) {
  const cplx i(0.0, 1.0);
  return {i * (2.0 * std::sin(t.theta1 / 2) / h), i * (2.0 * std::sin(t.theta2 / 2) / h),
          4.0 * m(t) / (h * h)};
}

Vec3 apply_correction(RelaxScheme scheme, const RelaxParams& prm, const Frequency& t, double h,
                      const Vec3& r) {
  const Parts s = parts(t, h);
  const double k = stencil_symbol(velocity_inverse(scheme), t, h);
  const auto b_of = [&](cplx u, cplx v) { return -s.g1 * u - s.g2 * v; };
  Vec3 d;
  switch (family(scheme)) {
    case SchemeFamily::Distributive: {
      const double kp = stencil_symbol(pressure_inverse(scheme), t, h);
      const cplx du = k / prm.alpha * r(0);
      const cplx dv = k / prm.alpha * r(1);
      const cplx dp_hat = kp / prm.alpha * (r(2) - b_of(du, dv));
      d << du + s.g1 * dp_hat, dv + s.g2 * dp_hat, -s.a * dp_hat;
      break;
    }
    case SchemeFamily::BraessSarazinExact:
    case SchemeFamily::BraessSarazinInexact: {
      const cplx rhs = b_of(k * r(0), k * r(1)) - prm.alpha * r(2);
      cplx dp;
      if (family(scheme) == SchemeFamily::BraessSarazinExact) {
        dp = rhs / (k * s.a);  // B K B^T = K (-g1^2 - g2^2) = K a
      } else {
        dp = prm.omega_j / schur_jacobi_diagonal(velocity_inverse(scheme)) * rhs;
      }
      d << k / prm.alpha * (r(0) - s.g1 * dp), k / prm.alpha * (r(1) - s.g2 * dp), dp;
      break;
    }
    case SchemeFamily::Uzawa: {
      const cplx du = k / prm.alpha * r(0);
      const cplx dv = k / prm.alpha * r(1);
      d << du, dv, prm.sigma * (b_of(du, dv) - r(2));
      break;
    }
  }
  return d;
}

bool near_zero_frequency(const Frequency& t) {
  const auto wrap = [](double a) { return std::remainder(a, 2 * kPi); };
  return std::hypot(wrap(t.theta1), wrap(t.theta2)) < 1e-8;
}

}  // namespace

FreqSymbol stokes_symbol(const Frequency& t, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("stokes_symbol: h must be positive");
  const Parts s = parts(t, h);
  FreqSymbol out;
  out.entries << s.a, 0.0, s.g1,  //
      0.0, s.a, s.g2,             //
      -s.g1, -s.g2, 0.0;
  out.m = m(t);
  out.m_s = m_s(t);
  out.m_r = 4.0 * out.m / out.m_s;
  return out;
}

Mat3 correction_symbol(RelaxScheme scheme, const RelaxParams& params, const Frequency& t,
                       double h) {
  validate(params);
  Mat3 w;
  for (int c = 0; c < 3; ++c) w.col(c) = apply_correction(scheme, params, t, h, Vec3::Unit(c));
  return w;
}

FreqSymbol relaxation_symbol(RelaxScheme scheme, const RelaxParams& params, const Frequency& t,
                             double h) {
  if (near_zero_frequency(t)) {
    throw std::domain_error("relaxation_symbol: the zero frequency has a singular symbol");
  }
  FreqSymbol l = stokes_symbol(t, h);
  const Mat3 w = correction_symbol(scheme, params, t, h);
  l.entries = Mat3::Identity() - params.omega * (w * l.entries);
  return l;
}

std::array<cplx, 3> eig3(const Mat3& a) {
  const cplx shift = a.trace() / 3.0;
  Mat3 b = a - shift * Mat3::Identity();
  const double scale = b.norm();
  std::array<cplx, 3> lam{shift, shift, shift};
  if (!(scale > 0.0) || !std::isfinite(scale)) return lam;
  b /= scale;

  // lambda^3 + c2 lambda^2 + c1 lambda + c0 for the normalized matrix.
  const cplx c2 = -b.trace();
  const cplx c1 = b(0, 0) * b(1, 1) - b(0, 1) * b(1, 0) + b(0, 0) * b(2, 2) - b(0, 2) * b(2, 0) +
                  b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1);
  const cplx c0 = -b.determinant();

  // Depressed cubic t^3 + p t + q with lambda = t - c2/3 (Cardano).
  const cplx p = c1 - c2 * c2 / 3.0;
  const cplx q = 2.0 * c2 * c2 * c2 / 27.0 - c2 * c1 / 3.0 + c0;
  const cplx root_disc = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
  cplx w = -q / 2.0 + root_disc;
  const cplx w_alt = -q / 2.0 - root_disc;
  if (std::abs(w_alt) > std::abs(w)) w = w_alt;
  const cplx u = std::abs(w) > 0.0 ? std::pow(w, 1.0 / 3.0) : cplx(0.0);
  const cplx zeta(-0.5, std::sqrt(3.0) / 2.0);
  cplx uk = u;
  std::array<cplx, 3> t{};
  for (int k = 0; k < 3; ++k) {
    t[k] = std::abs(uk) > 0.0 ? uk - p / (3.0 * uk) : cplx(0.0);
    uk *= zeta;
  }

  std::array<cplx, 3> r{};
  for (int k = 0; k < 3; ++k) r[k] = t[k] - c2 / 3.0;

  // A cubic resolves an m-fold root only to about eps^(1/m), so nearby roots
  // are grouped first and each group is refined as a whole: a pair by Newton
  // on p', whose root there is simple, a triple by the root of p''.
  constexpr double kClusterTol = 1e-4;
  std::array<int, 3> group{0, 1, 2};
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      if (std::abs(r[i] - r[j]) < kClusterTol) {
        const int from = group[j];
        const int to = group[i];
        for (int& g : group) {
          if (g == from) g = to;
        }
      }
    }
  }

  const auto f = [&](cplx x) { return ((x + c2) * x + c1) * x + c0; };
  const auto df = [&](cplx x) { return (3.0 * x + 2.0 * c2) * x + c1; };
  const auto d2f = [&](cplx x) { return 6.0 * x + 2.0 * c2; };
  // One guarded Newton step for g with derivative dg.
  const auto newton = [](auto g, auto dg, cplx x) {
    const cplx d = dg(x);
    if (!(std::abs(d) > 0.0)) return x;
    const cplx cand = x - g(x) / d;
    return std::abs(g(cand)) < std::abs(g(x)) ? cand : x;
  };

  std::array<cplx, 3> merged = r;
  for (int i = 0; i < 3; ++i) {
    cplx sum = 0.0;
    int count = 0;
    for (int j = 0; j < 3; ++j) {
      if (group[j] == group[i]) {
        sum += r[j];
        ++count;
      }
    }
    const cplx mean = sum / static_cast<double>(count);
    if (count == 1) {
      merged[i] = newton(f, df, mean);
    } else if (count == 2) {
      merged[i] = newton(df, d2f, mean);
    } else {
      merged[i] = -c2 / 3.0;
    }
  }

  for (int k = 0; k < 3; ++k) lam[k] = shift + scale * merged[k];
  std::sort(lam.begin(), lam.end(), [](cplx x, cplx y) {
    return x.real() < y.real() || (x.real() == y.real() && x.imag() < y.imag());
  });
  return lam;
}

double spectral_radius(const Mat3& a) {
  const auto lam = eig3(a);
  return std::max({std::abs(lam[0]), std::abs(lam[1]), std::abs(lam[2])});
}

std::vector<Frequency> high_frequency_lattice(int resolution) {
  std::vector<Frequency> out;
  out.reserve(static_cast<std::size_t>(resolution) * resolution);
  const double step = 2 * kPi / resolution;
  for (int a = 0; a < resolution; ++a) {
    for (int b = 0; b < resolution; ++b) {
      const Frequency t{-kPi / 2 + a * step, -kPi / 2 + b * step};
      if (t.is_high()) out.push_back(t);
    }
  }
  return out;
}

SmoothingResult smoothing_factor(RelaxScheme scheme, const RelaxParams& params, int resolution) {
  if (resolution < 16) {
    throw std::invalid_argument("smoothing_factor: resolution must be at least 16");
  }
  validate(params);
  SmoothingResult best;
  best.mu = -1.0;
  for (const Frequency& t : high_frequency_lattice(resolution)) {
    const double rho = spectral_radius(relaxation_symbol(scheme, params, t).entries);
    if (rho > best.mu) best = {rho, t};
  }
  return best;
}

UzawaDiagnostics uzawa_branches(const RelaxParams& params, double mr) {
  validate(params);
  if (!(mr >= 8.0 / 9.0 - 1e-12 && mr <= 16.0 / 9.0 + 1e-12)) {
    throw std::invalid_argument("uzawa_branches: m_r must lie in [8/9, 16/9]");
  }
  const double w = params.omega;
  const double a = params.alpha;
  const double s = params.sigma;

  UzawaDiagnostics d;
  d.m2 = 4.0 * a * s / ((1.0 + s) * (1.0 + s));
  d.lambda_star = mr / a;
  d.x = (1.0 + s) * w / a;
  d.y = w * w * s / a;

  // d(lambda) = lambda^2 - (1+sigma) m_r/alpha lambda + m_r sigma/alpha
  const double sum = (1.0 + s) * mr / a;
  const double prod = mr * s / a;
  d.discriminant = sum * sum - 4.0 * prod;
  const cplx root = std::sqrt(cplx(d.discriminant));
  d.d_roots = {(sum + root) / 2.0, (sum - root) / 2.0};
  d.complex_branch = mr < d.m2;

  d.upsilon_sq = 1.0 + (w / a) * (w * s - s - 1.0) * mr;
  d.upsilon = std::sqrt(std::max(0.0, d.upsilon_sq));
  if (!d.complex_branch) {
    const double root_term = std::sqrt(std::max(0.0, 1.0 - d.m2 / mr));
    d.chi_plus = mr / 2.0 * (1.0 + root_term);
    d.chi_minus = mr / 2.0 * (1.0 - root_term);
  }
  if (d.m2 <= 16.0 / 9.0) {
    const double root_term = std::sqrt(std::max(0.0, 1.0 - 9.0 * d.m2 / 16.0));
    const double chi1 = 8.0 / 9.0 * (1.0 + root_term);
    const double chi2 = 8.0 / 9.0 * (1.0 - root_term);
    d.mu_r = d.x >= 9.0 / 8.0 ? d.x * chi1 - 1.0 : 1.0 - d.x * chi2;
  }
  if (d.m2 >= 8.0 / 9.0) {
    d.mu_c = std::sqrt(std::max(0.0, 1.0 + 8.0 * w * (w * s - s - 1.0) / (9.0 * a)));
  }
  return d;
}

std::vector<double> ParamRange::values() const {
  if (!(step > 0.0) || !(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw std::domain_error("ParamRange: empty or invalid range");
  }
  std::vector<double> out;
  const long count = static_cast<long>(std::floor((hi - lo) / step + 1e-9)) + 1;
  out.reserve(count);
  for (long k = 0; k < count; ++k) out.push_back(lo + static_cast<double>(k) * step);
  return out;
}

SearchSpec default_search(RelaxScheme scheme) {
  SearchSpec s;
  switch (scheme) {
    case RelaxScheme::QDR:
      s.omega = {0.1, 1.5, 1e-3};
      s.refinements = 0;
      break;
    case RelaxScheme::QBSRExact:
      s.omega = {0.1, 1.5, 1e-2};
      break;
    case RelaxScheme::QIBSR:
      s.omega = {0.6, 1.5, 0.05};
      s.alpha = {0.8, 2.0, 0.1};
      s.omega_j = {0.6, 1.4, 0.1};
      break;
    case RelaxScheme::QSigmaUzawa:
      s.omega = {0.6, 1.5, 0.05};
      s.alpha = {0.6, 2.0, 0.1};
      s.sigma = {0.2, 1.2, 0.1};
      break;
    case RelaxScheme::DWJBaseline:
      s.omega = {0.1, 1.5, 0.01};
      s.alpha = {0.5, 2.0, 0.1};
      break;
    case RelaxScheme::DiagIBSRBaseline:
      s.omega = {0.6, 1.4, 0.05};
      s.alpha = {0.8, 1.8, 0.05};
      s.omega_j = {0.4, 1.2, 0.1};
      break;
    case RelaxScheme::DiagSigmaUzawaBaseline:
      s.omega = {0.3, 1.2, 0.05};
      s.alpha = {0.5, 1.5, 0.1};
      s.sigma = {0.2, 1.0, 0.1};
      break;
  }
  return s;
}

namespace {

struct Box {
  std::vector<double> omega, alpha, sigma, omega_j;
};

ParamRange shrink(const ParamRange& r, double centre) {
  if (r.lo == r.hi) return r;
  const double step = r.step / 5.0;
  return {std::max(r.lo, centre - r.step), std::min(r.hi, centre + r.step), step};
}

}  // namespace

SearchResult optimize_params(RelaxScheme scheme, const SearchSpec& spec) {
  SearchSpec current = spec;
  if (!uses_sigma(scheme)) current.sigma = ParamRange::fixed(1.0);
  if (!uses_omega_j(scheme)) current.omega_j = ParamRange::fixed(1.0);

  SearchResult best;
  best.mu = std::numeric_limits<double>::infinity();
  for (int pass = 0; pass <= std::max(0, spec.refinements); ++pass) {
    const Box box{current.omega.values(), current.alpha.values(), current.sigma.values(),
                  current.omega_j.values()};
    for (double w : box.omega) {
      for (double a : box.alpha) {
        for (double s : box.sigma) {
          for (double j : box.omega_j) {
            const RelaxParams p{w, a, s, j};
            if (w <= 0.0 || a <= 0.0 || s <= 0.0 || j <= 0.0) continue;
            const double mu = smoothing_factor(scheme, p, spec.resolution).mu;
            ++best.evaluations;
            if (mu < best.mu) {
              best.mu = mu;
              best.params = p;
            }
          }
        }
      }
    }
    current.omega = shrink(current.omega, best.params.omega);
    current.alpha = shrink(current.alpha, best.params.alpha);
    current.sigma = shrink(current.sigma, best.params.sigma);
    current.omega_j = shrink(current.omega_j, best.params.omega_j);
  }
  if (!std::isfinite(best.mu)) throw std::domain_error("optimize_params: empty search box");
  best.mu = smoothing_factor(scheme, best.params, spec.report_resolution).mu;
  return best;
}

double analytic_optimum(RelaxScheme scheme) {
  switch (scheme) {
    case RelaxScheme::QDR:
    case RelaxScheme::QBSRExact:
    case RelaxScheme::QIBSR:
      return 1.0 / 3.0;
    case RelaxScheme::QSigmaUzawa:
      return std::sqrt(1.0 / 3.0);
    case RelaxScheme::DWJBaseline:
    case RelaxScheme::DiagIBSRBaseline:
      return 0.6;
    case RelaxScheme::DiagSigmaUzawaBaseline:
      return std::sqrt(0.6);
  }
  throw std::logic_error("unknown RelaxScheme");
}

}  // namespace macmg::lfa
