#pragma once

#include <cmath>
#include <complex>
#include <random>

#include "macmg/grid.hpp"
#include "macmg/lfa.hpp"
#include "oracles.hpp"

namespace testing {

using macmg::Array2D;
using macmg::GridSpec;
using macmg::StaggeredField;
using cplx = std::complex<double>;

inline constexpr double kPi = macmg::lfa::kPi;

// Offsets of u, v, p from the grid node, in units of h.
inline constexpr double kOffset[3][2] = {{0.0, 0.5}, {0.5, 0.0}, {0.5, 0.5}};

inline StaggeredField random_field(const GridSpec& grid, std::mt19937_64& rng, double lo = -1.0,
                                   double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  StaggeredField x(grid);
  for (Array2D* c : {&x.u, &x.v, &x.p}) {
    for (double& e : c->values()) e = d(rng);
  }
  return x;
}

inline Array2D& component(StaggeredField& x, int c) { return c == 0 ? x.u : c == 1 ? x.v : x.p; }
inline const Array2D& component(const StaggeredField& x, int c) {
  return c == 0 ? x.u : c == 1 ? x.v : x.p;
}

// amp_c * exp(i theta . x) on each component, stored as real and imaginary parts.
struct ComplexField {
  StaggeredField re;
  StaggeredField im;
};

inline ComplexField fourier_field(const GridSpec& grid, double t1, double t2,
                                  const macmg::lfa::Vec3& amp) {
  ComplexField f{StaggeredField(grid), StaggeredField(grid)};
  for (int c = 0; c < 3; ++c) {
    const auto mode = macmg::oracle::fourier_mode(grid.n(), t1, t2, kOffset[c][0], kOffset[c][1]);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const cplx z = amp(c) * cplx(mode.re.values()[k], mode.im.values()[k]);
      component(f.re, c).values()[k] = z.real();
      component(f.im, c).values()[k] = z.imag();
    }
  }
  return f;
}

// max |got - want|, relative to max |want|, over all entries.
inline double relative_error(const ComplexField& got, const ComplexField& want) {
  double err = 0.0;
  double scale = 0.0;
  for (int c = 0; c < 3; ++c) {
    for (std::size_t k = 0; k < component(got.re, c).size(); ++k) {
      const cplx g(component(got.re, c).values()[k], component(got.im, c).values()[k]);
      const cplx w(component(want.re, c).values()[k], component(want.im, c).values()[k]);
      err = std::max(err, std::abs(g - w));
      scale = std::max(scale, std::abs(w));
    }
  }
  return err / scale;
}

// Zeroes every discrete frequency with |theta_1|, |theta_2| < pi/2 by a direct
// DFT. The open box keeps the kept set closed under theta -> -theta, so the
// result is real.
inline Array2D high_pass(const Array2D& a) {
  const int n = a.n();
  std::vector<cplx> coef(static_cast<std::size_t>(n) * n);
  auto theta = [n](int k) {
    double t = 2 * kPi * k / n;
    return t >= kPi ? t - 2 * kPi : t;
  };
  for (int k2 = 0; k2 < n; ++k2) {
    for (int k1 = 0; k1 < n; ++k1) {
      cplx s = 0.0;
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) s += a(i, j) * std::polar(1.0, -(theta(k1) * i + theta(k2) * j));
      }
      coef[static_cast<std::size_t>(k2) * n + k1] = s / double(n * n);
    }
  }
  Array2D out(n);
  for (int k2 = 0; k2 < n; ++k2) {
    for (int k1 = 0; k1 < n; ++k1) {
      const double t1 = theta(k1);
      const double t2 = theta(k2);
      if (std::abs(t1) < kPi / 2 - 1e-12 && std::abs(t2) < kPi / 2 - 1e-12) continue;
      const cplx c = coef[static_cast<std::size_t>(k2) * n + k1];
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) out(i, j) += (c * std::polar(1.0, t1 * i + t2 * j)).real();
      }
    }
  }
  return out;
}

inline StaggeredField high_pass(const StaggeredField& x) {
  StaggeredField out;
  out.u = high_pass(x.u);
  out.v = high_pass(x.v);
  out.p = high_pass(x.p);
  return out;
}

inline double max_abs(const Array2D& a) {
  double m = 0.0;
  for (double e : a.values()) m = std::max(m, std::abs(e));
  return m;
}

inline double max_abs(const StaggeredField& x) {
  return std::max({max_abs(x.u), max_abs(x.v), max_abs(x.p)});
}

}  // namespace testing
