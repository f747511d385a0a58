#include <doctest.h>

#include <random>

#include "macmg/lfa.hpp"
#include "macmg/operators.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace macmg;
using testing::ComplexField;
using testing::cplx;
using testing::kPi;

namespace {

template <class Op>
ComplexField apply(Op op, const ComplexField& f) {
  return {op(f.re), op(f.im)};
}

// Mode amplitudes that isolate one component.
lfa::Vec3 unit(int c) { return lfa::Vec3::Unit(c); }

}  // namespace

TEST_CASE("apply_stokes: zero and constant pressure") {
  const GridSpec g(8);
  CHECK(testing::max_abs(apply_stokes(g, StaggeredField(g))) == 0.0);
  StaggeredField x(g);
  x.p = Array2D(8, 3.5);
  CHECK(testing::max_abs(apply_stokes(g, x)) < 1e-12);
}

TEST_CASE("L_h annihilates constants in every component") {
  const GridSpec g(16);
  StaggeredField x(g);
  x.u = Array2D(16, 1.25);
  x.v = Array2D(16, -0.5);
  x.p = Array2D(16, 2.0);
  CHECK(testing::max_abs(apply_stokes(g, x)) < 1e-10);
}

TEST_CASE("Fourier modes diagonalize every operator") {
  const GridSpec g(16);
  const double h = g.h();
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> k(0, 15);
  std::normal_distribution<double> nd;
  int tested = 0;
  while (tested < 12) {
    const int k1 = k(rng);
    const int k2 = k(rng);
    if (k1 == 0 && k2 == 0) continue;
    ++tested;
    const double t1 = 2 * kPi * k1 / 16;
    const double t2 = 2 * kPi * k2 / 16;
    const lfa::Mat3 sym = lfa::stokes_symbol({t1, t2}, h).entries;
    CAPTURE(k1);
    CAPTURE(k2);

    const lfa::Vec3 amp(cplx(nd(rng), nd(rng)), cplx(nd(rng), nd(rng)), cplx(nd(rng), nd(rng)));
    const ComplexField x = testing::fourier_field(g, t1, t2, amp);
    CHECK(testing::relative_error(apply([&](auto& f) { return apply_stokes(g, f); }, x),
                                  testing::fourier_field(g, t1, t2, sym * amp)) < 1e-12);

    // Single-component operators, mapped into the field layout.
    const ComplexField u = testing::fourier_field(g, t1, t2, unit(0));
    const ComplexField v = testing::fourier_field(g, t1, t2, unit(1));
    const ComplexField p = testing::fourier_field(g, t1, t2, unit(2));
    auto lap_u = [&](const StaggeredField& f) {
      StaggeredField out(g);
      out.u = apply_laplacian(g, f.u);
      return out;
    };
    CHECK(testing::relative_error(apply(lap_u, u),
                                  testing::fourier_field(g, t1, t2, sym(0, 0) * unit(0))) < 1e-12);
    auto lap_p = [&](const StaggeredField& f) {
      StaggeredField out(g);
      out.p = apply_pressure_laplacian(g, f.p);
      return out;
    };
    const double a = 4.0 * lfa::m({t1, t2}) / (h * h);
    CHECK(testing::relative_error(apply(lap_p, p),
                                  testing::fourier_field(g, t1, t2, a * unit(2))) < 1e-12);
    auto mass_v = [&](const StaggeredField& f) {
      StaggeredField out(g);
      out.v = apply_mass(g, f.v);
      return out;
    };
    const double q = h * h / 9.0 * (2 + std::cos(t1)) * (2 + std::cos(t2));
    CHECK(testing::relative_error(apply(mass_v, v),
                                  testing::fourier_field(g, t1, t2, q * unit(1))) < 1e-12);
    if (k1 != 0) {
      auto gx = [&](const StaggeredField& f) {
        StaggeredField out(g);
        out.u = apply_gradient_x(g, f.p);
        return out;
      };
      const cplx g1(0.0, 2.0 * std::sin(t1 / 2) / h);
      CHECK(testing::relative_error(apply(gx, p), testing::fourier_field(g, t1, t2, g1 * unit(0))) <
            1e-12);
      auto div_u = [&](const StaggeredField& f) {
        StaggeredField out(g);
        out.p = apply_divergence(g, f.u, Array2D(16));
        return out;
      };
      CHECK(testing::relative_error(apply(div_u, u),
                                    testing::fourier_field(g, t1, t2, g1 * unit(2))) < 1e-12);
    }
    if (k2 != 0) {
      auto gy = [&](const StaggeredField& f) {
        StaggeredField out(g);
        out.v = apply_gradient_y(g, f.p);
        return out;
      };
      const cplx g2(0.0, 2.0 * std::sin(t2 / 2) / h);
      CHECK(testing::relative_error(apply(gy, p), testing::fourier_field(g, t1, t2, g2 * unit(1))) <
            1e-12);
    }
  }
}

TEST_CASE("apply_mass: row sum, symbol and impulse response") {
  const GridSpec g(8);
  const double h2 = g.h() * g.h();
  const Array2D ones = apply_mass(g, Array2D(8, 1.0));
  for (double e : ones.values()) CHECK(e == doctest::Approx(h2).epsilon(1e-14));

  Array2D impulse(8);
  impulse(3, 5) = 1.0;
  const Array2D r = apply_mass(g, impulse);
  const double w[3][3] = {{1, 4, 1}, {4, 16, 4}, {1, 4, 1}};
  double total = 0.0;
  for (int dj = -1; dj <= 1; ++dj) {
    for (int di = -1; di <= 1; ++di) {
      CHECK(r(3 + di, 5 + dj) == doctest::Approx(h2 / 36.0 * w[dj + 1][di + 1]));
      total += r(3 + di, 5 + dj);
    }
  }
  CHECK(r.sum() == doctest::Approx(total));  // nothing outside the 3x3 block
}

TEST_CASE("apply_stencil9 diagonal fast path matches the general loop") {
  std::mt19937_64 rng(2);
  const GridSpec g(8);
  const Array2D w = testing::random_field(g, rng).u;
  const Array2D fast = apply_stencil9(g, Stencil9::jacobi(), w);
  const Array2D slow = apply_stencil9(g, {0.25, 1e-300, 0.0}, w);
  for (std::size_t k = 0; k < w.size(); ++k) {
    CHECK(fast.values()[k] == doctest::Approx(slow.values()[k]).epsilon(1e-15));
  }
}

TEST_CASE("apply_pressure_laplacian: constants and checkerboard") {
  const GridSpec g(8);
  CHECK(testing::max_abs(apply_pressure_laplacian(g, Array2D(8, 4.0))) < 1e-12);
  Array2D cb(8);
  for (int j = 0; j < 8; ++j) {
    for (int i = 0; i < 8; ++i) cb(i, j) = (i + j) % 2 ? -1.0 : 1.0;
  }
  const Array2D r = apply_pressure_laplacian(g, cb);
  const double h = g.h();
  for (std::size_t k = 0; k < cb.size(); ++k) {
    CHECK(r.values()[k] == doctest::Approx(8.0 / (h * h) * cb.values()[k]));
  }
}

TEST_CASE("residual: trivial cases and sparse-matrix oracle") {
  const GridSpec g(8);
  std::mt19937_64 rng(5);
  CHECK(testing::max_abs(residual(g, StaggeredField(g), StaggeredField(g))) == 0.0);

  const StaggeredField x = testing::random_field(g, rng);
  const StaggeredField b = apply_stokes(g, x);
  CHECK(testing::max_abs(residual(g, b, x)) < 1e-12 * testing::max_abs(b));

  const auto a = oracle::assemble_stokes(8);
  const Eigen::VectorXd want = -(a * oracle::to_vector(x));
  const Eigen::VectorXd got = oracle::to_vector(residual(g, StaggeredField(g), x));
  const double scale = (a.cwiseAbs() * oracle::to_vector(x).cwiseAbs()).maxCoeff();
  CHECK((got - want).cwiseAbs().maxCoeff() < 1e-13 * scale);
}

TEST_CASE("divergence and gradient") {
  const GridSpec g(8);
  const double h = g.h();
  CHECK(testing::max_abs(apply_gradient_x(g, Array2D(8, 2.0))) == 0.0);
  CHECK(testing::max_abs(apply_gradient_y(g, Array2D(8, 2.0))) == 0.0);

  Array2D u(8);
  for (int j = 0; j < 8; ++j) {
    for (int i = 0; i < 8; ++i) u(i, j) = std::sin(2 * kPi * i * h);
  }
  const Array2D d = apply_divergence(g, u, Array2D(8));
  for (int j = 0; j < 8; ++j) {
    for (int i = 0; i < 8; ++i) {
      const double want = (std::sin(2 * kPi * (i + 1) * h) - std::sin(2 * kPi * i * h)) / h;
      CHECK(d(i, j) == doctest::Approx(want).epsilon(1e-13));
    }
  }
  const Array2D b = apply_b(g, u, Array2D(8));
  for (std::size_t k = 0; k < b.size(); ++k) CHECK(b.values()[k] == -d.values()[k]);
}

TEST_CASE("B and the gradient are adjoint") {
  const GridSpec g(8);
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const StaggeredField x = testing::random_field(g, rng);
    const Array2D bu = apply_b(g, x.u, x.v);
    const Array2D gx = apply_gradient_x(g, x.p);
    const Array2D gy = apply_gradient_y(g, x.p);
    const double lhs = dot(bu, x.p);
    const double rhs = dot(x.u, gx) + dot(x.v, gy);
    const double scale = std::sqrt(dot(bu, bu) * dot(x.p, x.p)) +
                         std::sqrt((dot(x.u, x.u) + dot(x.v, x.v)) * (dot(gx, gx) + dot(gy, gy)));
    CHECK(std::abs(lhs - rhs) < 1e-13 * scale);
  }
}

TEST_CASE("operators are linear") {
  const GridSpec g(16);
  std::mt19937_64 rng(13);
  const StaggeredField x = testing::random_field(g, rng);
  const StaggeredField y = testing::random_field(g, rng);
  const double a = 0.7;
  const double b = -1.9;
  const StaggeredField lhs = apply_stokes(g, a * x + b * y);
  const StaggeredField rhs = a * apply_stokes(g, x) + b * apply_stokes(g, y);
  CHECK(testing::max_abs(lhs - rhs) < 1e-12 * testing::max_abs(rhs));
  const Array2D m1 = apply_mass(g, a * x.u + b * y.u);
  const Array2D m2 = a * apply_mass(g, x.u) + b * apply_mass(g, y.u);
  CHECK(testing::max_abs(m1 - m2) < 1e-15);
}
