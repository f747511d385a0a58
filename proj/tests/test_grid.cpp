#include <doctest.h>

#include <random>

#include "macmg/grid.hpp"
#include "support.hpp"

using namespace macmg;

TEST_CASE("GridSpec accepts powers of two from 4") {
  CHECK(GridSpec(4).n() == 4);
  CHECK(GridSpec(64).h() == doctest::Approx(1.0 / 64));
  CHECK(GridSpec(16).size() == 256);
  CHECK(GridSpec(32).coarser().n() == 16);
  CHECK(GridSpec(32).finer().n() == 64);
  CHECK_FALSE(GridSpec(4).can_coarsen());
  CHECK(GridSpec(8).can_coarsen());
  for (int bad : {0, 2, 3, 6, 12, -8}) CHECK_THROWS_AS(GridSpec{bad}, std::invalid_argument);
  CHECK_THROWS_AS(GridSpec(4).coarser(), std::invalid_argument);
}

TEST_CASE("Array2D wraps indices periodically") {
  Array2D a(4);
  a(3, 0) = 7.0;
  a(0, 3) = 5.0;
  CHECK(a.at_wrapped(-1, 0) == 7.0);
  CHECK(a.at_wrapped(7, 4) == 7.0);
  CHECK(a.at_wrapped(0, -1) == 5.0);
  CHECK(a.wrap(-5) == 3);
}

TEST_CASE("means and arithmetic") {
  std::mt19937_64 rng(3);
  const GridSpec g(8);
  StaggeredField x = testing::random_field(g, rng);
  StaggeredField y = testing::random_field(g, rng);
  x.subtract_means();
  CHECK(std::abs(x.u.mean()) < 1e-15);
  CHECK(std::abs(x.v.mean()) < 1e-15);
  CHECK(std::abs(x.p.mean()) < 1e-15);

  const StaggeredField z = 2.0 * x + y;
  StaggeredField w = y;
  w.axpy(2.0, x);
  CHECK(norm2(z - w) == 0.0);
  CHECK(dot(x, y) == doctest::Approx(dot(x.u, y.u) + dot(x.v, y.v) + dot(x.p, y.p)));
  CHECK(norm2(x) == doctest::Approx(std::sqrt(dot(x, x))));
}

TEST_CASE("reductions are reproducible") {
  std::mt19937_64 rng(9);
  const GridSpec g(32);
  const StaggeredField x = testing::random_field(g, rng);
  const StaggeredField y = x;
  CHECK(dot(x, x) == dot(y, y));
}

TEST_CASE("grid mismatch is rejected") {
  const StaggeredField x(GridSpec(8));
  CHECK(x.matches(GridSpec(8)));
  CHECK_FALSE(x.matches(GridSpec(16)));
  CHECK_THROWS_AS(require_on_grid(x, GridSpec(16), "test"), std::invalid_argument);
  CHECK_THROWS_AS(require_on_grid(Array2D(4), GridSpec(8), "test"), std::invalid_argument);
}
