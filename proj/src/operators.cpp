#include "macmg/operators.hpp"

#include <vector>

namespace macmg {

namespace {

// Neighbour index tables for one period; avoids a modulo in the inner loops.
struct Wrap {
  std::vector<int> prev;
  std::vector<int> next;
  explicit Wrap(int n) : prev(n), next(n) {
    for (int i = 0; i < n; ++i) {
      prev[i] = (i + n - 1) % n;
      next[i] = (i + 1) % n;
    }
  }
};

}  // namespace

Array2D apply_laplacian(const GridSpec& grid, const Array2D& w) {
  require_on_grid(w, grid, "apply_laplacian");
  const int n = grid.n();
  const double inv_h2 = 1.0 / (grid.h() * grid.h());
  const Wrap wr(n);
  Array2D out(n);
  for (int j = 0; j < n; ++j) {
    const int jm = wr.prev[j];
    const int jp = wr.next[j];
    for (int i = 0; i < n; ++i) {
      out(i, j) = inv_h2 * (4.0 * w(i, j) - w(wr.prev[i], j) - w(wr.next[i], j) - w(i, jm) -
                            w(i, jp));
    }
  }
  return out;
}

Array2D apply_pressure_laplacian(const GridSpec& grid, const Array2D& q) {
  return apply_laplacian(grid, q);
}

Array2D apply_stencil9(const GridSpec& grid, const Stencil9& s, const Array2D& w) {
  require_on_grid(w, grid, "apply_stencil9");
  const int n = grid.n();
  const double h2 = grid.h() * grid.h();
  const double c = h2 * s.center;
  const double e = h2 * s.edge;
  const double k = h2 * s.corner;
  const Wrap wr(n);
  Array2D out(n);
  if (s.edge == 0.0 && s.corner == 0.0) {
    const auto in = w.values();
    auto o = out.values();
    for (std::size_t idx = 0; idx < in.size(); ++idx) o[idx] = c * in[idx];
    return out;
  }
  for (int j = 0; j < n; ++j) {
    const int jm = wr.prev[j];
    const int jp = wr.next[j];
    for (int i = 0; i < n; ++i) {
      const int im = wr.prev[i];
      const int ip = wr.next[i];
      out(i, j) = c * w(i, j) + e * (w(im, j) + w(ip, j) + w(i, jm) + w(i, jp)) +
                  k * (w(im, jm) + w(ip, jm) + w(im, jp) + w(ip, jp));
    }
  }
  return out;
}

Array2D apply_mass(const GridSpec& grid, const Array2D& w) {
  return apply_stencil9(grid, Stencil9::mass(), w);
}

Array2D apply_gradient_x(const GridSpec& grid, const Array2D& p) {
  require_on_grid(p, grid, "apply_gradient_x");
  const int n = grid.n();
  const double inv_h = 1.0 / grid.h();
  const Wrap wr(n);
  Array2D out(n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) out(i, j) = inv_h * (p(i, j) - p(wr.prev[i], j));
  }
  return out;
}

Array2D apply_gradient_y(const GridSpec& grid, const Array2D& p) {
  require_on_grid(p, grid, "apply_gradient_y");
  const int n = grid.n();
  const double inv_h = 1.0 / grid.h();
  const Wrap wr(n);
  Array2D out(n);
  for (int j = 0; j < n; ++j) {
    const int jm = wr.prev[j];
    for (int i = 0; i < n; ++i) out(i, j) = inv_h * (p(i, j) - p(i, jm));
  }
  return out;
}

Array2D apply_divergence(const GridSpec& grid, const Array2D& u, const Array2D& v) {
  require_on_grid(u, grid, "apply_divergence");
  require_on_grid(v, grid, "apply_divergence");
  const int n = grid.n();
  const double inv_h = 1.0 / grid.h();
  const Wrap wr(n);
  Array2D out(n);
  for (int j = 0; j < n; ++j) {
    const int jp = wr.next[j];
    for (int i = 0; i < n; ++i) {
      out(i, j) = inv_h * (u(wr.next[i], j) - u(i, j) + v(i, jp) - v(i, j));
    }
  }
  return out;
}

Array2D apply_b(const GridSpec& grid, const Array2D& u, const Array2D& v) {
  Array2D d = apply_divergence(grid, u, v);
  d *= -1.0;
  return d;
}

StaggeredField apply_stokes(const GridSpec& grid, const StaggeredField& x) {
  require_on_grid(x, grid, "apply_stokes");
  StaggeredField y;
  y.u = apply_laplacian(grid, x.u) + apply_gradient_x(grid, x.p);
  y.v = apply_laplacian(grid, x.v) + apply_gradient_y(grid, x.p);
  y.p = apply_b(grid, x.u, x.v);
  return y;
}

StaggeredField residual(const GridSpec& grid, const StaggeredField& b, const StaggeredField& x) {
  require_on_grid(b, grid, "residual");
  StaggeredField r = b;
  r -= apply_stokes(grid, x);
  return r;
}

}  // namespace macmg
