#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Eigenvalues>

namespace macmg::oracle {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

int wrap(int i, int n) { return ((i % n) + n) % n; }
int cell(int i, int j, int n) { return wrap(j, n) * n + wrap(i, n); }

void five_point(Triplets& t, int row0, int col0, int n, double h) {
  const double s = 1.0 / (h * h);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int r = row0 + cell(i, j, n);
      t.emplace_back(r, col0 + cell(i, j, n), 4.0 * s);
      t.emplace_back(r, col0 + cell(i - 1, j, n), -s);
      t.emplace_back(r, col0 + cell(i + 1, j, n), -s);
      t.emplace_back(r, col0 + cell(i, j - 1, n), -s);
      t.emplace_back(r, col0 + cell(i, j + 1, n), -s);
    }
  }
}

// Rows of B = -div at cell centers, columns offset by col0.
void minus_divergence(Triplets& t, int row0, int col0, int n, double h) {
  const int m = n * n;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int r = row0 + cell(i, j, n);
      t.emplace_back(r, col0 + cell(i + 1, j, n), -1.0 / h);
      t.emplace_back(r, col0 + cell(i, j, n), 1.0 / h);
      t.emplace_back(r, col0 + m + cell(i, j + 1, n), -1.0 / h);
      t.emplace_back(r, col0 + m + cell(i, j, n), 1.0 / h);
    }
  }
}

}  // namespace

SparseMatrix assemble_stokes(int n) {
  const double h = 1.0 / n;
  const int m = n * n;
  Triplets t;
  five_point(t, 0, 0, n, h);
  five_point(t, m, m, n, h);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      // d/dx p at u(i,j), which sits between p(i-1,j) and p(i,j).
      t.emplace_back(cell(i, j, n), 2 * m + cell(i, j, n), 1.0 / h);
      t.emplace_back(cell(i, j, n), 2 * m + cell(i - 1, j, n), -1.0 / h);
      t.emplace_back(m + cell(i, j, n), 2 * m + cell(i, j, n), 1.0 / h);
      t.emplace_back(m + cell(i, j, n), 2 * m + cell(i, j - 1, n), -1.0 / h);
    }
  }
  minus_divergence(t, 2 * m, 0, n, h);
  SparseMatrix a(3 * m, 3 * m);
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

SparseMatrix assemble_b(int n) {
  const int m = n * n;
  Triplets t;
  minus_divergence(t, 0, 0, n, 1.0 / n);
  SparseMatrix b(m, 2 * m);
  b.setFromTriplets(t.begin(), t.end());
  return b;
}

SparseMatrix assemble_mass_block(int n) {
  const double h = 1.0 / n;
  const int m = n * n;
  const double w = h * h / 36.0;
  Triplets t;
  for (int blk = 0; blk < 2; ++blk) {
    const int o = blk * m;
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const int r = o + cell(i, j, n);
        for (int dj = -1; dj <= 1; ++dj) {
          for (int di = -1; di <= 1; ++di) {
            const int taps = (di == 0) + (dj == 0);  // 2 center, 1 edge, 0 corner
            const double c = taps == 2 ? 16.0 : taps == 1 ? 4.0 : 1.0;
            t.emplace_back(r, o + cell(i + di, j + dj, n), w * c);
          }
        }
      }
    }
  }
  SparseMatrix q(2 * m, 2 * m);
  q.setFromTriplets(t.begin(), t.end());
  return q;
}

Eigen::VectorXd to_vector(const StaggeredField& x) {
  const int m = static_cast<int>(x.p.size());
  Eigen::VectorXd v(3 * m);
  int k = 0;
  for (const Array2D* c : {&x.u, &x.v, &x.p}) {
    for (double e : c->values()) v(k++) = e;
  }
  return v;
}

StaggeredField from_vector(const GridSpec& grid, const Eigen::VectorXd& v) {
  StaggeredField x(grid);
  int k = 0;
  for (Array2D* c : {&x.u, &x.v, &x.p}) {
    for (double& e : c->values()) e = v(k++);
  }
  return x;
}

std::array<cplx, 3> eigenvalues(const Eigen::Matrix3cd& a) {
  Eigen::ComplexEigenSolver<Eigen::Matrix3cd> solver(a, false);
  const auto& ev = solver.eigenvalues();
  return {ev(0), ev(1), ev(2)};
}

double root_distance(const std::array<cplx, 3>& a, const std::array<cplx, 3>& b) {
  std::array<int, 3> perm{0, 1, 2};
  double best = std::numeric_limits<double>::infinity();
  do {
    double worst = 0.0;
    for (int k = 0; k < 3; ++k) worst = std::max(worst, std::abs(a[k] - b[perm[k]]));
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

ComplexGridFunction fourier_mode(int n, double theta1, double theta2, double sx, double sy) {
  ComplexGridFunction f{Array2D(n), Array2D(n)};
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double phase = theta1 * (i + sx) + theta2 * (j + sy);
      f.re(i, j) = std::cos(phase);
      f.im(i, j) = std::sin(phase);
    }
  }
  return f;
}

}  // namespace macmg::oracle
