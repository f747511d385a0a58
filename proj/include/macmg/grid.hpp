#pragma once

// Uniform periodic MAC grids and the staggered (u, v, p) block unknown.
//
// Cell (i, j) of an n x n grid on the unit square has its pressure at
// ((i + 1/2) h, (j + 1/2) h), its u-velocity on the left vertical edge
// (i h, (j + 1/2) h) and its v-velocity on the bottom horizontal edge
// ((i + 1/2) h, j h). Each component is stored row-major (y index j is the
// slow index), with periodic wrap applied by the stencil code.

#include <cstddef>
#include <span>
#include <vector>

namespace macmg {

/// Mesh descriptor. `n` cells per side, mesh width h = 1/n.
///
/// n is restricted to powers of two >= 4 so that every grid coarsens down to
/// the 4x4 coarsest level; 1/n is then exactly representable, so h * n == 1
/// holds bit-for-bit.
class GridSpec {
 public:
  explicit GridSpec(int n);

  int n() const { return n_; }
  double h() const { return h_; }
  std::size_t size() const { return static_cast<std::size_t>(n_) * n_; }

  bool can_coarsen() const { return n_ >= 8; }
  GridSpec coarser() const;
  GridSpec finer() const { return GridSpec(2 * n_); }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

 private:
  int n_;
  double h_;
};

bool is_power_of_two(int n);

/// One scalar component on an n x n periodic grid.
class Array2D {
 public:
  Array2D() = default;
  explicit Array2D(int n, double value = 0.0)
      : n_(n), data_(static_cast<std::size_t>(n) * n, value) {}

  int n() const { return n_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(int i, int j) { return data_[static_cast<std::size_t>(j) * n_ + i]; }
  double operator()(int i, int j) const { return data_[static_cast<std::size_t>(j) * n_ + i]; }

  /// Periodic access; any integer offsets are wrapped into [0, n).
  double at_wrapped(int i, int j) const { return (*this)(wrap(i), wrap(j)); }
  int wrap(int i) const { return ((i % n_) + n_) % n_; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  Array2D& operator+=(const Array2D& o);
  Array2D& operator-=(const Array2D& o);
  Array2D& operator*=(double s);
  /// this += s * o
  Array2D& axpy(double s, const Array2D& o);

  double sum() const;
  double mean() const { return sum() / static_cast<double>(size()); }
  void subtract_mean();

  friend Array2D operator+(Array2D a, const Array2D& b) { return a += b; }
  friend Array2D operator-(Array2D a, const Array2D& b) { return a -= b; }
  friend Array2D operator*(double s, Array2D a) { return a *= s; }

 private:
  int n_ = 0;
  std::vector<double> data_;
};

/// Sums run in storage order (row by row, i fastest) so every reduction is
/// bitwise reproducible for a given grid.
double dot(const Array2D& a, const Array2D& b);

/// The block unknown x = (u, v, p) of the discrete Stokes system.
struct StaggeredField {
  Array2D u;
  Array2D v;
  Array2D p;

  StaggeredField() = default;
  explicit StaggeredField(const GridSpec& grid, double value = 0.0)
      : u(grid.n(), value), v(grid.n(), value), p(grid.n(), value) {}

  int n() const { return p.n(); }
  bool matches(const GridSpec& grid) const {
    return u.n() == grid.n() && v.n() == grid.n() && p.n() == grid.n();
  }

  StaggeredField& operator+=(const StaggeredField& o);
  StaggeredField& operator-=(const StaggeredField& o);
  StaggeredField& operator*=(double s);
  StaggeredField& axpy(double s, const StaggeredField& o);

  /// Removes the constant mode from every component.
  void subtract_means();

  friend StaggeredField operator+(StaggeredField a, const StaggeredField& b) { return a += b; }
  friend StaggeredField operator-(StaggeredField a, const StaggeredField& b) { return a -= b; }
  friend StaggeredField operator*(double s, StaggeredField a) { return a *= s; }
};

/// Euclidean inner product over all 3 n^2 entries (u, then v, then p).
double dot(const StaggeredField& a, const StaggeredField& b);
double norm2(const StaggeredField& x);

/// Throws std::invalid_argument if the field does not live on `grid`.
void require_on_grid(const StaggeredField& x, const GridSpec& grid, const char* what);
void require_on_grid(const Array2D& x, const GridSpec& grid, const char* what);

}  // namespace macmg
