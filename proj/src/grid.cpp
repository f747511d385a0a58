#include "macmg/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace macmg {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

GridSpec::GridSpec(int n) : n_(n), h_(0.0) {
  if (n < 4 || !is_power_of_two(n)) {
    throw std::invalid_argument("GridSpec: n must be a power of two >= 4, got " +
                                std::to_string(n));
  }
  h_ = 1.0 / static_cast<double>(n);
}

GridSpec GridSpec::coarser() const {
  if (!can_coarsen()) {
    throw std::invalid_argument("GridSpec: cannot coarsen a " + std::to_string(n_) + "x" +
                                std::to_string(n_) + " grid below 4x4");
  }
  return GridSpec(n_ / 2);
}

namespace {
void require_same(const Array2D& a, const Array2D& b) {
  if (a.n() != b.n()) throw std::invalid_argument("Array2D: size mismatch");
}
}  // namespace

Array2D& Array2D::operator+=(const Array2D& o) {
  require_same(*this, o);
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
  return *this;
}

Array2D& Array2D::operator-=(const Array2D& o) {
  require_same(*this, o);
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
  return *this;
}

Array2D& Array2D::operator*=(double s) {
  for (double& x : data_) x *= s;
  return *this;
}

Array2D& Array2D::axpy(double s, const Array2D& o) {
  require_same(*this, o);
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += s * o.data_[k];
  return *this;
}

double Array2D::sum() const {
  double s = 0.0;
  for (double x : data_) s += x;
  return s;
}

void Array2D::subtract_mean() {
  const double m = mean();
  for (double& x : data_) x -= m;
}

double dot(const Array2D& a, const Array2D& b) {
  require_same(a, b);
  const auto av = a.values();
  const auto bv = b.values();
  double s = 0.0;
  for (std::size_t k = 0; k < av.size(); ++k) s += av[k] * bv[k];
  return s;
}

StaggeredField& StaggeredField::operator+=(const StaggeredField& o) {
  u += o.u;
  v += o.v;
  p += o.p;
  return *this;
}

StaggeredField& StaggeredField::operator-=(const StaggeredField& o) {
  u -= o.u;
  v -= o.v;
  p -= o.p;
  return *this;
}

StaggeredField& StaggeredField::operator*=(double s) {
  u *= s;
  v *= s;
  p *= s;
  return *this;
}

StaggeredField& StaggeredField::axpy(double s, const StaggeredField& o) {
  u.axpy(s, o.u);
  v.axpy(s, o.v);
  p.axpy(s, o.p);
  return *this;
}

void StaggeredField::subtract_means() {
  u.subtract_mean();
  v.subtract_mean();
  p.subtract_mean();
}

double dot(const StaggeredField& a, const StaggeredField& b) {
  return dot(a.u, b.u) + dot(a.v, b.v) + dot(a.p, b.p);
}

double norm2(const StaggeredField& x) { return std::sqrt(dot(x, x)); }

void require_on_grid(const StaggeredField& x, const GridSpec& grid, const char* what) {
  if (!x.matches(grid)) {
    throw std::invalid_argument(std::string(what) + ": field is not defined on a " +
                                std::to_string(grid.n()) + "x" + std::to_string(grid.n()) +
                                " grid");
  }
}

void require_on_grid(const Array2D& x, const GridSpec& grid, const char* what) {
  if (x.n() != grid.n()) {
    throw std::invalid_argument(std::string(what) + ": array is not defined on a " +
                                std::to_string(grid.n()) + "x" + std::to_string(grid.n()) +
                                " grid");
  }
}

}  // namespace macmg
