#pragma once

// Matrix-free stencil operators of the periodic MAC discretization.
//
//   L_h = [ -Lap   0    Gx ]      Gx p(i,j) = (p(i,j) - p(i-1,j)) / h   (at u-points)
//         [  0   -Lap   Gy ]      Gy p(i,j) = (p(i,j) - p(i,j-1)) / h   (at v-points)
//         [ -Dx   -Dy   0  ]      Dx u + Dy v = (u(i+1,j) - u(i,j) + v(i,j+1) - v(i,j)) / h
//
// B = -div maps edges to cell centers and B^T = (Gx, Gy); the system has the
// saddle form [A B^T; B 0].

#include "macmg/grid.hpp"

namespace macmg {

/// Symmetric 9-point stencil whose weights are multiples of h^2:
///   h^2 * [corner edge corner; edge center edge; corner edge corner].
/// Used for the mass-matrix approximation Q and for the scaled identity of
/// the Jacobi baselines.
struct Stencil9 {
  double center = 0.0;
  double edge = 0.0;
  double corner = 0.0;

  double row_sum() const { return center + 4.0 * edge + 4.0 * corner; }

  /// Bilinear finite-element mass stencil h^2/36 [1 4 1; 4 16 4; 1 4 1].
  static Stencil9 mass() { return {16.0 / 36.0, 4.0 / 36.0, 1.0 / 36.0}; }
  /// Inverse diagonal of the 5-point Laplacian, (h^2/4) I.
  static Stencil9 jacobi() { return {0.25, 0.0, 0.0}; }
};

/// 5-point -Lap_h on any one component (u, v or cell-centered p).
Array2D apply_laplacian(const GridSpec& grid, const Array2D& w);

/// A_p: the 5-point Laplacian at cell centers. Same stencil as above.
Array2D apply_pressure_laplacian(const GridSpec& grid, const Array2D& q);

/// h^2-weighted 9-point stencil applied to one component with periodic wrap.
Array2D apply_stencil9(const GridSpec& grid, const Stencil9& s, const Array2D& w);

/// Q w with the bilinear mass stencil.
Array2D apply_mass(const GridSpec& grid, const Array2D& w);

/// (d/dx)_{h/2} p sampled at u-points.
Array2D apply_gradient_x(const GridSpec& grid, const Array2D& p);
/// (d/dy)_{h/2} p sampled at v-points.
Array2D apply_gradient_y(const GridSpec& grid, const Array2D& p);
/// (d/dx)_{h/2} u + (d/dy)_{h/2} v sampled at cell centers.
Array2D apply_divergence(const GridSpec& grid, const Array2D& u, const Array2D& v);

/// B U = -div U.
Array2D apply_b(const GridSpec& grid, const Array2D& u, const Array2D& v);

/// y = L_h x.
StaggeredField apply_stokes(const GridSpec& grid, const StaggeredField& x);

/// b - L_h x.
StaggeredField residual(const GridSpec& grid, const StaggeredField& b, const StaggeredField& x);

}  // namespace macmg
