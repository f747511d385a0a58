#pragma once

// Reference implementations that share no code with the matrix-free
// operators: explicit sparse assembly from the pointwise difference formulas,
// a general-purpose eigensolver, and sampled Fourier modes.
//
// Unknown numbering: u(i,j) -> j n + i, v(i,j) -> n^2 + j n + i,
// p(i,j) -> 2 n^2 + j n + i.

#include <array>
#include <complex>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "macmg/grid.hpp"

namespace macmg::oracle {

using cplx = std::complex<double>;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Full MAC Stokes matrix [-Lap 0 Gx; 0 -Lap Gy; B 0], 3n^2 x 3n^2.
SparseMatrix assemble_stokes(int n);
/// B = -div, n^2 x 2n^2 acting on (u, v).
SparseMatrix assemble_b(int n);
/// blockdiag(Q, Q) with the bilinear mass stencil, 2n^2 x 2n^2.
SparseMatrix assemble_mass_block(int n);

Eigen::VectorXd to_vector(const StaggeredField& x);
StaggeredField from_vector(const GridSpec& grid, const Eigen::VectorXd& v);

/// Eigenvalues from Eigen's QR-based complex eigensolver.
std::array<cplx, 3> eigenvalues(const Eigen::Matrix3cd& a);

/// min over the 6 pairings of max |a_i - b_pi(i)|.
double root_distance(const std::array<cplx, 3>& a, const std::array<cplx, 3>& b);

/// exp(i (theta1 (i + sx) + theta2 (j + sy))) split into real and imaginary
/// parts; (sx, sy) is the unknown's offset from the node in units of h.
struct ComplexGridFunction {
  Array2D re;
  Array2D im;
};
ComplexGridFunction fourier_mode(int n, double theta1, double theta2, double sx, double sy);

}  // namespace macmg::oracle
