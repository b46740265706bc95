#pragma once

#include "kvwave/geometry.hpp"

#include <Eigen/SparseCore>
#include <optional>

namespace kvwave {

using SpMat = Eigen::SparseMatrix<double>;

// State U = (u, v, y, z): displacement/velocity of the first wave, then of
// the second. The single damped wave uses only (u, v).
struct SystemState {
  Eigen::VectorXd u, v, y, z;

  static SystemState zero(int N, int blocks = 4);
};

struct XSeparable {
  Eigen::VectorXd b, c;  // x-profiles of the coefficient fields
  double b_wall_left = 0.0;
  double b_wall_right = 0.0;
};

// Discrete generator A_h U = (v, -aKu - B2 v - C z, z, -Ky + C v) with
// lumped identity mass; B2 is the Kelvin-Voigt stiffness K_b (or a viscous
// diagonal), B4 an optional extra damping block in the fourth row, C the
// diagonal coupling by c(x). blocks == 2 is the single damped wave
// (v, -Ku - B2 v).
struct DiscreteGenerator {
  Grid grid;
  double a = 1.0;
  int blocks = 4;
  SpMat K;
  SpMat B2;
  SpMat B4;                 // empty (0x0) means zero
  Eigen::VectorXd c_diag;   // size 0 means no coupling
  std::optional<XSeparable> xsep;  // set for 2D x-only coefficient fields

  int N() const { return grid.size(); }
  int full_dim() const { return blocks * N(); }
  double hd() const;  // h^dim, the quadrature weight of the inner product
};

// Dirichlet stiffness of -Laplace: (2,-1)/h^2 tridiagonal in 1D, 5-point
// (4,-1,-1,-1,-1)/h^2 in 2D, node order x-fastest.
SpMat laplacian_stiffness(const Grid& grid);

// Flux-form stiffness of -div(field * grad .): each edge carries the mean of
// its endpoint samples / h^2; wall edges use the wall samples. Constant field
// beta reproduces beta * laplacian_stiffness exactly.
SpMat weighted_stiffness(const Grid& grid, const CoefficientField& field);

DiscreteGenerator assemble_generator(const Grid& grid, double a,
                                     const CoefficientField& b_field,
                                     const CoefficientField& c_field);

// Viscous damping d(x) * velocity instead of Kelvin-Voigt. Coupled form:
// (eta, -aK phi - D_d eta - C xi, xi, -K psi - D_d xi + C eta).
// single = true gives the unit-speed damped wave (eta, -K phi - D_d eta);
// it fixes a = 1 per the model.
DiscreteGenerator assemble_viscous_generator(const Grid& grid, double a,
                                             const CoefficientField& d_field,
                                             const CoefficientField& c_field,
                                             bool single);

SystemState apply_generator(const DiscreteGenerator& gen,
                            const SystemState& state);

// E = (h^d / 2) (a u'Ku + |v|^2 + y'Ky + |z|^2).
double energy(const DiscreteGenerator& gen, const SystemState& state);

// -h^d (v'B2 v + z'B4 z) <= 0; equals 2 Re<A_h U, U> in the energy product.
double dissipation(const DiscreteGenerator& gen, const SystemState& state);

// Explicit sparse blocks*N x blocks*N matrix of A_h.
SpMat block_matrix(const DiscreteGenerator& gen);

Eigen::VectorXd stack(const SystemState& state);
SystemState unstack(const Eigen::VectorXd& x, int N, int blocks = 4);

// Matrix-free energy inner product <P, Q>_h on stacked states.
double energy_dot(const DiscreteGenerator& gen, const Eigen::VectorXd& p,
                  const Eigen::VectorXd& q);

}  // namespace kvwave
