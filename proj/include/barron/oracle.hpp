#pragma once

#include <vector>

#include "barron/problem.hpp"
#include "barron/quadrature.hpp"

namespace barron {

// Independent ground truth for the flow: a dense spectral-Galerkin solve in
// coefficient space and a conservative finite-difference solve on a grid.

struct OracleSolution {
  enum class Kind { Galerkin, FiniteDifference } kind = Kind::Galerkin;
  // Galerkin payload.
  TrigExpansion expansion{1};
  int cutoff = 0;            // max per-coordinate frequency in the basis
  double energy = 0.0;
  double tail_bound = 0.0;   // energy decrement of the last refinement
  // Finite-difference payload.
  std::vector<double> grid;  // lexicographic over shape
  std::vector<int> shape;
  double spacing = 0.0;
  bool cell_centered = false;
  // Galerkin: rigorous H1 error bound ||residual||_{H1} / lambda_min by
  // coercivity. Finite differences: the h^2 consistency scale.
  double accuracy_estimate = 0.0;
};

// Galerkin solve over all admissible basis terms with ||k||_inf <= cutoff.
// Entries of the stiffness-plus-mass matrix are evaluated exactly in
// coefficient space; the SPD system is solved by dense Cholesky.
OracleSolution galerkin_solve(const EllipticProblem& p, int cutoff);

// Doubles the cutoff until the energy decrement drops below tail_tol (or
// the cap is reached); the final decrement is reported as the tail bound.
OracleSolution galerkin_auto(const EllipticProblem& p, double tail_tol = 1e-10,
                             int initial_cutoff = -1, int cutoff_cap = -1);

// Second-order conservative finite differences, d <= 3. Dirichlet
// eliminates boundary rows on the node grid; Neumann reflects the
// co-normal zero-flux condition on a cell-centered grid and requires a
// diagonal A. Solved by Jacobi-preconditioned conjugate gradients.
OracleSolution fd_solve(const EllipticProblem& p, int n);

// Relative L2 discrepancy between an FD solution and an expansion,
// measured on the FD grid.
double fd_relative_l2(const OracleSolution& fd, const TrigExpansion& u);

// Sample coordinates of the FD grid along one axis.
std::vector<double> fd_axis(const OracleSolution& fd);

// Smallest Dirichlet-Laplacian eigenvalue on an n-grid by inverse power
// iteration; the Poincare constant estimate is 1/sqrt(lambda_1).
struct PoincareResult {
  double constant = 0.0;
  double eigenvalue = 0.0;
  double mode_correlation = 0.0;  // against the first sine mode
  int iterations = 0;
};
PoincareResult poincare_check(int dim, int n);

}  // namespace barron
