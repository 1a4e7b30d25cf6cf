#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "barron/expansion.hpp"

namespace barron {

// Second-order elliptic problem -div(A grad u) + c u = f on (0,1)^d with a
// homogeneous Dirichlet (u = 0) or co-normal Neumann (A grad u . nu = 0)
// boundary condition. Coefficients are finite expansions; the ellipticity
// window [a_min, a_max] and the range [c_min, c_max] are declared by the
// caller and audited by sampling.
struct EllipticProblem {
  int dim = 1;
  BoundaryKind bc = BoundaryKind::Dirichlet;
  std::vector<TrigExpansion> A;  // row-major d*d, symmetric
  TrigExpansion c{1};
  TrigExpansion f{1};
  double a_min = 1.0, a_max = 1.0;
  double c_min = 1.0, c_max = 1.0;

  const TrigExpansion& A_at(int i, int j) const { return A[static_cast<std::size_t>(i * dim + j)]; }
  TrigExpansion& A_at(int i, int j) { return A[static_cast<std::size_t>(i * dim + j)]; }

  static EllipticProblem identity_problem(int dim, BoundaryKind bc);
};

// ---- validation ----

struct AuditReport {
  bool passed = true;
  std::vector<std::string> violations;
  double eig_min = 0.0, eig_max = 0.0;  // extreme sampled eigenvalues of A(x)
  double c_low = 0.0, c_high = 0.0;     // extreme sampled values of c(x)
  std::vector<double> worst_point;      // sample attaining the worst margin
  int samples = 0;
};

// Checks family constraints exactly (cosine diagonal for Dirichlet, cosine
// or sine diagonal for Neumann, mixed off-diagonal entries, cosine c, and
// sine/cosine f per boundary kind), A symmetry, and audits the declared
// constants on a Halton sample of the open cube.
AuditReport validate(const EllipticProblem& p, int samples = 10000, std::uint64_t seed = 0);

// Throwing wrapper: AssumptionError listing all violations.
void validate_or_throw(const EllipticProblem& p, int samples = 10000, std::uint64_t seed = 0);

// ---- derived constants ----

struct ConstantLedger {
  int dim = 1;
  double ell_A = 0.0;   // max weighted-1 norm over entries of A
  double ell_c = 0.0;   // weight-2 norm of c
  double ell_f = 0.0;   // weight-0 norm of f
  double lambda_min = 0.0, lambda_max = 0.0;
  double alpha_star = 0.0;  // lambda_min / (2 lambda_max^2)
  double beta_star = 0.0;   // sqrt(1 - lambda_min^2 / (4 lambda_max^2))
  double p_d = 0.0;         // (2+pi)/(2pi) alpha* ell_A d^2 + alpha* ell_c + 1
  double f_l2 = 0.0;
  double f_hminus1_upper = 0.0;
  double eps = 0.0;
  long long T = 0;  // iteration count driving the flow error below eps/2
  // Neuron budgets of the two network families; saturate at UINT64_MAX.
  std::uint64_t neuron_budget_cos = 0;
  std::uint64_t neuron_budget_relu = 0;
  double budget_cos_real = 0.0;  // pre-ceiling values for reporting
  double budget_relu_real = 0.0;
};

// Requires 0 < eps < 2 / lambda_min.
ConstantLedger constants(const EllipticProblem& p, double eps);

// q(d) = 256 d^2 + 128 d + 4, the squared norm bound of the ReLU dictionary.
double relu_dictionary_factor(int dim);

// Budgets k_cos = ceil(alpha*^2 ell_f^2 (p^T - 1)^2 / (eps^2 (p-1)^2)) and
// k_relu = ceil(q(d) * same). Returns (cos, relu), saturating at UINT64_MAX.
std::pair<std::uint64_t, std::uint64_t> neuron_budget(const ConstantLedger& ledger, double eps);

// ---- operator ----

// L u = -div(A grad u) + c u, expanded termwise; the result must stay in
// the admissible family (dust below parity_tol_rel of the largest
// coefficient is dropped, genuine violations raise ParityError).
TrigExpansion apply_operator(const EllipticProblem& p, const TrigExpansion& u,
                             double parity_tol_rel = 1e-12);

// Preconditioned residual (I - Laplacian)^{-1} (L u - f): the gradient of
// the energy in the H^1 inner product.
TrigExpansion residual(const EllipticProblem& p, const TrigExpansion& u);

// Energy E(u) = 1/2 int grad u . A grad u + c u^2 dx - int f u dx,
// evaluated exactly in coefficient space.
double energy(const EllipticProblem& p, const TrigExpansion& u);
double energy_given_lu(const EllipticProblem& p, const TrigExpansion& u, const TrigExpansion& lu);

// ---- problem files ----

// Declarative text format: an INI-like [meta] section (d, bc, a_min, a_max,
// c_min, c_max) followed by [A.i.j] / [c] / [f] sections holding expansion
// term lines. Omitted diagonal entries default to the constant 1, omitted
// off-diagonal entries to 0.
EllipticProblem load_problem(const std::string& path);
EllipticProblem parse_problem(std::istream& is, const std::string& origin = "<stream>");
void write_problem(std::ostream& os, const EllipticProblem& p);

}  // namespace barron
