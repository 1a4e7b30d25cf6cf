#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "barron/multi_index.hpp"

namespace barron {

enum class BoundaryKind { Dirichlet, Neumann };

// Sparse expansion g(x) = sum_t a_t * prod_i trig(pi k_i x_i) over the
// tensor-product trigonometric basis. Immutable in spirit: operations
// return new values, and stored terms never have zero coefficients or
// sine factors with zero frequency. Term order (lexicographic key order)
// is deterministic, so all derived results are reproducible.
class TrigExpansion {
 public:
  using TermMap = std::map<TermKey, double>;

  explicit TrigExpansion(int dim);

  int dim() const { return dim_; }
  const TermMap& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  // Accumulates a coefficient; exact zeros are erased.
  void add(const ParityVector& p, const MultiIndex& k, double coeff);
  void add(const TermKey& key, double coeff);

  double coeff(const ParityVector& p, const MultiIndex& k) const;
  double max_abs_coeff() const;
  std::int32_t max_frequency() const;  // max over coordinates and terms

  static TrigExpansion zero(int dim) { return TrigExpansion(dim); }
  static TrigExpansion constant(int dim, double value);
  // Single-term helpers.
  static TrigExpansion basis(const ParityVector& p, const MultiIndex& k, double coeff = 1.0);

  bool operator==(const TrigExpansion& other) const = default;

 private:
  int dim_;
  TermMap terms_;
};

// ---- linear algebra ----

// alpha*g + beta*h with exact-zero removal.
TrigExpansion axpy(double alpha, const TrigExpansion& g, double beta, const TrigExpansion& h);
TrigExpansion scale(double alpha, const TrigExpansion& g);

// Exact product expansion via per-coordinate product-to-sum identities and
// sign folding; per coordinate sin*cos -> sin, cos*cos -> cos, sin*sin -> cos.
TrigExpansion multiply(const TrigExpansion& g, const TrigExpansion& h);

// Term-by-term coordinate derivative (coord is 0-based).
TrigExpansion derivative(const TrigExpansion& g, int coord);

// Spectral inverse of (I - Laplacian) under the given boundary condition:
// admissible terms (pure sine for Dirichlet, pure cosine for Neumann) are
// scaled by 1/(1 + pi^2 ||k||^2). Wrong-parity terms below
// parity_tol_rel * max|coeff| are dropped as floating-point dust; larger
// ones raise ParityError, signalling that the input left the admissible
// class.
TrigExpansion inv_shifted_laplacian(const TrigExpansion& g, BoundaryKind bc,
                                    double parity_tol_rel = 1e-12);

ParityVector admissible_parity(int dim, BoundaryKind bc);

// Returns the shared parity vector when all terms agree, nothing otherwise.
std::optional<ParityVector> uniform_parity(const TrigExpansion& g);

// ---- norms ----

// Weighted Barron norm sum |a_k| (1 + pi^n ||k||^n). Requires a uniform
// parity (the norm is defined family by family). At n = 0 the weight is 2
// for every term, the zero mode included; this is the convention under
// which the inverse-operator identity
//   barron_norm(inv_shifted_laplacian(g), 2) == barron_norm(g, 0) / 2
// is exact.
double barron_norm(const TrigExpansion& g, double weight);

// Upper bound for the exponential-family Barron norm: equals
// barron_norm(g, weight) by sign-unfolding (||v|| = ||k|| for every
// unfolded frequency).
double e_norm_upper(const TrigExpansion& g, double weight);

// Analytic L2/H1 norms via orthogonality; require uniform parity.
double l2_norm(const TrigExpansion& g);
double h1_norm(const TrigExpansion& g);
// L2 inner product of two same-parity expansions.
double inner_l2(const TrigExpansion& g, const TrigExpansion& h);

// Upper bound l2_norm(f) / (pi sqrt(d)) for the H^{-1}(Omega) norm.
double hminus1_upper(const TrigExpansion& f);

// Exact integral over (0,1)^d. Per coordinate: cosine factors integrate to
// 1 (k = 0) or 0, sine factors to 2/(pi k) for odd k and 0 for even k.
double integral(const TrigExpansion& g);

// Pointwise evaluation.
double eval(const TrigExpansion& g, std::span<const double> x);

// ---- pruning ----

struct PruneResult {
  TrigExpansion expansion;
  double removed_mass_w2;  // sum of removed |a_k| (1 + pi^2 ||k||^2)
};

// Drops terms with |a_k| < tol (absolute) and reports the removed
// weight-2 Barron mass.
PruneResult prune(const TrigExpansion& g, double tol);

// ---- serialization ----

// One term per line: `parity-string index-tuple coefficient`,
// e.g. `sc (1,2) 0.25`. Reals carry 17 significant digits.
std::string to_text(const TrigExpansion& g);
void write_expansion(std::ostream& os, const TrigExpansion& g);
// Parses term lines until end of stream. Dimension is inferred from the
// first term; `dim` pins it up front (required for the zero expansion).
TrigExpansion read_expansion(std::istream& is, int dim = -1);
TrigExpansion expansion_from_text(const std::string& text, int dim = -1);

// Parses a single `parity index coeff` line into an existing expansion.
void add_term_from_line(TrigExpansion& g, const std::string& line);

std::string format_real(double v);  // %.17g

}  // namespace barron
