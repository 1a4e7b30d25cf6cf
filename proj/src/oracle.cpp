#include "barron/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace barron {

namespace {

// ---- dense Cholesky (in-place lower factor) ----

void cholesky(std::vector<double>& m, std::size_t n) {
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, m[i * n + i]);
  for (std::size_t j = 0; j < n; ++j) {
    double diag = m[j * n + j];
    for (std::size_t k = 0; k < j; ++k) diag -= m[j * n + k] * m[j * n + k];
    if (!(diag > 1e-14 * max_diag))
      throw SolverError("galerkin_solve: system is not positive definite (ellipticity violated?)");
    const double root = std::sqrt(diag);
    m[j * n + j] = root;
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = m[i * n + j];
      const double* ri = &m[i * n];
      const double* rj = &m[j * n];
      for (std::size_t k = 0; k < j; ++k) v -= ri[k] * rj[k];
      m[i * n + j] = v / root;
    }
  }
}

void cholesky_solve(const std::vector<double>& L, std::size_t n, std::vector<double>& b) {
  for (std::size_t i = 0; i < n; ++i) {
    double v = b[i];
    for (std::size_t k = 0; k < i; ++k) v -= L[i * n + k] * b[k];
    b[i] = v / L[i * n + i];
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double v = b[ii];
    for (std::size_t k = ii + 1; k < n; ++k) v -= L[k * n + ii] * b[k];
    b[ii] = v / L[ii * n + ii];
  }
}

// ---- conjugate gradients, matrix-free with Jacobi preconditioning ----

using ApplyFn = std::function<void(const std::vector<double>&, std::vector<double>&)>;

int conjugate_gradients(const ApplyFn& apply, const std::vector<double>& diag,
                        const std::vector<double>& b, std::vector<double>& x, double rel_tol,
                        int max_iter) {
  const std::size_t n = b.size();
  x.assign(n, 0.0);
  std::vector<double> r = b, z(n), p(n), ap(n);
  double bnorm = 0.0;
  for (double v : b) bnorm += v * v;
  bnorm = std::sqrt(bnorm);
  if (bnorm == 0.0) return 0;
  for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / diag[i];
  p = z;
  double rz = std::inner_product(r.begin(), r.end(), z.begin(), 0.0);
  for (int it = 1; it <= max_iter; ++it) {
    apply(p, ap);
    const double pap = std::inner_product(p.begin(), p.end(), ap.begin(), 0.0);
    if (!(pap > 0.0)) throw SolverError("conjugate gradients: operator lost positivity");
    const double alpha = rz / pap;
    double rnorm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
      rnorm += r[i] * r[i];
    }
    if (std::sqrt(rnorm) <= rel_tol * bnorm) return it;
    for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / diag[i];
    const double rz_next = std::inner_product(r.begin(), r.end(), z.begin(), 0.0);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  throw SolverError("conjugate gradients: no convergence within iteration cap");
}

// ---- admissible basis enumeration ----

std::vector<MultiIndex> admissible_indices(int d, BoundaryKind bc, int cutoff) {
  const int lo = bc == BoundaryKind::Dirichlet ? 1 : 0;
  std::vector<MultiIndex> out;
  MultiIndex k(static_cast<std::size_t>(d), lo);
  while (true) {
    out.push_back(k);
    int i = 0;
    for (; i < d; ++i) {
      if (++k[static_cast<std::size_t>(i)] <= cutoff) break;
      k[static_cast<std::size_t>(i)] = lo;
    }
    if (i == d) break;
  }
  return out;
}

// ---- grid helpers ----

struct GridIndexer {
  std::vector<int> shape;
  std::vector<std::size_t> strides;
  std::size_t size = 1;

  explicit GridIndexer(std::vector<int> s) : shape(std::move(s)) {
    strides.resize(shape.size());
    for (std::size_t a = 0; a < shape.size(); ++a) {
      strides[a] = size;
      size *= static_cast<std::size_t>(shape[a]);
    }
  }
  void decode(std::size_t idx, std::vector<int>& coord) const {
    for (std::size_t a = 0; a < shape.size(); ++a) {
      coord[a] = static_cast<int>(idx % static_cast<std::size_t>(shape[a]));
      idx /= static_cast<std::size_t>(shape[a]);
    }
  }
};

std::vector<double> eval_on_grid(const TrigExpansion& g, const GridIndexer& gi,
                                 const std::function<double(int, int)>& axis_coord) {
  std::vector<double> out(gi.size);
  std::vector<int> coord(gi.shape.size());
  std::vector<double> x(gi.shape.size());
  for (std::size_t idx = 0; idx < gi.size; ++idx) {
    gi.decode(idx, coord);
    for (std::size_t a = 0; a < x.size(); ++a) x[a] = axis_coord(static_cast<int>(a), coord[a]);
    out[idx] = eval(g, x);
  }
  return out;
}

bool is_diagonal(const EllipticProblem& p) {
  for (int i = 0; i < p.dim; ++i)
    for (int j = 0; j < p.dim; ++j)
      if (i != j && !p.A_at(i, j).empty()) return false;
  return true;
}

}  // namespace

OracleSolution galerkin_solve(const EllipticProblem& p, int cutoff) {
  const int d = p.dim;
  if (cutoff < 1) throw PreconditionError("galerkin_solve: cutoff must be >= 1");
  const int needed = p.f.max_frequency();
  if (cutoff < needed)
    throw PreconditionError("galerkin_solve: cutoff below the source's frequency support");
  const ParityVector parity = admissible_parity(d, p.bc);
  const std::vector<MultiIndex> basis = admissible_indices(d, p.bc, cutoff);
  const std::size_t m = basis.size();

  std::map<TermKey, std::size_t> row_of;
  for (std::size_t r = 0; r < m; ++r) row_of.emplace(make_key(parity, basis[r]), r);

  // a(T_p, T_q) = <T_p, L T_q> for admissible families (the boundary flux
  // vanishes), so one operator application per column fills it via
  // orthogonality.
  std::vector<double> mat(m * m, 0.0);
  std::vector<double> rhs(m, 0.0);
  for (std::size_t q = 0; q < m; ++q) {
    const TrigExpansion lt = apply_operator(p, TrigExpansion::basis(parity, basis[q]));
    for (const auto& [key, a] : lt.terms()) {
      auto it = row_of.find(key);
      if (it != row_of.end()) mat[it->second * m + q] = a * l2_key_norm_sq(key);
    }
  }
  // Symmetrize away the floating-point asymmetry of strong-form assembly.
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t q = r + 1; q < m; ++q) {
      const double v = 0.5 * (mat[r * m + q] + mat[q * m + r]);
      mat[r * m + q] = mat[q * m + r] = v;
    }
  for (const auto& [key, a] : p.f.terms()) {
    auto it = row_of.find(key);
    if (it != row_of.end()) rhs[it->second] = a * l2_key_norm_sq(key);
  }

  std::vector<double> coeffs = rhs;
  cholesky(mat, m);
  cholesky_solve(mat, m, coeffs);

  OracleSolution sol;
  sol.kind = OracleSolution::Kind::Galerkin;
  sol.cutoff = cutoff;
  sol.expansion = TrigExpansion(d);
  for (std::size_t r = 0; r < m; ++r)
    if (coeffs[r] != 0.0) sol.expansion.add(parity, basis[r], coeffs[r]);
  // At the Galerkin solution E = -1/2 rhs . coeffs.
  sol.energy = -0.5 * std::inner_product(rhs.begin(), rhs.end(), coeffs.begin(), 0.0);
  sol.accuracy_estimate =
      h1_norm(residual(p, sol.expansion)) / std::min(p.a_min, p.c_min);
  return sol;
}

OracleSolution galerkin_auto(const EllipticProblem& p, double tail_tol, int initial_cutoff,
                             int cutoff_cap) {
  const int d = p.dim;
  int radius = 0;
  for (const auto& e : p.A) radius = std::max(radius, static_cast<int>(e.max_frequency()));
  radius = std::max(radius, static_cast<int>(p.c.max_frequency()));
  int cutoff = initial_cutoff > 0
                   ? initial_cutoff
                   : std::max(1, static_cast<int>(p.f.max_frequency()) + radius + 1);
  if (cutoff_cap <= 0) {
    // Largest cutoff whose basis the dense factorization handles comfortably.
    const double basis_budget = 4096.0;
    cutoff_cap = 1;
    while (cutoff_cap < 1024) {
      const double per_axis =
          static_cast<double>(cutoff_cap + 1) + (p.bc == BoundaryKind::Neumann ? 1.0 : 0.0);
      if (std::pow(per_axis, d) > basis_budget) break;
      ++cutoff_cap;
    }
  }
  cutoff = std::min(cutoff, cutoff_cap);

  OracleSolution sol = galerkin_solve(p, cutoff);
  sol.tail_bound = std::numeric_limits<double>::infinity();
  while (cutoff < cutoff_cap) {
    const int next = std::min(2 * cutoff, cutoff_cap);
    OracleSolution refined = galerkin_solve(p, next);
    refined.tail_bound = sol.energy - refined.energy;
    sol = std::move(refined);
    cutoff = next;
    if (sol.tail_bound < tail_tol) break;
  }
  return sol;
}

OracleSolution fd_solve(const EllipticProblem& p, int n) {
  const int d = p.dim;
  if (d > 3) throw PreconditionError("fd_solve: supported for d <= 3");
  if (n < 16) throw PreconditionError("fd_solve: grid must have n >= 16");
  const double h = 1.0 / n;
  const double inv_h2 = 1.0 / (h * h);
  const bool dirichlet = p.bc == BoundaryKind::Dirichlet;
  if (!dirichlet && !is_diagonal(p))
    throw PreconditionError("fd_solve: the Neumann scheme supports diagonal A only");

  const int per_axis = dirichlet ? n - 1 : n;
  GridIndexer gi(std::vector<int>(static_cast<std::size_t>(d), per_axis));
  auto node = [&](int /*axis*/, int i) {
    return dirichlet ? h * (i + 1) : h * (i + 0.5);
  };

  // Coefficient samples: c at nodes, per-axis A_aa at +/- half offsets,
  // cross entries at nodes (Dirichlet only; the zero-extended u makes the
  // boundary-adjacent cross stencils consistent).
  std::vector<double> cvals = eval_on_grid(p.c, gi, node);
  std::vector<std::vector<double>> a_plus(static_cast<std::size_t>(d)),
      a_minus(static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a) {
    auto shifted = [&](double offset) {
      return eval_on_grid(p.A_at(a, a), gi, [&](int axis, int i) {
        double x = node(axis, i);
        if (axis == a) x += offset;
        return x;
      });
    };
    a_plus[static_cast<std::size_t>(a)] = shifted(0.5 * h);
    a_minus[static_cast<std::size_t>(a)] = shifted(-0.5 * h);
  }
  struct CrossEntry {
    int a, b;
    std::vector<double> values;
  };
  std::vector<CrossEntry> cross;
  if (dirichlet)
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        if (a != b && !p.A_at(a, b).empty())
          cross.push_back({a, b, eval_on_grid(p.A_at(a, b), gi, node)});

  std::vector<int> coord(static_cast<std::size_t>(d));
  auto neighbor = [&](std::size_t idx, const std::vector<int>& at, int axis, int step) -> long long {
    const int pos = at[static_cast<std::size_t>(axis)] + step;
    if (pos < 0 || pos >= per_axis) return -1;
    return static_cast<long long>(idx) + static_cast<long long>(step) *
                                             static_cast<long long>(gi.strides[static_cast<std::size_t>(axis)]);
  };

  ApplyFn apply = [&](const std::vector<double>& u, std::vector<double>& out) {
    std::vector<int> at(static_cast<std::size_t>(d));
    auto value = [&](long long idx) { return idx < 0 ? 0.0 : u[static_cast<std::size_t>(idx)]; };
    for (std::size_t idx = 0; idx < gi.size; ++idx) {
      gi.decode(idx, at);
      double v = cvals[idx] * u[idx];
      for (int a = 0; a < d; ++a) {
        const long long up = neighbor(idx, at, a, +1);
        const long long dn = neighbor(idx, at, a, -1);
        if (dirichlet) {
          // Homogeneous Dirichlet: fluxes through boundary faces see u = 0.
          v += inv_h2 * a_plus[static_cast<std::size_t>(a)][idx] * (u[idx] - value(up));
          v += inv_h2 * a_minus[static_cast<std::size_t>(a)][idx] * (u[idx] - value(dn));
        } else {
          // Co-normal zero flux: boundary faces carry no flux at all.
          if (up >= 0)
            v += inv_h2 * a_plus[static_cast<std::size_t>(a)][idx] * (u[idx] - value(up));
          if (dn >= 0)
            v += inv_h2 * a_minus[static_cast<std::size_t>(a)][idx] * (u[idx] - value(dn));
        }
      }
      for (const auto& ce : cross) {
        // -(d_a A_ab d_b u) with centered differences; the zero-extended u
        // makes boundary-adjacent stencils consistent with u = 0 on faces.
        auto g_at = [&](int step_a) -> double {
          const long long base = neighbor(idx, at, ce.a, step_a);
          if (base < 0) return 0.0;  // node on the boundary: u vanishes on that face
          std::vector<int> shifted = at;
          shifted[static_cast<std::size_t>(ce.a)] += step_a;
          const long long upb = neighbor(static_cast<std::size_t>(base), shifted, ce.b, +1);
          const long long dnb = neighbor(static_cast<std::size_t>(base), shifted, ce.b, -1);
          return ce.values[static_cast<std::size_t>(base)] * (value(upb) - value(dnb));
        };
        v -= (g_at(+1) - g_at(-1)) * inv_h2 * 0.25;
      }
      out[idx] = v;
    }
  };

  std::vector<double> diag(gi.size);
  {
    std::vector<int> at(static_cast<std::size_t>(d));
    for (std::size_t idx = 0; idx < gi.size; ++idx) {
      gi.decode(idx, at);
      double v = cvals[idx];
      for (int a = 0; a < d; ++a) {
        if (dirichlet) {
          v += inv_h2 * (a_plus[static_cast<std::size_t>(a)][idx] +
                         a_minus[static_cast<std::size_t>(a)][idx]);
        } else {
          if (at[static_cast<std::size_t>(a)] + 1 < per_axis)
            v += inv_h2 * a_plus[static_cast<std::size_t>(a)][idx];
          if (at[static_cast<std::size_t>(a)] > 0)
            v += inv_h2 * a_minus[static_cast<std::size_t>(a)][idx];
        }
      }
      diag[idx] = v;
    }
  }

  std::vector<double> rhs = eval_on_grid(p.f, gi, node);
  OracleSolution sol;
  sol.kind = OracleSolution::Kind::FiniteDifference;
  sol.shape.assign(static_cast<std::size_t>(d), per_axis);
  sol.spacing = h;
  sol.cell_centered = !dirichlet;
  sol.accuracy_estimate = h * h;
  conjugate_gradients(apply, diag, rhs, sol.grid, 1e-11, 200000);
  return sol;
}

std::vector<double> fd_axis(const OracleSolution& fd) {
  std::vector<double> x(static_cast<std::size_t>(fd.shape[0]));
  for (std::size_t i = 0; i < x.size(); ++i)
    x[i] = fd.cell_centered ? fd.spacing * (static_cast<double>(i) + 0.5)
                            : fd.spacing * (static_cast<double>(i) + 1.0);
  return x;
}

double fd_relative_l2(const OracleSolution& fd, const TrigExpansion& u) {
  GridIndexer gi(fd.shape);
  std::vector<int> coord(fd.shape.size());
  std::vector<double> x(fd.shape.size());
  double num = 0.0, den = 0.0;
  for (std::size_t idx = 0; idx < gi.size; ++idx) {
    gi.decode(idx, coord);
    for (std::size_t a = 0; a < x.size(); ++a)
      x[a] = fd.cell_centered ? fd.spacing * (coord[a] + 0.5) : fd.spacing * (coord[a] + 1.0);
    const double diff = fd.grid[idx] - eval(u, x);
    num += diff * diff;
    den += fd.grid[idx] * fd.grid[idx];
  }
  return den == 0.0 ? std::sqrt(num) : std::sqrt(num / den);
}

PoincareResult poincare_check(int dim, int n) {
  if (dim > 3) throw PreconditionError("poincare_check: supported for d <= 3");
  const double h = 1.0 / n;
  const double inv_h2 = 1.0 / (h * h);
  const int per_axis = n - 1;
  GridIndexer gi(std::vector<int>(static_cast<std::size_t>(dim), per_axis));

  ApplyFn laplace = [&](const std::vector<double>& u, std::vector<double>& out) {
    std::vector<int> at(static_cast<std::size_t>(dim));
    for (std::size_t idx = 0; idx < gi.size; ++idx) {
      gi.decode(idx, at);
      double v = 0.0;
      for (int a = 0; a < dim; ++a) {
        const std::size_t stride = gi.strides[static_cast<std::size_t>(a)];
        const int pos = at[static_cast<std::size_t>(a)];
        const double up = pos + 1 < per_axis ? u[idx + stride] : 0.0;
        const double dn = pos > 0 ? u[idx - stride] : 0.0;
        v += inv_h2 * (2.0 * u[idx] - up - dn);
      }
      out[idx] = v;
    }
  };
  std::vector<double> diag(gi.size, 2.0 * dim * inv_h2);

  // Inverse power iteration on the discrete Dirichlet Laplacian.
  std::vector<double> v(gi.size, 1.0), w;
  double lambda = 0.0, lambda_prev = -1.0;
  bool converged = false;
  PoincareResult result;
  for (int it = 1; it <= 200; ++it) {
    conjugate_gradients(laplace, diag, v, w, 1e-12, 200000);
    double wnorm = 0.0;
    for (double x : w) wnorm += x * x;
    wnorm = std::sqrt(wnorm);
    if (wnorm == 0.0) throw SolverError("poincare_check: power iteration collapsed");
    const double wv = std::inner_product(w.begin(), w.end(), v.begin(), 0.0);
    lambda = wv / (wnorm * wnorm);  // Rayleigh quotient of w under L
    for (std::size_t i = 0; i < w.size(); ++i) v[i] = w[i] / wnorm;
    result.iterations = it;
    if (lambda_prev > 0.0 && std::abs(lambda - lambda_prev) <= 1e-13 * lambda) {
      converged = true;
      break;
    }
    lambda_prev = lambda;
  }
  if (!converged) throw SolverError("poincare_check: power iteration stagnated");
  result.eigenvalue = lambda;
  result.constant = 1.0 / std::sqrt(lambda);

  // Correlation against the first sine mode on the grid.
  std::vector<int> at(static_cast<std::size_t>(dim));
  double dot = 0.0, snorm = 0.0;
  for (std::size_t idx = 0; idx < gi.size; ++idx) {
    gi.decode(idx, at);
    double s = 1.0;
    for (int a = 0; a < dim; ++a)
      s *= std::sin(M_PI * h * (at[static_cast<std::size_t>(a)] + 1));
    dot += s * v[idx];
    snorm += s * s;
  }
  result.mode_correlation = std::abs(dot) / std::sqrt(snorm);  // v is unit
  return result;
}

}  // namespace barron
