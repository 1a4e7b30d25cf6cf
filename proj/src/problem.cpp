#include "barron/problem.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "barron/rng.hpp"

namespace barron {

EllipticProblem EllipticProblem::identity_problem(int dim, BoundaryKind bc) {
  EllipticProblem p;
  p.dim = dim;
  p.bc = bc;
  p.A.assign(static_cast<std::size_t>(dim) * dim, TrigExpansion(dim));
  for (int i = 0; i < dim; ++i) p.A_at(i, i) = TrigExpansion::constant(dim, 1.0);
  p.c = TrigExpansion::constant(dim, 1.0);
  p.f = TrigExpansion::zero(dim);
  p.a_min = p.a_max = p.c_min = p.c_max = 1.0;
  return p;
}

namespace {

bool has_parity(const TrigExpansion& g, const ParityVector& want) {
  for (const auto& [key, a] : g.terms())
    if (key_parity(key) != want) return false;
  return true;
}

// Eigenvalues of a small symmetric matrix by cyclic Jacobi rotations.
std::vector<double> symmetric_eigenvalues(std::vector<double> m, int n) {
  auto at = [&](int r, int c) -> double& { return m[static_cast<std::size_t>(r * n + c)]; };
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (int r = 0; r < n; ++r)
      for (int c = r + 1; c < n; ++c) off += at(r, c) * at(r, c);
    if (off < 1e-28) break;
    for (int r = 0; r < n; ++r) {
      for (int c = r + 1; c < n; ++c) {
        if (std::abs(at(r, c)) < 1e-300) continue;
        const double theta = 0.5 * std::atan2(2.0 * at(r, c), at(c, c) - at(r, r));
        const double cs = std::cos(theta), sn = std::sin(theta);
        for (int k = 0; k < n; ++k) {
          const double mr = at(r, k), mc = at(c, k);
          at(r, k) = cs * mr - sn * mc;
          at(c, k) = sn * mr + cs * mc;
        }
        for (int k = 0; k < n; ++k) {
          const double mr = at(k, r), mc = at(k, c);
          at(k, r) = cs * mr - sn * mc;
          at(k, c) = sn * mr + cs * mc;
        }
      }
    }
  }
  std::vector<double> eig(n);
  for (int r = 0; r < n; ++r) eig[static_cast<std::size_t>(r)] = at(r, r);
  return eig;
}

}  // namespace

AuditReport validate(const EllipticProblem& p, int samples, std::uint64_t seed) {
  AuditReport report;
  report.samples = samples;
  const int d = p.dim;
  if (static_cast<int>(p.A.size()) != d * d)
    throw DimensionError("validate: A must hold d*d expansions");
  auto fail = [&](const std::string& msg) {
    report.passed = false;
    report.violations.push_back(msg);
  };

  // Family constraints, checked exactly on the stored terms.
  const ParityVector cosf = all_cos(d);
  const ParityVector sinf = all_sin(d);
  for (int i = 0; i < d; ++i) {
    const TrigExpansion& aii = p.A_at(i, i);
    const bool cos_ok = has_parity(aii, cosf);
    const bool sin_ok = has_parity(aii, sinf);
    if (p.bc == BoundaryKind::Dirichlet) {
      if (!cos_ok) fail("A[" + std::to_string(i + 1) + "][" + std::to_string(i + 1) +
                        "] must be a pure cosine expansion");
    } else {
      // The sine variant satisfies the zero-flux condition identically but
      // leaves the cosine class under the operator; both are admitted here
      // and the flow reports the parity failure for the sine variant.
      if (!cos_ok && !sin_ok)
        fail("A[" + std::to_string(i + 1) + "][" + std::to_string(i + 1) +
             "] must be a pure cosine or pure sine expansion");
    }
    for (int j = 0; j < d; ++j) {
      if (i == j) continue;
      const TrigExpansion& aij = p.A_at(i, j);
      if (!aij.empty() && !has_parity(aij, mixed_parity(d, i, j)))
        fail("A[" + std::to_string(i + 1) + "][" + std::to_string(j + 1) +
             "] must lie in the mixed family (sine factors at coordinates " +
             std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
      if (j > i && !(p.A_at(i, j) == p.A_at(j, i)))
        fail("A is not symmetric at entry (" + std::to_string(i + 1) + "," +
             std::to_string(j + 1) + ")");
    }
  }
  if (!has_parity(p.c, cosf)) fail("c must be a pure cosine expansion");
  const ParityVector fwant = p.bc == BoundaryKind::Dirichlet ? sinf : cosf;
  if (!has_parity(p.f, fwant))
    fail(p.bc == BoundaryKind::Dirichlet ? "f must be a pure sine expansion"
                                         : "f must be a pure cosine expansion");
  if (p.a_min <= 0.0 || p.c_min <= 0.0) fail("declared a_min and c_min must be positive");
  if (p.a_min > p.a_max || p.c_min > p.c_max) fail("declared bounds are inverted");

  // Sampled audit of the declared constants on the open cube.
  Halton halton(d);
  (void)seed;  // the Halton stream is deterministic; seed reserved for QMC variants
  report.eig_min = std::numeric_limits<double>::infinity();
  report.eig_max = -std::numeric_limits<double>::infinity();
  report.c_low = std::numeric_limits<double>::infinity();
  report.c_high = -std::numeric_limits<double>::infinity();
  double worst_margin = std::numeric_limits<double>::infinity();
  std::vector<double> amat(static_cast<std::size_t>(d) * d);
  for (int s = 1; s <= samples; ++s) {
    const std::vector<double> x = halton.point(static_cast<std::uint64_t>(s));
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        amat[static_cast<std::size_t>(i * d + j)] = eval(p.A_at(i, j), x);
    const std::vector<double> eig = symmetric_eigenvalues(amat, d);
    double lo = eig[0], hi = eig[0];
    for (double e : eig) {
      lo = std::min(lo, e);
      hi = std::max(hi, e);
    }
    const double cv = eval(p.c, x);
    report.eig_min = std::min(report.eig_min, lo);
    report.eig_max = std::max(report.eig_max, hi);
    report.c_low = std::min(report.c_low, cv);
    report.c_high = std::max(report.c_high, cv);
    const double margin =
        std::min(std::min(lo - p.a_min, p.a_max - hi), std::min(cv - p.c_min, p.c_max - cv));
    if (margin < worst_margin) {
      worst_margin = margin;
      report.worst_point = x;
    }
  }
  const double tol = 1e-12;
  auto point_str = [&]() {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < report.worst_point.size(); ++i)
      os << (i ? "," : "") << format_real(report.worst_point[i]);
    os << ")";
    return os.str();
  };
  if (report.eig_min < p.a_min - tol)
    fail("sampled eigenvalue " + format_real(report.eig_min) + " of A is below declared a_min " +
         format_real(p.a_min) + " near " + point_str());
  if (report.eig_max > p.a_max + tol)
    fail("sampled eigenvalue " + format_real(report.eig_max) + " of A exceeds declared a_max " +
         format_real(p.a_max) + " near " + point_str());
  if (report.c_low < p.c_min - tol)
    fail("sampled c " + format_real(report.c_low) + " is below declared c_min " +
         format_real(p.c_min) + " near " + point_str());
  if (report.c_high > p.c_max + tol)
    fail("sampled c " + format_real(report.c_high) + " exceeds declared c_max " +
         format_real(p.c_max) + " near " + point_str());
  return report;
}

void validate_or_throw(const EllipticProblem& p, int samples, std::uint64_t seed) {
  AuditReport report = validate(p, samples, seed);
  if (!report.passed) {
    std::string msg = "assumption audit failed:";
    for (const auto& v : report.violations) msg += "\n  - " + v;
    throw AssumptionError(msg);
  }
}

double relu_dictionary_factor(int dim) {
  const double d = static_cast<double>(dim);
  return 256.0 * d * d + 128.0 * d + 4.0;
}

namespace {

std::uint64_t saturating_ceil(double v) {
  if (!(v >= 0.0)) return 0;
  double c = std::ceil(v);
  if (c >= static_cast<double>(std::numeric_limits<std::uint64_t>::max()))
    return std::numeric_limits<std::uint64_t>::max();
  return static_cast<std::uint64_t>(c);
}

}  // namespace

std::pair<std::uint64_t, std::uint64_t> neuron_budget(const ConstantLedger& ledger, double eps) {
  if (!(eps > 0.0) || !(eps < 2.0 / ledger.lambda_min))
    throw PreconditionError("neuron_budget: eps must lie in (0, 2/lambda_min)");
  const double geo =
      ledger.T == 0
          ? 0.0
          : (std::pow(ledger.p_d, static_cast<double>(ledger.T)) - 1.0) / (ledger.p_d - 1.0);
  const double base = ledger.alpha_star * ledger.ell_f * geo / eps;
  const double cos_real = base * base;
  const double relu_real = relu_dictionary_factor(ledger.dim) * cos_real;
  return {saturating_ceil(cos_real), saturating_ceil(relu_real)};
}

ConstantLedger constants(const EllipticProblem& p, double eps) {
  ConstantLedger ledger;
  const int d = p.dim;
  ledger.dim = d;
  ledger.lambda_min = std::min(p.a_min, p.c_min);
  ledger.lambda_max = std::max(p.a_max, p.c_max);
  if (!(eps > 0.0) || !(eps < 2.0 / ledger.lambda_min))
    throw PreconditionError("constants: eps must lie in (0, 2/lambda_min)");
  ledger.eps = eps;
  ledger.alpha_star = ledger.lambda_min / (2.0 * ledger.lambda_max * ledger.lambda_max);
  ledger.beta_star = std::sqrt(1.0 - ledger.lambda_min * ledger.lambda_min /
                                         (4.0 * ledger.lambda_max * ledger.lambda_max));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      ledger.ell_A = std::max(ledger.ell_A, barron_norm(p.A_at(i, j), 1.0));
  ledger.ell_c = barron_norm(p.c, 2.0);
  ledger.ell_f = barron_norm(p.f, 0.0);
  ledger.p_d = (2.0 + M_PI) / (2.0 * M_PI) * ledger.alpha_star * ledger.ell_A *
                   static_cast<double>(d) * static_cast<double>(d) +
               ledger.alpha_star * ledger.ell_c + 1.0;
  ledger.f_l2 = l2_norm(p.f);
  // The Poincare improvement of the dual norm needs vanishing boundary
  // values; on H^1 (Neumann) only the plain L2 bound is available.
  ledger.f_hminus1_upper =
      p.bc == BoundaryKind::Dirichlet ? hminus1_upper(p.f) : ledger.f_l2;

  // T drives the a-priori flow error (||f||_{H^-1} / lambda_min) beta*^T
  // below eps/2; the H^-1 upper bound can only enlarge T.
  if (ledger.f_hminus1_upper == 0.0) {
    ledger.T = 0;  // f = 0: the zero iterate is exact
  } else {
    const double num = std::log(ledger.f_hminus1_upper) +
                       std::abs(std::log(eps * ledger.lambda_min / 2.0));
    const double den = std::abs(std::log(ledger.beta_star));
    ledger.T = std::max<long long>(0, static_cast<long long>(std::ceil(num / den)));
  }

  // Neuron budgets per the two network families.
  const double geo = ledger.T == 0
                         ? 0.0
                         : (std::pow(ledger.p_d, static_cast<double>(ledger.T)) - 1.0) /
                               (ledger.p_d - 1.0);
  const double base = ledger.alpha_star * ledger.ell_f * geo / eps;
  ledger.budget_cos_real = base * base;
  ledger.budget_relu_real = relu_dictionary_factor(d) * ledger.budget_cos_real;
  std::tie(ledger.neuron_budget_cos, ledger.neuron_budget_relu) = neuron_budget(ledger, eps);
  return ledger;
}

TrigExpansion apply_operator(const EllipticProblem& p, const TrigExpansion& u,
                             double parity_tol_rel) {
  if (u.dim() != p.dim) throw DimensionError("apply_operator: dimension mismatch");
  const int d = p.dim;
  const ParityVector want = admissible_parity(d, p.bc);
  if (!has_parity(u, want))
    throw ParityError("apply_operator: u is not in the admissible family");

  // L u = -sum_ij (d_i A_ij)(d_j u) - sum_ij A_ij d_ij u + c u.
  TrigExpansion lu = multiply(p.c, u);
  std::vector<TrigExpansion> du;
  du.reserve(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) du.push_back(derivative(u, j));
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const TrigExpansion& aij = p.A_at(i, j);
      if (aij.empty()) continue;
      lu = axpy(1.0, lu, -1.0, multiply(derivative(aij, i), du[static_cast<std::size_t>(j)]));
      lu = axpy(1.0, lu, -1.0, multiply(aij, derivative(du[static_cast<std::size_t>(j)], i)));
    }
  }

  // The coefficient families are arranged so that L preserves the
  // admissible class; anything else is either cancellation dust or a
  // genuine assumption failure.
  const double tol = parity_tol_rel * lu.max_abs_coeff();
  TrigExpansion out(d);
  for (const auto& [key, a] : lu.terms()) {
    if (key_parity(key) == want) {
      out.add(key, a);
    } else if (std::abs(a) > tol) {
      throw ParityError(
          "apply_operator: operator output left the admissible family "
          "(coefficient " +
          format_real(a) + " on parity " + parity_string(key_parity(key)) + ")");
    }
  }
  return out;
}

TrigExpansion residual(const EllipticProblem& p, const TrigExpansion& u) {
  return inv_shifted_laplacian(axpy(1.0, apply_operator(p, u), -1.0, p.f), p.bc);
}

double energy_given_lu(const EllipticProblem& p, const TrigExpansion& u, const TrigExpansion& lu) {
  // For admissible u the boundary flux vanishes, so
  // int grad u . A grad u + c u^2 = int u (L u), and both u and L u live in
  // one orthogonal family.
  return 0.5 * inner_l2(u, lu) - inner_l2(p.f, u);
}

double energy(const EllipticProblem& p, const TrigExpansion& u) {
  return energy_given_lu(p, u, apply_operator(p, u));
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

EllipticProblem parse_problem(std::istream& is, const std::string& origin) {
  int d = -1;
  BoundaryKind bc = BoundaryKind::Dirichlet;
  bool have_bc = false;
  double a_min = 1.0, a_max = 1.0, c_min = 1.0, c_max = 1.0;
  bool have_c = false, have_f = false;
  std::vector<std::pair<std::pair<int, int>, std::vector<std::string>>> a_sections;
  std::vector<std::string> c_lines, f_lines;

  std::string section;
  std::vector<std::string>* target = nullptr;
  std::string line;
  int lineno = 0;
  auto err = [&](const std::string& msg) {
    throw IoError(origin + ":" + std::to_string(lineno) + ": " + msg);
  };
  std::vector<std::pair<std::string, std::string>> meta;
  bool in_meta = false;

  while (std::getline(is, line)) {
    ++lineno;
    auto pos = line.find('#');
    if (pos != std::string::npos) line.erase(pos);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') err("unterminated section header");
      section = line.substr(1, line.size() - 2);
      in_meta = false;
      target = nullptr;
      if (section == "meta") {
        in_meta = true;
      } else if (section == "c") {
        have_c = true;
        target = &c_lines;
      } else if (section == "f") {
        have_f = true;
        target = &f_lines;
      } else if (section.rfind("A.", 0) == 0) {
        const auto dot = section.find('.', 2);
        if (dot == std::string::npos) err("expected [A.i.j]");
        int i = 0, j = 0;
        try {
          i = std::stoi(section.substr(2, dot - 2));
          j = std::stoi(section.substr(dot + 1));
        } catch (const std::exception&) {
          err("bad [A.i.j] header");
        }
        a_sections.push_back({{i, j}, {}});
        target = &a_sections.back().second;
      } else {
        err("unknown section [" + section + "]");
      }
      continue;
    }
    if (in_meta) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) err("expected key = value in [meta]");
      meta.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } else if (target) {
      target->push_back(line);
    } else {
      err("term line outside any section");
    }
  }

  for (const auto& [key, value] : meta) {
    try {
      if (key == "d") {
        d = std::stoi(value);
      } else if (key == "bc") {
        if (value == "dirichlet")
          bc = BoundaryKind::Dirichlet;
        else if (value == "neumann")
          bc = BoundaryKind::Neumann;
        else
          throw IoError(origin + ": bc must be 'dirichlet' or 'neumann'");
        have_bc = true;
      } else if (key == "a_min") {
        a_min = std::stod(value);
      } else if (key == "a_max") {
        a_max = std::stod(value);
      } else if (key == "c_min") {
        c_min = std::stod(value);
      } else if (key == "c_max") {
        c_max = std::stod(value);
      } else {
        throw IoError(origin + ": unknown meta key '" + key + "'");
      }
    } catch (const IoError&) {
      throw;
    } catch (const std::exception&) {
      throw IoError(origin + ": bad value for meta key '" + key + "'");
    }
  }
  if (d < 1) throw IoError(origin + ": [meta] must set d >= 1");
  if (!have_bc) throw IoError(origin + ": [meta] must set bc");

  EllipticProblem p = EllipticProblem::identity_problem(d, bc);
  p.a_min = a_min;
  p.a_max = a_max;
  p.c_min = c_min;
  p.c_max = c_max;
  if (have_c) p.c = TrigExpansion::zero(d);
  if (have_f) p.f = TrigExpansion::zero(d);
  for (const auto& l : c_lines) add_term_from_line(p.c, l);
  for (const auto& l : f_lines) add_term_from_line(p.f, l);
  for (const auto& [ij, lines] : a_sections) {
    const int i = ij.first, j = ij.second;
    if (i < 1 || i > d || j < 1 || j > d)
      throw IoError(origin + ": [A." + std::to_string(i) + "." + std::to_string(j) +
                    "] out of range");
    TrigExpansion entry(d);
    for (const auto& l : lines) add_term_from_line(entry, l);
    p.A_at(i - 1, j - 1) = entry;
    if (i != j) p.A_at(j - 1, i - 1) = entry;  // symmetric fill; a later twin section wins
  }
  return p;
}

EllipticProblem load_problem(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open problem file '" + path + "'");
  return parse_problem(is, path);
}

void write_problem(std::ostream& os, const EllipticProblem& p) {
  os << "[meta]\n";
  os << "d = " << p.dim << "\n";
  os << "bc = " << (p.bc == BoundaryKind::Dirichlet ? "dirichlet" : "neumann") << "\n";
  os << "a_min = " << format_real(p.a_min) << "\n";
  os << "a_max = " << format_real(p.a_max) << "\n";
  os << "c_min = " << format_real(p.c_min) << "\n";
  os << "c_max = " << format_real(p.c_max) << "\n";
  for (int i = 0; i < p.dim; ++i) {
    for (int j = i; j < p.dim; ++j) {
      const TrigExpansion& e = p.A_at(i, j);
      const bool default_diag =
          i == j && e == TrigExpansion::constant(p.dim, 1.0);
      if (e.empty() || default_diag) continue;
      os << "[A." << (i + 1) << "." << (j + 1) << "]\n";
      write_expansion(os, e);
    }
  }
  os << "[c]\n";
  write_expansion(os, p.c);
  os << "[f]\n";
  write_expansion(os, p.f);
}

}  // namespace barron
