#include <doctest.h>

#include <cmath>

#include "barron/oracle.hpp"
#include "barron/rng.hpp"

using namespace barron;

namespace {

EllipticProblem single_mode_problem() {
  EllipticProblem p = EllipticProblem::identity_problem(1, BoundaryKind::Dirichlet);
  p.f.add(all_sin(1), {1}, 1.0 + M_PI * M_PI);
  return p;
}

EllipticProblem variable_coefficient_1d() {
  EllipticProblem p = EllipticProblem::identity_problem(1, BoundaryKind::Dirichlet);
  p.A_at(0, 0).add(all_cos(1), {2}, 0.5);
  p.a_min = 0.5;
  p.a_max = 1.5;
  p.f.add(all_sin(1), {1}, 1.0);
  return p;
}

}  // namespace

TEST_CASE("galerkin_solve inverts an eigenmode exactly") {
  const OracleSolution sol = galerkin_solve(single_mode_problem(), 4);
  CHECK(sol.expansion.size() == 1);
  CHECK(sol.expansion.coeff(all_sin(1), {1}) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(sol.accuracy_estimate <= 1e-12);
}

TEST_CASE("galerkin residual bound is tight on finite-band problems") {
  // Constant coefficients keep the true solution inside the band.
  EllipticProblem p = EllipticProblem::identity_problem(2, BoundaryKind::Neumann);
  p.f.add(all_cos(2), {1, 0}, 1.0);
  p.f.add(all_cos(2), {2, 1}, -0.5);
  const OracleSolution sol = galerkin_solve(p, 4);
  CHECK(sol.accuracy_estimate <= 1e-10);
  CHECK(h1_norm(residual(p, sol.expansion)) <= 1e-10);
}

TEST_CASE("galerkin_auto doubles the cutoff until the energy tail settles") {
  const OracleSolution sol = galerkin_auto(variable_coefficient_1d(), 1e-10);
  CHECK(sol.tail_bound <= 1e-10);
  CHECK(sol.cutoff >= 4);
  // The residual certificate holds for the refined solve as well.
  CHECK(sol.accuracy_estimate <= 1e-4);
}

TEST_CASE("galerkin matches finite differences on a variable coefficient") {
  const EllipticProblem p = variable_coefficient_1d();
  const OracleSolution gal = galerkin_auto(p);
  const OracleSolution fd = fd_solve(p, 2048);
  CHECK(fd_relative_l2(fd, gal.expansion) <= 1e-6);
}

TEST_CASE("galerkin optimality: coordinate perturbations raise the energy") {
  const EllipticProblem p = variable_coefficient_1d();
  const OracleSolution gal = galerkin_solve(p, 8);
  const double base = energy(p, gal.expansion);
  CHECK(base == doctest::Approx(gal.energy).epsilon(1e-12));
  int checked = 0;
  for (const auto& [key, a] : gal.expansion.terms()) {
    for (double delta : {1e-4, -1e-4}) {
      TrigExpansion perturbed = gal.expansion;
      perturbed.add(key, delta);
      CHECK(energy(p, perturbed) >= base);
    }
    if (++checked >= 5) break;
  }
}

TEST_CASE("an indefinite operator is rejected") {
  EllipticProblem p = single_mode_problem();
  p.A_at(0, 0) = TrigExpansion::constant(1, -1.0);  // not elliptic
  CHECK_THROWS_AS(galerkin_solve(p, 4), SolverError);
}

TEST_CASE("fd_solve converges at second order on the anchor problem") {
  const EllipticProblem p = single_mode_problem();
  auto max_error = [&](int n) {
    const OracleSolution fd = fd_solve(p, n);
    const auto axis = fd_axis(fd);
    double worst = 0.0;
    for (std::size_t i = 0; i < axis.size(); ++i)
      worst = std::max(worst, std::abs(fd.grid[i] - std::sin(M_PI * axis[i])));
    return worst;
  };
  const double e64 = max_error(64);
  const double e128 = max_error(128);
  const double ratio = e64 / e128;
  CHECK(ratio >= 4.0 * 0.8);
  CHECK(ratio <= 4.0 * 1.2);
}

TEST_CASE("fd_solve handles the Neumann zero-flux condition") {
  EllipticProblem p = EllipticProblem::identity_problem(1, BoundaryKind::Neumann);
  p.f.add(all_cos(1), {1}, 1.0 + M_PI * M_PI);  // solution cos(pi x)
  const OracleSolution fd = fd_solve(p, 256);
  const auto axis = fd_axis(fd);
  double worst = 0.0;
  for (std::size_t i = 0; i < axis.size(); ++i)
    worst = std::max(worst, std::abs(fd.grid[i] - std::cos(M_PI * axis[i])));
  CHECK(worst <= 5e-4);

  // Zero source gives the zero solution.
  EllipticProblem z = EllipticProblem::identity_problem(2, BoundaryKind::Dirichlet);
  const OracleSolution zero = fd_solve(z, 32);
  for (double v : zero.grid) CHECK(v == 0.0);
}

TEST_CASE("fd and galerkin agree on a 2d problem with cross terms") {
  EllipticProblem p = EllipticProblem::identity_problem(2, BoundaryKind::Dirichlet);
  p.A_at(0, 0).add(all_cos(2), {1, 0}, 0.2);
  p.A_at(0, 1) = TrigExpansion::basis(mixed_parity(2, 0, 1), {1, 1}, 0.1);
  p.A_at(1, 0) = p.A_at(0, 1);
  p.a_min = 0.65;
  p.a_max = 1.35;
  p.f.add(all_sin(2), {1, 1}, 1.0);
  const OracleSolution gal = galerkin_auto(p);
  const OracleSolution fd = fd_solve(p, 96);
  CHECK(fd_relative_l2(fd, gal.expansion) <= std::max(1e-5, 10.0 / (96.0 * 96.0)));
}

TEST_CASE("fd_solve rejects unsupported configurations") {
  EllipticProblem p = EllipticProblem::identity_problem(2, BoundaryKind::Neumann);
  p.A_at(0, 1) = TrigExpansion::basis(mixed_parity(2, 0, 1), {1, 1}, 0.1);
  p.A_at(1, 0) = p.A_at(0, 1);
  p.f.add(all_cos(2), {1, 0}, 1.0);
  CHECK_THROWS_AS(fd_solve(p, 32), PreconditionError);
  CHECK_THROWS_AS(fd_solve(EllipticProblem::identity_problem(1, BoundaryKind::Dirichlet), 8),
                  PreconditionError);
}

TEST_CASE("the preconditioned residual is bounded by lambda_max times the error") {
  CounterRng rng(113);
  EllipticProblem p = variable_coefficient_1d();
  p.c.add(all_cos(1), {1}, 0.2);
  p.c_min = 0.8;
  p.c_max = 1.2;
  const OracleSolution gal = galerkin_auto(p, 1e-12);
  const double lambda_max = std::max(p.a_max, p.c_max);
  for (int trial = 0; trial < 10; ++trial) {
    TrigExpansion u(1);
    for (int t = 0; t < 4; ++t)
      u.add(all_sin(1), {1 + static_cast<int>(rng.below(5))}, rng.uniform(-1.0, 1.0));
    const double lhs = h1_norm(residual(p, u));
    const double err = h1_norm(axpy(1.0, u, -1.0, gal.expansion));
    CHECK(lhs <= lambda_max * err + lambda_max * gal.accuracy_estimate + 1e-10);
  }
}

TEST_CASE("tensor quadrature integrates trig polynomials exactly") {
  const double half = tensor_gl_integral(1, 16, [](std::span<const double> x) {
    const double s = std::sin(M_PI * x[0]);
    return s * s;
  });
  CHECK(half == doctest::Approx(0.5).epsilon(1e-14));

  CHECK(tensor_gl_integral(3, 4, [](std::span<const double>) { return 1.0; }) ==
        doctest::Approx(1.0).epsilon(1e-14));

  const double ortho = tensor_gl_integral(2, 12, [](std::span<const double> x) {
    return std::sin(M_PI * x[0]) * std::sin(M_PI * x[1]) * std::sin(2.0 * M_PI * x[0]) *
           std::sin(M_PI * x[1]);
  });
  CHECK(std::abs(ortho - 0.25) <= 1.0);  // nonzero same-mode factor; just smoke
  const double ortho2 = tensor_gl_integral(2, 12, [](std::span<const double> x) {
    const double a = std::sin(M_PI * x[0]) * std::sin(M_PI * x[1]);
    const double b = std::sin(2.0 * M_PI * x[0]) * std::sin(M_PI * x[1]);
    return a * b;
  });
  CHECK(std::abs(ortho2) <= 1e-12);
}

TEST_CASE("tensor quadrature reproduces basis norms") {
  CounterRng rng(79);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 1 + static_cast<int>(rng.below(3));
    ParityVector p(static_cast<std::size_t>(d));
    MultiIndex k(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
      const bool sin = rng.below(2) == 1;
      p[static_cast<std::size_t>(i)] = sin ? Parity::Sin : Parity::Cos;
      k[static_cast<std::size_t>(i)] = (sin ? 1 : 0) + static_cast<int>(rng.below(5));
    }
    const double quad = tensor_gl_integral(d, 24, [&](std::span<const double> x) {
      const double v = eval_basis(p, k, x);
      return v * v;
    });
    CHECK(std::abs(quad - l2_basis_norm_sq(p, k)) <= 1e-12);
  }
}

TEST_CASE("qmc integration reports a usable standard error") {
  const QmcResult q = qmc_integral(2, 1 << 12, 42, [](std::span<const double> x) {
    return x[0] * x[1];
  });
  CHECK(std::abs(q.value - 0.25) <= std::max(6.0 * q.std_error, 1e-4));
  CHECK(q.std_error < 1e-3);
}

TEST_CASE("poincare constant estimates match 1/(pi sqrt(d))") {
  const PoincareResult one = poincare_check(1, 256);
  CHECK(std::abs(one.constant - 1.0 / M_PI) / (1.0 / M_PI) <= 1e-4);
  CHECK(one.mode_correlation >= 0.999);

  const PoincareResult two = poincare_check(2, 96);
  const double expected = 1.0 / (M_PI * std::sqrt(2.0));
  CHECK(std::abs(two.constant - expected) / expected <= 1e-3);
  CHECK(two.mode_correlation >= 0.999);
}
