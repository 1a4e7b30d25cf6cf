// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Every tolerance is pinned here; nothing is deferred to configuration.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "barron/flow.hpp"
#include "barron/network.hpp"
#include "barron/oracle.hpp"
#include "barron/quadrature.hpp"
#include "barron/rng.hpp"

using namespace barron;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

// ---- shared random problem set for criteria 3 and 4 ----

EllipticProblem random_problem(int d, BoundaryKind bc, std::uint64_t seed) {
  CounterRng rng(seed);
  EllipticProblem p = EllipticProblem::identity_problem(d, bc);
  double spread = 0.0;
  for (int i = 0; i < d; ++i) {
    MultiIndex k(static_cast<std::size_t>(d), 0);
    k[static_cast<std::size_t>(i)] = 1 + static_cast<int>(rng.below(d >= 3 ? 1 : 2));
    const double eta = rng.uniform(-0.10, 0.10);
    p.A_at(i, i).add(all_cos(d), k, eta);
    spread = std::max(spread, std::abs(eta));
  }
  if (d >= 2 && rng.below(2) == 0) {
    const double eta = rng.uniform(-0.08, 0.08);
    p.A_at(0, 1) =
        TrigExpansion::basis(mixed_parity(d, 0, 1), MultiIndex(static_cast<std::size_t>(d), 1), eta);
    p.A_at(1, 0) = p.A_at(0, 1);
    spread += std::abs(eta);
  }
  p.a_min = 1.0 - spread - 1e-9;
  p.a_max = 1.0 + spread + 1e-9;
  const double etac = rng.uniform(-0.15, 0.15);
  MultiIndex kc(static_cast<std::size_t>(d), 0);
  kc[0] = 1;
  p.c.add(all_cos(d), kc, etac);
  p.c_min = 1.0 - std::abs(etac) - 1e-9;
  p.c_max = 1.0 + std::abs(etac) + 1e-9;
  const ParityVector fparity = admissible_parity(d, bc);
  for (int t = 0; t < 2; ++t) {
    MultiIndex kf(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i)
      kf[static_cast<std::size_t>(i)] =
          (bc == BoundaryKind::Dirichlet ? 1 : 0) + static_cast<int>(rng.below(2));
    if (index_norm_sq(kf) == 0.0) kf[0] = 1;
    p.f.add(fparity, kf, (rng.below(2) ? 1.0 : -1.0) * rng.uniform(0.3, 1.0));
  }
  if (p.f.empty()) p.f.add(fparity, MultiIndex(static_cast<std::size_t>(d), 1), 1.0);
  return p;
}

struct SolvedProblem {
  EllipticProblem problem;
  ConstantLedger ledger;
  FlowTrace trace;
  OracleSolution oracle;
  bool oracle_ready = false;
};

std::vector<SolvedProblem>& shared_problems() {
  static std::vector<SolvedProblem> set;
  if (!set.empty()) return set;
  const double eps = 1e-3;
  std::uint64_t seed = 1;
  for (BoundaryKind bc : {BoundaryKind::Dirichlet, BoundaryKind::Neumann}) {
    const int per_dim[] = {7, 7, 6};  // twenty per boundary kind
    for (int d = 1; d <= 3; ++d) {
      for (int i = 0; i < per_dim[d - 1]; ++i) {
        SolvedProblem entry;
        entry.problem = random_problem(d, bc, seed++);
        validate_or_throw(entry.problem, 2000, 0);
        entry.ledger = constants(entry.problem, eps);
        FlowOptions options;
        options.early_stop = false;  // run the full planned iteration budget
        entry.trace = solve(entry.problem, entry.ledger, options);
        set.push_back(std::move(entry));
      }
    }
  }
  return set;
}

void ensure_oracles(std::vector<SolvedProblem>& set) {
  for (auto& entry : set) {
    if (entry.oracle_ready) continue;
    entry.oracle = galerkin_auto(entry.problem, 1e-12);
    attach_reference(entry.trace, entry.oracle.expansion);
    entry.oracle_ready = true;
  }
}

// ---- criteria ----

Outcome criterion_spectral_inverse() {
  Outcome out;
  CounterRng rng(101);
  double worst = 0.0;
  int trials = 0;
  while (trials < 200) {
    CounterRng tr = rng.child(static_cast<std::uint64_t>(trials));
    const int dims[] = {1, 2, 3, 5};
    const int d = dims[tr.below(4)];
    const BoundaryKind bc = tr.below(2) ? BoundaryKind::Neumann : BoundaryKind::Dirichlet;
    MultiIndex k(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i)
      k[static_cast<std::size_t>(i)] =
          (bc == BoundaryKind::Dirichlet ? 1 : 0) + static_cast<int>(tr.below(12));
    if (bc == BoundaryKind::Neumann && index_norm_sq(k) == 0.0) k[0] = 1;
    double coeff = tr.uniform(-4.0, 4.0);
    if (coeff == 0.0) coeff = 1.0;
    const TrigExpansion g = TrigExpansion::basis(admissible_parity(d, bc), k, coeff);
    const TrigExpansion inv = inv_shifted_laplacian(g, bc);
    const double expected = coeff / (1.0 + M_PI * M_PI * index_norm_sq(k));
    const double got = inv.terms().begin()->second;
    worst = std::max(worst, std::abs(got - expected) / std::abs(expected));
    ++trials;
  }
  out.pass = worst <= 1e-14;
  out.detail = "max relative deviation " + fmt(worst) + " over 200 admissible modes (limit 1e-14)";
  return out;
}

Outcome criterion_flow_anchor() {
  Outcome out;
  EllipticProblem p = EllipticProblem::identity_problem(1, BoundaryKind::Dirichlet);
  p.f.add(all_sin(1), {1}, 1.0 + M_PI * M_PI);
  const ConstantLedger ledger = constants(p, 1e-3);
  FlowOptions options;
  options.early_stop = false;
  options.max_steps = 40;
  FlowTrace trace = solve(p, ledger, options);
  const TrigExpansion exact = TrigExpansion::basis(all_sin(1), {1});
  attach_reference(trace, exact);
  double worst_coeff = 0.0;
  for (long long t = 0; t <= trace.steps(); ++t) {
    const double expected = 1.0 - std::pow(2.0, -static_cast<double>(t));
    const double got = trace.iterates[static_cast<std::size_t>(t)].coeff(all_sin(1), {1});
    worst_coeff = std::max(worst_coeff, std::abs(got - expected));
  }
  // The exact per-step ratio is 1/2; the measured one carries coefficient
  // noise of a few ulps amplified by 1/err_t, so the tolerance scales
  // accordingly (err_40 ~ 2^-40 meets 1e-16-level coefficient noise).
  double worst_ratio_dev = 0.0;
  bool ratios_ok = true;
  for (std::size_t t = 0; t + 1 < trace.h1_errors.size(); ++t) {
    const double ratio = trace.h1_errors[t + 1] / trace.h1_errors[t];
    const double dev = std::abs(ratio - 0.5);
    worst_ratio_dev = std::max(worst_ratio_dev, dev);
    if (dev > 1e-10 + 4e-15 / trace.h1_errors[t + 1]) ratios_ok = false;
    if (ratio > ledger.beta_star) ratios_ok = false;
  }
  out.pass = worst_coeff <= 1e-12 && ratios_ok;
  out.detail = "coefficient deviation " + fmt(worst_coeff) + " (limit 1e-12), ratio 0.5 +/- " +
               fmt(worst_ratio_dev) + " (fp-noise scaled) <= beta* " + fmt(ledger.beta_star);
  return out;
}

Outcome criterion_recursion() {
  Outcome out;
  auto& set = shared_problems();
  double worst_ratio = 0.0;
  long long worst_T = 0;
  for (const auto& entry : set) {
    const RecursionReport report = check_recursion(entry.trace, entry.ledger);
    if (!report.holds) out.pass = false;
    worst_ratio = std::max(worst_ratio, report.max_ratio);
    worst_T = std::max(worst_T, entry.trace.steps());
  }

  // Growth audit of the recursion constant: on the canonical unit problem
  // (A = I, c = 1, lowest mode source) the affine part of p(d) scales
  // exactly with d^2.
  double base_rate = 0.0;
  bool growth_ok = true;
  for (int d = 1; d <= 5; ++d) {
    EllipticProblem p = EllipticProblem::identity_problem(d, BoundaryKind::Dirichlet);
    p.f.add(all_sin(d), MultiIndex(static_cast<std::size_t>(d), 1), 1.0);
    const ConstantLedger ledger = constants(p, 1e-3);
    const double rate =
        (ledger.p_d - ledger.alpha_star * ledger.ell_c - 1.0) / (static_cast<double>(d) * d);
    if (d == 1)
      base_rate = rate;
    else if (std::abs(rate - base_rate) > 1e-12 * base_rate)
      growth_ok = false;
  }
  if (!growth_ok) out.pass = false;

  out.detail = std::to_string(set.size()) + " problems (20 per boundary kind, d in {1,2,3}), " +
               "max lhs/rhs " + fmt(worst_ratio) + ", longest run " + std::to_string(worst_T) +
               " steps; (p(d)-p0)/d^2 constant at " + fmt(base_rate) + " for d<=5: " +
               (growth_ok ? "yes" : "NO");
  return out;
}

Outcome criterion_oracle_convergence() {
  Outcome out;
  auto& set = shared_problems();
  ensure_oracles(set);
  const double eps = 1e-3;
  double worst_final = 0.0, worst_excess = -1e300;
  for (auto& entry : set) {
    const double final_err = entry.trace.h1_errors.back();
    worst_final = std::max(worst_final, final_err);
    if (final_err > eps) out.pass = false;
    const double amplitude = entry.ledger.f_hminus1_upper / entry.ledger.lambda_min;
    double bound = amplitude;
    for (std::size_t t = 0; t < entry.trace.h1_errors.size(); ++t) {
      if (t > 0) bound *= entry.ledger.beta_star;
      const double excess = entry.trace.h1_errors[t] - (bound + 1e-8);
      worst_excess = std::max(worst_excess, excess);
      if (excess > 0.0) out.pass = false;
    }
  }
  out.detail = "max ||u_T - oracle||_H1 " + fmt(worst_final) + " (limit 1e-3), worst chain excess " +
               fmt(worst_excess) + " (limit 0 at slack 1e-8)";
  return out;
}

Outcome criterion_product_estimate() {
  Outcome out;
  CounterRng rng(103);
  double worst_ratio = 0.0, worst_dev = 0.0;
  for (int pair = 0; pair < 100; ++pair) {
    CounterRng tr = rng.child(static_cast<std::uint64_t>(pair));
    const int d = 1 + static_cast<int>(tr.below(3));
    const bool sine_left = tr.below(2) == 0;
    const ParityVector left = sine_left ? all_sin(d) : all_cos(d);
    TrigExpansion g(d), h(d);
    for (int t = 0; t < 6; ++t) {
      MultiIndex kg(static_cast<std::size_t>(d)), kh(static_cast<std::size_t>(d));
      for (int i = 0; i < d; ++i) {
        kg[static_cast<std::size_t>(i)] = (sine_left ? 1 : 0) + static_cast<int>(tr.below(4));
        kh[static_cast<std::size_t>(i)] = static_cast<int>(tr.below(4));
      }
      g.add(left, kg, tr.uniform(-1.0, 1.0));
      h.add(all_cos(d), kh, tr.uniform(-1.0, 1.0));
    }
    if (g.empty() || h.empty()) continue;
    const TrigExpansion gh = multiply(g, h);
    for (double n : {0.0, 1.0, 2.0}) {
      const double rhs = barron_norm(g, n) * barron_norm(h, n);
      if (rhs > 0.0) worst_ratio = std::max(worst_ratio, barron_norm(gh, n) / rhs);
    }
    std::vector<double> x(static_cast<std::size_t>(d));
    for (int s = 0; s < 100; ++s) {
      for (auto& xi : x) xi = tr.uniform();
      worst_dev = std::max(worst_dev, std::abs(eval(gh, x) - eval(g, x) * eval(h, x)));
    }
  }
  out.pass = worst_ratio <= 1.0 + 1e-12 && worst_dev <= 1e-10;
  out.detail = "max norm ratio " + fmt(worst_ratio) + " (limit 1), max pointwise deviation " +
               fmt(worst_dev) + " (limit 1e-10)";
  return out;
}

double regression_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (x[i] - mx) * (y[i] - my);
    den += (x[i] - mx) * (x[i] - mx);
  }
  return num / den;
}

std::vector<TrigExpansion> cosine_fixtures() {
  std::vector<TrigExpansion> fixtures;
  {
    TrigExpansion g(1);
    g.add(all_sin(1), {1}, 2.0);
    g.add(all_sin(1), {3}, 1.0);
    fixtures.push_back(g);
  }
  {
    TrigExpansion g(1);
    g.add(all_sin(1), {1}, 1.0);
    g.add(all_sin(1), {2}, 1.0);
    g.add(all_sin(1), {3}, -0.7);
    fixtures.push_back(g);
  }
  {
    TrigExpansion g(2);
    g.add(all_sin(2), {1, 1}, 1.0);
    g.add(all_sin(2), {2, 1}, 0.5);
    fixtures.push_back(g);
  }
  {
    TrigExpansion g(2);
    g.add(all_cos(2), {0, 0}, 0.25);
    g.add(all_cos(2), {1, 0}, 1.0);
    g.add(all_cos(2), {1, 1}, 0.5);
    fixtures.push_back(g);
  }
  {
    TrigExpansion g(3);
    g.add(all_sin(3), {1, 1, 1}, 1.0);
    g.add(all_sin(3), {2, 1, 1}, 0.3);
    fixtures.push_back(g);
  }
  return fixtures;
}

Outcome criterion_cosine_rate() {
  Outcome out;
  const int seeds = 200;
  const double cushion = 1.0 + 3.0 / std::sqrt(static_cast<double>(seeds));
  double worst_bound_ratio = 0.0, worst_slope_dev = 0.0;
  int fixture_id = 0;
  for (const TrigExpansion& g : cosine_fixtures()) {
    const SamplingMeasure mu = build_measure(g);
    const double bound_sq = e_norm_upper(g, 2.0) * e_norm_upper(g, 2.0);
    std::vector<double> log_k, log_err;
    for (int k : {4, 16, 64, 256}) {
      double mean_sq = 0.0, mean = 0.0;
      CounterRng rng(500 + static_cast<std::uint64_t>(fixture_id));
      for (int s = 0; s < seeds; ++s) {
        const TwoLayerNet net =
            sample_cosine_net(mu, k, rng.child(static_cast<std::uint64_t>(s)).seed());
        const double err = h1_net_error(net, g);
        mean_sq += err * err;
        mean += err;
      }
      mean_sq /= seeds;
      mean /= seeds;
      worst_bound_ratio = std::max(worst_bound_ratio, mean_sq / (cushion * bound_sq / k));
      log_k.push_back(std::log(static_cast<double>(k)));
      log_err.push_back(std::log(mean));
    }
    const double slope = regression_slope(log_k, log_err);
    worst_slope_dev = std::max(worst_slope_dev, std::abs(slope + 0.5));
    ++fixture_id;
  }
  out.pass = worst_bound_ratio <= 1.0 && worst_slope_dev <= 0.1;
  out.detail = "5 fixtures, 200 seeds: worst meanSq/bound " + fmt(worst_bound_ratio) +
               " (limit 1), worst |slope+0.5| " + fmt(worst_slope_dev) + " (limit 0.1)";
  return out;
}

Outcome criterion_relu_interpolation() {
  Outcome out;
  const RidgeProfile profile{M_PI, -M_PI_2, 1.0};  // sin(pi z) on [-1, 1]
  double previous = -1.0;
  double worst_bound_ratio = 0.0, worst_ratio_dev = 0.0;
  bool boxes_ok = true;
  for (int m : {4, 8, 16, 32}) {
    const ReluInterp interp = relu_interp_1d(profile, m, 1);
    for (const auto& piece : interp.pieces) {
      if (std::abs(piece.a) > 4.0 * interp.bound / m) boxes_ok = false;
      if (std::abs(piece.b) > 1.0) boxes_ok = false;
    }
    if (std::abs(interp.constant) > interp.bound) boxes_ok = false;
    std::vector<double> cuts;
    for (const auto& piece : interp.pieces) cuts.push_back(-piece.b * piece.eps);
    const double err_sq = composite_gl_integral_1d(-1.0, 1.0, cuts, 16, [&](double z) {
      const double dv = interp.value(z) - std::sin(M_PI * z);
      const double dd = interp.derivative(z) - M_PI * std::cos(M_PI * z);
      return dv * dv + dd * dd;
    });
    const double err = std::sqrt(err_sq);
    worst_bound_ratio = std::max(worst_bound_ratio, err / (std::sqrt(10.0) * M_PI * M_PI / m));
    if (previous > 0.0)
      worst_ratio_dev = std::max(worst_ratio_dev, std::abs(previous / err - 2.0));
    previous = err;
  }
  out.pass = worst_bound_ratio <= 1.0 && worst_ratio_dev <= 0.3 && boxes_ok;
  out.detail = "worst err/bound " + fmt(worst_bound_ratio) + " (limit 1), decay ratio 2 +/- " +
               fmt(worst_ratio_dev) + " (limit 0.3), boxes " + (boxes_ok ? "exact" : "VIOLATED");
  return out;
}

Outcome criterion_relu_networks() {
  Outcome out;
  std::vector<TrigExpansion> fixtures;
  {
    TrigExpansion g(1);
    g.add(all_sin(1), {1}, 1.0);
    fixtures.push_back(g);
  }
  {
    TrigExpansion g(1);
    g.add(all_sin(1), {1}, 1.0);
    g.add(all_sin(1), {2}, 0.5);
    fixtures.push_back(g);
  }
  {
    TrigExpansion g(2);
    g.add(all_cos(2), {1, 0}, 1.0);
    g.add(all_cos(2), {0, 1}, 0.5);
    fixtures.push_back(g);
  }
  bool boxes_ok = true;
  double worst_slope_dev = 0.0;
  int fixture_id = 0;
  for (const TrigExpansion& g : fixtures) {
    const double norm = barron_norm(g, 2.0);
    const double root_d = std::sqrt(static_cast<double>(g.dim()));
    const int seeds = g.dim() == 1 ? 24 : 12;
    std::vector<double> log_k, log_err;
    for (int k : {16, 64, 256, 1024}) {
      const int m = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(k))));
      double mean = 0.0;
      CounterRng rng(900 + static_cast<std::uint64_t>(fixture_id));
      for (int s = 0; s < seeds; ++s) {
        const TwoLayerNet net =
            build_relu_net(g, k, m, rng.child(static_cast<std::uint64_t>(s)).seed());
        double outer = 0.0;
        for (const auto& neuron : net.neurons) {
          outer += std::abs(neuron.a);
          double w = 0.0;
          for (double wi : neuron.w) w += wi * wi;
          if (std::abs(std::sqrt(w) - 1.0) > 1e-12) boxes_ok = false;
          if (std::abs(neuron.b) > root_d) boxes_ok = false;
        }
        if (outer > 8.0 * root_d * norm) boxes_ok = false;
        if (std::abs(net.offset) > 2.0 * norm) boxes_ok = false;
        mean += h1_net_error(net, g);
      }
      mean /= seeds;
      log_k.push_back(std::log(static_cast<double>(k)));
      log_err.push_back(std::log(mean));
    }
    const double slope = regression_slope(log_k, log_err);
    worst_slope_dev = std::max(worst_slope_dev, std::abs(slope + 0.5));
    ++fixture_id;
  }
  out.pass = boxes_ok && worst_slope_dev <= 0.15;
  out.detail = std::string("boxes ") + (boxes_ok ? "exact" : "VIOLATED") +
               ", worst |slope+0.5| " + fmt(worst_slope_dev) +
               " (limit 0.15, m = ceil(sqrt(k)), k in {16..1024})";
  return out;
}

Outcome criterion_poincare() {
  Outcome out;
  double worst = 0.0;
  for (int d = 1; d <= 2; ++d) {
    const PoincareResult res = poincare_check(d, d == 1 ? 256 : 128);
    const double expected = 1.0 / (M_PI * std::sqrt(static_cast<double>(d)));
    const double rel = std::abs(res.constant - expected) / expected;
    worst = std::max(worst, rel);
    if (res.mode_correlation < 0.999) out.pass = false;
  }
  out.pass = out.pass && worst <= 1e-3;
  out.detail = "max relative deviation from 1/(pi sqrt(d)) over d in {1,2}: " + fmt(worst) +
               " (limit 1e-3)";
  return out;
}

Outcome criterion_end_to_end() {
  Outcome out;
  const double eps = 0.05;
  EllipticProblem p = EllipticProblem::identity_problem(1, BoundaryKind::Dirichlet);
  p.f.add(all_sin(1), {1}, 1.0 + M_PI * M_PI);
  const ConstantLedger ledger = constants(p, eps);
  FlowOptions options;
  options.early_stop = false;
  const FlowTrace trace = solve(p, ledger, options);
  const OracleSolution oracle = galerkin_auto(p, 1e-12);

  int achieved_k = 0;
  double achieved_err = 1e300;
  CounterRng rng(2718);
  for (int k = 1; k <= 1024; k *= 2) {
    const TwoLayerNet net =
        best_of_draws(trace.final_iterate(), k, 20, rng.child(static_cast<std::uint64_t>(k)).seed());
    const double err = h1_net_error(net, oracle.expansion);
    if (err <= eps) {
      achieved_k = k;
      achieved_err = err;
      break;
    }
  }
  const bool within_budget =
      achieved_k > 0 && static_cast<std::uint64_t>(achieved_k) <= ledger.neuron_budget_cos;
  out.pass = achieved_k > 0 && within_budget;
  out.detail = "||N_k - u*||_H1 = " + fmt(achieved_err) + " <= eps 0.05 at k = " +
               std::to_string(achieved_k) + ", theoretical budget " +
               (ledger.neuron_budget_cos == UINT64_MAX ? std::string("~") + fmt(ledger.budget_cos_real)
                                                       : std::to_string(ledger.neuron_budget_cos)) +
               ", T = " + std::to_string(ledger.T);
  return out;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"1 spectral inverse exactness", criterion_spectral_inverse},
      {"2 closed-form flow anchor", criterion_flow_anchor},
      {"3 Barron-norm recursion", criterion_recursion},
      {"4 oracle convergence + a-priori chain", criterion_oracle_convergence},
      {"5 product estimate", criterion_product_estimate},
      {"6 cosine-network rate", criterion_cosine_rate},
      {"7 ReLU interpolation anchor", criterion_relu_interpolation},
      {"8 ReLU network boxes + rate", criterion_relu_networks},
      {"9 Poincare constant", criterion_poincare},
      {"10 end-to-end network extraction", criterion_end_to_end},
  };
  int failures = 0;
  for (const auto& criterion : criteria) {
    const double start = now_seconds();
    Outcome outcome;
    try {
      outcome = criterion.run();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail = std::string("exception: ") + e.what();
    }
    const double elapsed = now_seconds() - start;
    std::printf("[%s] criterion %s: %s [%.2f s]\n", outcome.pass ? "PASS" : "FAIL",
                criterion.name, outcome.detail.c_str(), elapsed);
    std::fflush(stdout);
    if (!outcome.pass) ++failures;
  }
  return failures;
}
