// Command-line front end: problem ingestion, flow runs, network extraction,
// and the built-in verification suite. All outputs are deterministic for a
// fixed configuration and seed.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "barron/flow.hpp"
#include "barron/network.hpp"
#include "barron/oracle.hpp"
#include "barron/problem.hpp"
#include "barron/rng.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace barron;

namespace {

struct RunConfig {
  std::string problem_path;
  std::string expansion_path;
  std::string out_dir;
  double eps = 1e-3;
  std::uint64_t seed = 0;
  int trials = 20;
  std::optional<double> alpha;
  double prune_tol = 1e-14;
  std::optional<long long> max_steps;
  bool early_stop = true;
  std::string oracle = "galerkin";
  int fd_n = 128;
  std::optional<int> k;
  std::optional<int> m;
  std::string activation = "both";
  std::string dims = "1,2";
};

fs::path resolve_out(const RunConfig& config) {
  std::string dir = config.out_dir;
  if (dir.empty()) {
    if (const char* env = std::getenv("BARRONFLOW_OUT")) dir = env;
  }
  if (dir.empty()) dir = ".";
  fs::path path(dir);
  fs::create_directories(path);
  return path;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  return os;
}

json ledger_json(const EllipticProblem& p, const ConstantLedger& ledger) {
  json j;
  j["dim"] = ledger.dim;
  j["bc"] = p.bc == BoundaryKind::Dirichlet ? "dirichlet" : "neumann";
  j["eps"] = ledger.eps;
  j["ell_A"] = ledger.ell_A;
  j["ell_c"] = ledger.ell_c;
  j["ell_f"] = ledger.ell_f;
  j["lambda_min"] = ledger.lambda_min;
  j["lambda_max"] = ledger.lambda_max;
  j["alpha_star"] = ledger.alpha_star;
  j["beta_star"] = ledger.beta_star;
  j["p_d"] = ledger.p_d;
  j["f_l2"] = ledger.f_l2;
  j["f_hminus1_upper"] = ledger.f_hminus1_upper;
  j["T"] = ledger.T;
  j["neuron_budget_cos"] = ledger.neuron_budget_cos;
  j["neuron_budget_relu"] = ledger.neuron_budget_relu;
  j["budget_cos_real"] = ledger.budget_cos_real;
  j["budget_relu_real"] = ledger.budget_relu_real;
  return j;
}

int cmd_solve(const RunConfig& config) {
  const EllipticProblem problem = load_problem(config.problem_path);
  validate_or_throw(problem, 10000, config.seed);
  const ConstantLedger ledger = constants(problem, config.eps);

  FlowOptions options;
  options.alpha = config.alpha;
  options.prune_rel_tol = config.prune_tol;
  options.max_steps = config.max_steps;
  options.early_stop = config.early_stop;
  FlowTrace trace = solve(problem, ledger, options);
  // The recursion/contraction certificates are stated for the ledger step
  // size; a CLI override runs the flow but skips them.
  const bool standard_step = !config.alpha || *config.alpha == ledger.alpha_star;

  json run;
  run["steps_run"] = trace.steps();
  run["planned_steps"] = trace.planned_steps;
  run["early_stopped"] = trace.early_stopped;
  run["alpha"] = trace.alpha;
  run["pruned_mass_total"] = trace.pruned_mass_total;
  run["final_residual_h1"] = trace.residual_h1.back();
  run["final_support"] = trace.final_iterate().size();
  run["final_barron_w2"] = trace.barron_w2.back();
  run["final_energy"] = trace.energies.back();

  if (config.oracle != "none") {
    OracleSolution reference;
    if (config.oracle == "galerkin") {
      reference = galerkin_auto(problem);
      run["oracle"] = "galerkin";
      run["oracle_cutoff"] = reference.cutoff;
      run["oracle_tail_bound"] = reference.tail_bound;
      attach_reference(trace, reference.expansion);
      run["final_h1_error_vs_oracle"] = trace.h1_errors.back();
      if (standard_step) {
        const ContractionReport contraction =
            check_contraction(trace, reference.expansion, ledger,
                              1e-8 + reference.accuracy_estimate);
        run["contraction_per_step"] = contraction.per_step_holds;
        run["contraction_apriori"] = contraction.apriori_holds;
        run["contraction_max_ratio"] = contraction.max_step_ratio;
      }
    } else if (config.oracle == "fd") {
      reference = fd_solve(problem, config.fd_n);
      run["oracle"] = "fd";
      run["oracle_n"] = config.fd_n;
      run["final_fd_rel_l2"] = fd_relative_l2(reference, trace.final_iterate());
    } else {
      throw PreconditionError("solve: --oracle must be galerkin, fd, or none");
    }
  }
  if (standard_step) {
    const RecursionReport recursion = check_recursion(trace, ledger);
    run["recursion_holds"] = recursion.holds;
    run["recursion_max_ratio"] = recursion.max_ratio;
  }

  const fs::path out = resolve_out(config);
  {
    auto os = open_output(out / "trace.csv");
    write_trace_csv(os, trace);
  }
  {
    auto os = open_output(out / "solution.expansion");
    write_expansion(os, trace.final_iterate());
  }
  {
    json j = ledger_json(problem, ledger);
    j["run"] = run;
    auto os = open_output(out / "ledger.json");
    os << j.dump(2) << "\n";
  }
  std::cout << "solve: " << trace.steps() << " steps, residual "
            << format_real(trace.residual_h1.back()) << ", outputs in " << out.string() << "\n";
  return 0;
}

struct ExtractResult {
  int k = 0;
  double error = 0.0;
  TwoLayerNet net;
  std::vector<std::pair<int, double>> history;  // (k, per-trial error)
};

ExtractResult extract_cosine(const TrigExpansion& target, const RunConfig& config,
                             std::uint64_t budget) {
  ExtractResult result;
  const SamplingMeasure mu = build_measure(target);
  CounterRng rng(config.seed);
  auto attempt = [&](int k) {
    result.k = k;
    if (mu.empty()) {  // zero target: the empty net is exact
      result.net = TwoLayerNet{Activation::Cosine, target.dim(), NetNormalization::Mean, 0.0, {}};
      result.error = 0.0;
      result.history.emplace_back(k, 0.0);
      return;
    }
    CounterRng draw_rng(rng.child(static_cast<std::uint64_t>(k)).seed());
    result.error = std::numeric_limits<double>::infinity();
    for (int r = 0; r < config.trials; ++r) {
      TwoLayerNet net =
          sample_cosine_net(mu, k, draw_rng.child(static_cast<std::uint64_t>(r)).seed());
      const double err = h1_net_error(net, target);
      result.history.emplace_back(k, err);
      if (err < result.error) {
        result.error = err;
        result.net = std::move(net);
      }
    }
  };
  if (config.k) {
    attempt(*config.k);
    return result;
  }
  for (int k = 1; k <= 4096; k *= 2) {
    attempt(k);
    if (result.error <= 0.5 * config.eps) break;
    if (budget > 0 && static_cast<std::uint64_t>(k) >= budget) break;
  }
  return result;
}

ExtractResult extract_relu(const TrigExpansion& target, const RunConfig& config,
                           std::uint64_t budget) {
  ExtractResult result;
  CounterRng rng(config.seed);
  auto attempt = [&](int k) {
    const int m = config.m.value_or(static_cast<int>(std::ceil(std::sqrt(static_cast<double>(k)))));
    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < config.trials; ++r) {
      TwoLayerNet net = build_relu_net(target, k, m,
                                       rng.child(static_cast<std::uint64_t>(k) * 131 + r).seed());
      const double err = h1_net_error(net, target);
      result.history.emplace_back(k, err);
      if (err < best) {
        best = err;
        result.net = std::move(net);
      }
    }
    result.k = k;
    result.error = best;
  };
  if (config.k) {
    attempt(*config.k);
    return result;
  }
  for (int k = 1; k <= 2048; k *= 2) {
    attempt(k);
    if (result.error <= 0.5 * config.eps) break;
    if (budget > 0 && static_cast<std::uint64_t>(k) >= budget) break;
  }
  return result;
}

json relu_box_audit(const TwoLayerNet& net, double target_norm) {
  const double root_d = std::sqrt(static_cast<double>(net.dim));
  double outer_sum = 0.0, max_bias = 0.0, max_w_dev = 0.0;
  for (const auto& neuron : net.neurons) {
    outer_sum += std::abs(neuron.a);
    max_bias = std::max(max_bias, std::abs(neuron.b));
    double w = 0.0;
    for (double wi : neuron.w) w += wi * wi;
    max_w_dev = std::max(max_w_dev, std::abs(std::sqrt(w) - 1.0));
  }
  json audit;
  audit["outer_sum"] = outer_sum;
  audit["outer_bound"] = 8.0 * root_d * target_norm;
  audit["outer_ok"] = outer_sum <= 8.0 * root_d * target_norm;
  audit["max_bias"] = max_bias;
  audit["bias_ok"] = max_bias <= root_d;
  audit["max_weight_norm_deviation"] = max_w_dev;
  audit["weights_ok"] = max_w_dev <= 1e-12;
  audit["offset"] = net.offset;
  audit["offset_bound"] = 2.0 * target_norm;
  audit["offset_ok"] = std::abs(net.offset) <= 2.0 * target_norm;
  audit["pass"] = audit["outer_ok"].get<bool>() && audit["bias_ok"].get<bool>() &&
                  audit["weights_ok"].get<bool>() && audit["offset_ok"].get<bool>();
  return audit;
}

int cmd_extract(const RunConfig& config) {
  const EllipticProblem problem = load_problem(config.problem_path);
  validate_or_throw(problem, 10000, config.seed);
  const ConstantLedger ledger = constants(problem, config.eps);

  TrigExpansion target(problem.dim);
  if (!config.expansion_path.empty()) {
    std::ifstream is(config.expansion_path);
    if (!is) throw IoError("cannot open expansion file '" + config.expansion_path + "'");
    target = read_expansion(is, problem.dim);
  } else {
    FlowOptions options;
    options.prune_rel_tol = config.prune_tol;
    target = solve(problem, ledger, options).final_iterate();
  }

  const fs::path out = resolve_out(config);
  json summary;
  summary["eps"] = config.eps;
  summary["target_barron_w2"] = target.empty() ? 0.0 : barron_norm(target, 2.0);
  summary["neuron_budget_cos"] = ledger.neuron_budget_cos;
  summary["neuron_budget_relu"] = ledger.neuron_budget_relu;

  auto errors_csv = open_output(out / "extract_errors.csv");
  errors_csv << "activation,k,error\n";

  const bool want_cos = config.activation == "cosine" || config.activation == "both";
  const bool want_relu = config.activation == "relu" || config.activation == "both";
  if (!want_cos && !want_relu)
    throw PreconditionError("extract: --activation must be cosine, relu, or both");

  if (want_cos) {
    ExtractResult r = extract_cosine(target, config, ledger.neuron_budget_cos);
    save_network((out / "net_cosine.net").string(), r.net);
    for (const auto& [k, err] : r.history)
      errors_csv << "cosine," << k << ',' << format_real(err) << "\n";
    json jc;
    jc["k"] = r.k;
    jc["error_h1"] = r.error;
    jc["achieved_eps"] = r.error <= config.eps;
    jc["within_budget"] = static_cast<std::uint64_t>(r.k) <= ledger.neuron_budget_cos;
    summary["cosine"] = jc;
  }
  if (want_relu) {
    ExtractResult r = extract_relu(target, config, ledger.neuron_budget_relu);
    save_network((out / "net_relu.net").string(), r.net);
    for (const auto& [k, err] : r.history)
      errors_csv << "relu," << k << ',' << format_real(err) << "\n";
    json jr;
    jr["k"] = r.k;
    jr["m"] = config.m.value_or(static_cast<int>(std::ceil(std::sqrt(static_cast<double>(r.k)))));
    jr["error_h1"] = r.error;
    jr["achieved_eps"] = r.error <= config.eps;
    jr["within_budget"] = static_cast<std::uint64_t>(r.k) <= ledger.neuron_budget_relu;
    jr["box_audit"] = relu_box_audit(r.net, summary["target_barron_w2"].get<double>());
    summary["relu"] = jr;
  }

  auto os = open_output(out / "extract_summary.json");
  os << summary.dump(2) << "\n";
  std::cout << "extract: outputs in " << out.string() << "\n";
  return 0;
}

// Small randomized problems for the verification suite.
EllipticProblem verify_problem(int d, BoundaryKind bc, std::uint64_t seed) {
  CounterRng rng(seed);
  EllipticProblem p = EllipticProblem::identity_problem(d, bc);
  double spread = 0.0;
  for (int i = 0; i < d; ++i) {
    MultiIndex k(static_cast<std::size_t>(d), 0);
    k[static_cast<std::size_t>(i)] = 1 + static_cast<int>(rng.below(2));
    const double eta = rng.uniform(-0.15, 0.15);
    p.A_at(i, i).add(all_cos(d), k, eta);
    spread = std::max(spread, std::abs(eta));
  }
  p.a_min = 1.0 - spread - 1e-9;
  p.a_max = 1.0 + spread + 1e-9;
  const double etac = rng.uniform(-0.25, 0.25);
  MultiIndex kc(static_cast<std::size_t>(d), 0);
  kc[0] = 1;
  p.c.add(all_cos(d), kc, etac);
  p.c_min = 1.0 - std::abs(etac) - 1e-9;
  p.c_max = 1.0 + std::abs(etac) + 1e-9;
  p.f = TrigExpansion(d);
  const ParityVector fparity = admissible_parity(d, bc);
  for (int t = 0; t < 2; ++t) {
    MultiIndex kf(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i)
      kf[static_cast<std::size_t>(i)] =
          (bc == BoundaryKind::Dirichlet ? 1 : 0) + static_cast<int>(rng.below(2));
    if (kf == MultiIndex(static_cast<std::size_t>(d), 0)) kf[0] = 1;
    p.f.add(fparity, kf, rng.uniform(-1.0, 1.0));
  }
  if (p.f.empty()) p.f.add(fparity, MultiIndex(static_cast<std::size_t>(d), 1), 1.0);
  return p;
}

int cmd_verify(const RunConfig& config) {
  json checks = json::array();
  bool all_pass = true;
  auto record = [&](const std::string& name, bool pass, double margin, const std::string& detail) {
    json c;
    c["check"] = name;
    c["pass"] = pass;
    c["margin"] = margin;
    c["detail"] = detail;
    checks.push_back(c);
    all_pass = all_pass && pass;
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << name << " (margin " << margin << ") " << detail
              << "\n";
  };
  CounterRng rng(config.seed);

  {  // Spectral inverse exactness on random admissible terms.
    double worst = 0.0;
    for (int trial = 0; trial < 60; ++trial) {
      CounterRng tr = rng.child(trial);
      const int d = 1 + static_cast<int>(tr.below(3));
      const BoundaryKind bc = tr.below(2) ? BoundaryKind::Neumann : BoundaryKind::Dirichlet;
      MultiIndex k(static_cast<std::size_t>(d));
      for (int i = 0; i < d; ++i)
        k[static_cast<std::size_t>(i)] =
            (bc == BoundaryKind::Dirichlet ? 1 : 0) + static_cast<int>(tr.below(9));
      if (bc == BoundaryKind::Neumann && index_norm_sq(k) == 0.0) k[0] = 1;
      const double coeff = tr.uniform(-3.0, 3.0);
      TrigExpansion g = TrigExpansion::basis(admissible_parity(d, bc), k, coeff);
      const TrigExpansion inv = inv_shifted_laplacian(g, bc);
      const double expected = coeff / (1.0 + M_PI * M_PI * index_norm_sq(k));
      const double got = inv.terms().begin()->second;
      worst = std::max(worst, std::abs(got - expected) / std::abs(expected));
    }
    record("spectral_inverse", worst <= 1e-14, 1e-14 - worst,
           "max relative deviation " + format_real(worst));
  }

  {  // Product estimate and pointwise agreement.
    double worst_ratio = 0.0, worst_dev = 0.0;
    for (int trial = 0; trial < 30; ++trial) {
      CounterRng tr = rng.child(1000 + trial);
      const int d = 1 + static_cast<int>(tr.below(2));
      TrigExpansion g(d), h(d);
      for (int t = 0; t < 4; ++t) {
        MultiIndex ks(static_cast<std::size_t>(d)), kc(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i) {
          ks[static_cast<std::size_t>(i)] = 1 + static_cast<int>(tr.below(4));
          kc[static_cast<std::size_t>(i)] = static_cast<int>(tr.below(4));
        }
        g.add(all_sin(d), ks, tr.uniform(-1.0, 1.0));
        h.add(all_cos(d), kc, tr.uniform(-1.0, 1.0));
      }
      const TrigExpansion gh = multiply(g, h);
      for (double n : {0.0, 1.0, 2.0}) {
        const double lhs = barron_norm(gh, n);
        const double rhs = barron_norm(g, n) * barron_norm(h, n);
        if (rhs > 0.0) worst_ratio = std::max(worst_ratio, lhs / rhs);
      }
      std::vector<double> x(static_cast<std::size_t>(d));
      for (int s = 0; s < 100; ++s) {
        for (auto& xi : x) xi = tr.uniform();
        worst_dev = std::max(worst_dev, std::abs(eval(gh, x) - eval(g, x) * eval(h, x)));
      }
    }
    record("product_estimate", worst_ratio <= 1.0 + 1e-12 && worst_dev <= 1e-10,
           1.0 - worst_ratio, "max norm ratio " + format_real(worst_ratio) +
                                  ", max pointwise deviation " + format_real(worst_dev));
  }

  {  // Closed-form single-mode anchor.
    EllipticProblem p = EllipticProblem::identity_problem(1, BoundaryKind::Dirichlet);
    p.f.add(all_sin(1), MultiIndex{1}, 1.0 + M_PI * M_PI);
    ConstantLedger ledger = constants(p, 1e-3);
    FlowOptions options;
    options.early_stop = false;
    options.max_steps = 30;
    FlowTrace trace = solve(p, ledger, options);
    double worst = 0.0;
    for (long long t = 0; t <= trace.steps(); ++t) {
      const double expected = 1.0 - std::pow(2.0, -static_cast<double>(t));
      const double got = trace.iterates[static_cast<std::size_t>(t)].coeff(all_sin(1), MultiIndex{1});
      worst = std::max(worst, std::abs(got - expected));
    }
    record("single_mode_flow", worst <= 1e-12, 1e-12 - worst,
           "max coefficient deviation " + format_real(worst));
  }

  {  // Recursion + contraction on random problems.
    bool rec_ok = true, con_ok = true;
    double rec_margin = 1.0;
    for (int idx = 0; idx < 4; ++idx) {
      const int d = 1 + idx % 2;
      const BoundaryKind bc = idx < 2 ? BoundaryKind::Dirichlet : BoundaryKind::Neumann;
      EllipticProblem p = verify_problem(d, bc, rng.child(2000 + idx).seed());
      validate_or_throw(p, 2000, config.seed);
      ConstantLedger ledger = constants(p, 1e-2);
      FlowOptions options;
      options.early_stop = false;
      FlowTrace trace = solve(p, ledger, options);
      RecursionReport rec = check_recursion(trace, ledger);
      rec_ok = rec_ok && rec.holds;
      rec_margin = std::min(rec_margin, 1.0 - rec.max_ratio);
      OracleSolution oracle = galerkin_auto(p, 1e-11);
      ContractionReport con = check_contraction(trace, oracle.expansion, ledger,
                                                 1e-8 + oracle.accuracy_estimate);
      con_ok = con_ok && con.per_step_holds && con.apriori_holds;
    }
    record("barron_recursion", rec_ok, rec_margin, "4 random problems, both boundary kinds");
    record("contraction", con_ok, 0.0, "per-step and a-priori chains vs Galerkin oracle");
  }

  {  // Cross-oracle agreement, d = 1 variable coefficient.
    EllipticProblem p = EllipticProblem::identity_problem(1, BoundaryKind::Dirichlet);
    p.A_at(0, 0).add(all_cos(1), MultiIndex{2}, 0.5);
    p.a_min = 0.5 - 1e-9;
    p.a_max = 1.5 + 1e-9;
    p.f.add(all_sin(1), MultiIndex{1}, 1.0);
    OracleSolution gal = galerkin_auto(p);
    OracleSolution fd = fd_solve(p, 256);
    const double rel = fd_relative_l2(fd, gal.expansion);
    const double bound = std::max(1e-5, 10.0 / (256.0 * 256.0));
    record("oracle_agreement", rel <= bound, bound - rel,
           "galerkin vs fd relative l2 " + format_real(rel));
  }

  for (int d = 1; d <= 2; ++d) {  // Poincare constant.
    const int n = d == 1 ? 256 : 96;
    const PoincareResult res = poincare_check(d, n);
    const double expected = 1.0 / (M_PI * std::sqrt(static_cast<double>(d)));
    const double rel = std::abs(res.constant - expected) / expected;
    const double tol = d == 1 ? 1e-4 : 1e-3;
    record("poincare_d" + std::to_string(d), rel <= tol && res.mode_correlation >= 0.999,
           tol - rel, "estimate " + format_real(res.constant) + ", mode correlation " +
                          format_real(res.mode_correlation));
  }

  {  // Sampling measure reproduces the target pointwise in mean.
    TrigExpansion g(2);
    g.add(all_sin(2), MultiIndex{1, 1}, 2.0);
    g.add(all_sin(2), MultiIndex{2, 1}, -0.5);
    const SamplingMeasure mu = build_measure(g);
    CounterRng tr = rng.child(3000);
    double worst = 0.0;
    std::vector<double> x(2);
    for (int s = 0; s < 50; ++s) {
      for (auto& xi : x) xi = tr.uniform();
      double mean = 0.0;
      for (const auto& atom : mu.atoms) {
        double z = atom.phase;
        for (int i = 0; i < 2; ++i) z += atom.frequency[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
        mean += atom.weight * mu.amplitude * std::cos(z);
      }
      worst = std::max(worst, std::abs(mean - eval(g, x)));
    }
    record("measure_mean", worst <= 1e-10, 1e-10 - worst,
           "max pointwise deviation " + format_real(worst));
  }

  {  // ReLU coefficient boxes.
    bool ok = true;
    for (int trial = 0; trial < 10; ++trial) {
      CounterRng tr = rng.child(4000 + trial);
      const int d = 1 + static_cast<int>(tr.below(2));
      TrigExpansion g(d);
      for (int t = 0; t < 3; ++t) {
        MultiIndex k(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i) k[static_cast<std::size_t>(i)] = 1 + static_cast<int>(tr.below(3));
        g.add(all_sin(d), k, tr.uniform(-2.0, 2.0));
      }
      if (g.empty()) continue;
      TwoLayerNet net = build_relu_net(g, 32, 4, tr.next_u64());
      const json audit = relu_box_audit(net, barron_norm(g, 2.0));
      ok = ok && audit["pass"].get<bool>();
    }
    record("relu_boxes", ok, 0.0, "coefficient boxes on random targets");
  }

  const fs::path out = resolve_out(config);
  json report;
  report["seed"] = config.seed;
  report["all_pass"] = all_pass;
  report["checks"] = checks;
  auto os = open_output(out / "verify_report.json");
  os << report.dump(2) << "\n";
  if (!all_pass) throw CheckError("verification suite reported failures");
  return 0;
}

int cmd_bench(const RunConfig& config) {
  const fs::path out = resolve_out(config);
  auto os = open_output(out / "bench.csv");
  os << "d,bc,p_d,p_d_over_d2,T,steps,final_support,solve_ms\n";
  std::vector<int> dims;
  {
    std::istringstream is(config.dims);
    std::string field;
    while (std::getline(is, field, ',')) dims.push_back(std::stoi(field));
  }
  for (int d : dims) {
    for (BoundaryKind bc : {BoundaryKind::Dirichlet, BoundaryKind::Neumann}) {
      EllipticProblem p = verify_problem(d, bc, config.seed + static_cast<std::uint64_t>(d));
      ConstantLedger ledger = constants(p, config.eps);
      const auto start = std::chrono::steady_clock::now();
      FlowTrace trace = solve(p, ledger);
      const auto stop = std::chrono::steady_clock::now();
      const double ms =
          std::chrono::duration_cast<std::chrono::microseconds>(stop - start).count() / 1000.0;
      os << d << ',' << (bc == BoundaryKind::Dirichlet ? "dirichlet" : "neumann") << ','
         << format_real(ledger.p_d) << ',' << format_real(ledger.p_d / (d * d)) << ',' << ledger.T
         << ',' << trace.steps() << ',' << trace.final_iterate().size() << ','
         << format_real(ms) << "\n";
    }
  }
  std::cout << "bench: outputs in " << out.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sobolev-gradient-flow solver with certified two-layer network extraction"};
  app.require_subcommand(1);
  RunConfig config;

  auto add_common = [&](CLI::App* cmd, bool needs_problem) {
    if (needs_problem)
      cmd->add_option("--problem", config.problem_path, "problem file")->required();
    cmd->add_option("--eps", config.eps, "target H1 accuracy");
    cmd->add_option("--seed", config.seed, "global random seed");
    cmd->add_option("--out", config.out_dir, "output directory (default $BARRONFLOW_OUT or .)");
  };

  CLI::App* solve_cmd = app.add_subcommand("solve", "run the gradient flow on a problem file");
  add_common(solve_cmd, true);
  solve_cmd->add_option("--alpha", [&config](const std::vector<std::string>& v) {
    config.alpha = std::stod(v.front());
    return true;
  }, "step size override (default alpha*)");
  solve_cmd->add_option("--prune-tol", config.prune_tol, "relative pruning tolerance");
  solve_cmd->add_option("--max-steps", [&config](const std::vector<std::string>& v) {
    config.max_steps = std::stoll(v.front());
    return true;
  }, "cap on iteration count");
  solve_cmd->add_flag_callback("--no-early-stop", [&config]() { config.early_stop = false; },
                               "always run the full planned T steps");
  solve_cmd->add_option("--oracle", config.oracle, "reference oracle: galerkin|fd|none");
  solve_cmd->add_option("--fd-n", config.fd_n, "finite-difference grid resolution");

  CLI::App* extract_cmd = app.add_subcommand("extract", "extract two-layer networks");
  add_common(extract_cmd, true);
  extract_cmd->add_option("--expansion", config.expansion_path,
                          "target expansion file (default: solve output)");
  extract_cmd->add_option("--activation", config.activation, "cosine|relu|both");
  extract_cmd->add_option("--k", [&config](const std::vector<std::string>& v) {
    config.k = std::stoi(v.front());
    return true;
  }, "neuron count (default: grow until eps/2)");
  extract_cmd->add_option("--m", [&config](const std::vector<std::string>& v) {
    config.m = std::stoi(v.front());
    return true;
  }, "ReLU interpolation resolution (default ceil(sqrt(k)))");
  extract_cmd->add_option("--trials", config.trials, "independent draws per k");
  extract_cmd->add_option("--prune-tol", config.prune_tol, "relative pruning tolerance");

  CLI::App* verify_cmd = app.add_subcommand("verify", "run the built-in verification suite");
  add_common(verify_cmd, false);

  CLI::App* bench_cmd = app.add_subcommand("bench", "solve timing across dimensions");
  add_common(bench_cmd, false);
  bench_cmd->add_option("--dims", config.dims, "comma-separated dimensions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 3;
  }

  try {
    if (*solve_cmd) return cmd_solve(config);
    if (*extract_cmd) return cmd_extract(config);
    if (*verify_cmd) return cmd_verify(config);
    if (*bench_cmd) return cmd_bench(config);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const AssumptionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const ParityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const CheckError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
