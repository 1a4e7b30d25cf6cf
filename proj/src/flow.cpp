#include "barron/flow.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace barron {

TrigExpansion flow_step(const EllipticProblem& p, const TrigExpansion& u, double alpha,
                        double prune_abs_tol, double* pruned_mass) {
  TrigExpansion next = axpy(1.0, u, -alpha, residual(p, u));
  PruneResult pruned = prune(next, prune_abs_tol);
  if (pruned_mass) *pruned_mass += pruned.removed_mass_w2;
  return std::move(pruned.expansion);
}

FlowTrace solve(const EllipticProblem& p, const ConstantLedger& ledger,
                const FlowOptions& options) {
  FlowTrace trace;
  trace.alpha = options.alpha.value_or(ledger.alpha_star);
  if (!(trace.alpha > 0.0)) throw PreconditionError("solve: step size must be positive");
  long long steps = ledger.T;
  if (options.max_steps) steps = std::min(steps, *options.max_steps);
  trace.planned_steps = steps;

  TrigExpansion u = TrigExpansion::zero(p.dim);
  TrigExpansion lu = apply_operator(p, u);
  auto record = [&](const TrigExpansion& v, const TrigExpansion& lv, double pruned) {
    TrigExpansion res = inv_shifted_laplacian(axpy(1.0, lv, -1.0, p.f), p.bc);
    trace.iterates.push_back(v);
    trace.barron_w2.push_back(v.empty() ? 0.0 : barron_norm(v, 2.0));
    trace.residual_h1.push_back(h1_norm(res));
    trace.energies.push_back(energy_given_lu(p, v, lv));
    trace.pruned_mass_step.push_back(pruned);
    return res;
  };

  TrigExpansion res = record(u, lu, 0.0);
  const double stop_threshold = 0.5 * ledger.eps * ledger.lambda_min;
  const double divergence_cap = 1e3 * (trace.residual_h1.front() + 1.0);
  for (long long t = 0; t < steps; ++t) {
    if (options.early_stop && trace.residual_h1.back() < stop_threshold) {
      trace.early_stopped = true;
      break;
    }
    double pruned = 0.0;
    TrigExpansion next = axpy(1.0, u, -trace.alpha, res);
    PruneResult pr = prune(next, options.prune_rel_tol * next.max_abs_coeff());
    pruned += pr.removed_mass_w2;
    u = std::move(pr.expansion);
    lu = apply_operator(p, u);
    trace.pruned_mass_total += pruned;
    res = record(u, lu, pruned);
    const double r = trace.residual_h1.back();
    if (!std::isfinite(r) || r > divergence_cap)
      throw AssumptionError(
          "solve: residual diverged at step " + std::to_string(t + 1) +
          "; the declared ellipticity window (hence alpha*) is likely invalid");
  }
  return trace;
}

void attach_reference(FlowTrace& trace, const TrigExpansion& reference) {
  trace.h1_errors.clear();
  trace.h1_errors.reserve(trace.iterates.size());
  for (const auto& u : trace.iterates)
    trace.h1_errors.push_back(h1_norm(axpy(1.0, u, -1.0, reference)));
}

RecursionReport check_recursion(const FlowTrace& trace, const ConstantLedger& ledger) {
  RecursionReport report;
  const double source_term = 0.5 * ledger.alpha_star * ledger.ell_f;
  double slack = 0.0;  // pruned mass propagated forward by p_d per step
  for (std::size_t t = 0; t + 1 < trace.barron_w2.size(); ++t) {
    slack = ledger.p_d * slack + trace.pruned_mass_step[t + 1];
    const double lhs = trace.barron_w2[t + 1];
    const double rhs = ledger.p_d * trace.barron_w2[t] + source_term + slack + 1e-12;
    report.lhs.push_back(lhs);
    report.rhs.push_back(rhs);
    if (lhs > rhs) report.holds = false;
    if (rhs > 0.0) report.max_ratio = std::max(report.max_ratio, lhs / rhs);
  }
  return report;
}

ContractionReport check_contraction(const FlowTrace& trace, const TrigExpansion& reference,
                                    const ConstantLedger& ledger, double oracle_slack) {
  ContractionReport report;
  std::vector<double> errors;
  errors.reserve(trace.iterates.size());
  if (trace.h1_errors.size() == trace.iterates.size()) {
    errors = trace.h1_errors;
  } else {
    for (const auto& u : trace.iterates)
      errors.push_back(h1_norm(axpy(1.0, u, -1.0, reference)));
  }
  double prune_slack = 0.0;
  for (std::size_t t = 0; t + 1 < errors.size(); ++t) {
    prune_slack += trace.pruned_mass_step[t + 1];  // B2 mass dominates the H1 dust
    const double rhs = ledger.beta_star * errors[t] + oracle_slack + prune_slack;
    if (errors[t + 1] > rhs) report.per_step_holds = false;
    if (errors[t] > 0.0) {
      const double ratio = errors[t + 1] / errors[t];
      report.ratios.push_back(ratio);
      report.max_step_ratio = std::max(report.max_step_ratio, ratio);
    } else {
      report.ratios.push_back(0.0);
    }
  }
  const double amplitude = ledger.f_hminus1_upper / ledger.lambda_min;
  double bound = amplitude;
  prune_slack = 0.0;
  for (std::size_t t = 0; t < errors.size(); ++t) {
    if (t > 0) {
      bound *= ledger.beta_star;
      prune_slack += trace.pruned_mass_step[t];
    }
    const double excess = errors[t] - (bound + oracle_slack + prune_slack);
    report.max_apriori_excess = std::max(report.max_apriori_excess, excess);
    if (excess > 0.0) report.apriori_holds = false;
  }
  return report;
}

void write_trace_csv(std::ostream& os, const FlowTrace& trace) {
  os << "t,h1_error,barron_norm_w2,support_size,pruned_mass,energy\n";
  double cumulative = 0.0;
  for (std::size_t t = 0; t < trace.iterates.size(); ++t) {
    cumulative += trace.pruned_mass_step[t];
    os << t << ',';
    if (t < trace.h1_errors.size())
      os << format_real(trace.h1_errors[t]);
    else
      os << "nan";
    os << ',' << format_real(trace.barron_w2[t]) << ',' << trace.iterates[t].size() << ','
       << format_real(cumulative) << ',' << format_real(trace.energies[t]) << "\n";
  }
}

}  // namespace barron
