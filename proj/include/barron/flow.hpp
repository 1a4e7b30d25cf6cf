#pragma once

#include <optional>
#include <vector>

#include "barron/problem.hpp"

namespace barron {

// Preconditioned gradient iteration u_{t+1} = u_t - alpha (I-Lap)^{-1}(L u_t - f)
// from u_0 = 0, tracked step by step.

struct FlowOptions {
  std::optional<double> alpha;       // default: alpha_star from the ledger
  double prune_rel_tol = 1e-14;      // relative to the largest coefficient
  std::optional<long long> max_steps;
  bool early_stop = true;            // stop once the residual certifies eps
};

struct FlowTrace {
  std::vector<TrigExpansion> iterates;    // u_0 = 0, ..., u_T
  std::vector<double> barron_w2;          // weight-2 Barron norm per iterate
  std::vector<double> residual_h1;        // H1 norm of the preconditioned residual
  std::vector<double> energies;           // E(u_t)
  std::vector<double> pruned_mass_step;   // weight-2 mass pruned entering u_t
  std::vector<double> h1_errors;          // filled by attach_reference
  double pruned_mass_total = 0.0;
  double alpha = 0.0;
  long long planned_steps = 0;
  bool early_stopped = false;

  long long steps() const { return static_cast<long long>(iterates.size()) - 1; }
  const TrigExpansion& final_iterate() const { return iterates.back(); }
};

// One step; pruned weight-2 mass is accumulated into *pruned_mass when given.
TrigExpansion flow_step(const EllipticProblem& p, const TrigExpansion& u, double alpha,
                        double prune_abs_tol, double* pruned_mass = nullptr);

// Runs ledger.T steps (or the option cap). The early stop fires when the
// residual H1 norm falls below eps*lambda_min/2, which certifies an H1
// error below eps/2 by coercivity.
FlowTrace solve(const EllipticProblem& p, const ConstantLedger& ledger,
                const FlowOptions& options = {});

// Fills trace.h1_errors with h1_norm(u_t - reference).
void attach_reference(FlowTrace& trace, const TrigExpansion& reference);

// Per-step norm recursion ||u_{t+1}||_{B2} <= p_d ||u_t||_{B2} + alpha* ell_f/2,
// with the cumulative pruned mass (propagated by p_d per remaining step)
// added to the right-hand side so that pruning cannot void the assertion.
struct RecursionReport {
  bool holds = true;
  double max_ratio = 0.0;  // lhs / rhs tightness diagnostic
  std::vector<double> lhs, rhs;
};
RecursionReport check_recursion(const FlowTrace& trace, const ConstantLedger& ledger);

// Exponential-contraction certificates against a reference solution:
// per-step ratio <= beta* (+ oracle slack) and the a-priori chain
// h1_error[t] <= (||f||_{H^-1-upper} / lambda_min) beta*^t (+ slack).
struct ContractionReport {
  bool per_step_holds = true;
  bool apriori_holds = true;
  double max_step_ratio = 0.0;
  double max_apriori_excess = 0.0;  // worst lhs - rhs
  std::vector<double> ratios;
};
ContractionReport check_contraction(const FlowTrace& trace, const TrigExpansion& reference,
                                    const ConstantLedger& ledger, double oracle_slack = 1e-8);

// CSV rows: t,h1_error,barron_norm_w2,support_size,pruned_mass,energy.
void write_trace_csv(std::ostream& os, const FlowTrace& trace);

}  // namespace barron
