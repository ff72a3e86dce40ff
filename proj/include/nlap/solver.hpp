#pragma once

#include <optional>

#include "nlap/constants.hpp"
#include "nlap/operators.hpp"

namespace nlap {

struct SolveOptions {
  double tol = 1e-10;           // stage tolerance on ||F||_2
  int max_iterations = 500;
  double eps_reg = 1e-8;        // Jacobian regularization, mesh-size scaled by callers
  double armijo_c = 1e-4;
  int max_backtracks = 50;
  /// verify dot(F, xi) = <F, xi> = plus_part + minus_part at every accepted
  /// iterate (within 1e-9 relative); failures throw
  bool pairing_diagnostics = false;
};

/// Stage tolerance defaults: 1e-10, relaxed to 1e-8 for N = 3.
double default_stage_tol(int N);

struct SolveResult {
  Vector xi;
  int iterations = 0;
  double residual_norm = 0.0;
  std::vector<double> history;  // ||F|| per accepted iterate
};

/// Carries the best iterate when an iteration cap is hit.
struct NonConvergence : Error {
  NonConvergence(const std::string& what, SolveResult best)
      : Error(what), best_result(std::move(best)) {}
  SolveResult best_result;
};

/// Finds xi with ||F(xi)|| <= tol inside the ball |xi|_m <= ball_radius.
/// Damped Newton with Armijo line search on ||F||^2; iterates leaving the
/// ball are projected radially; after a failed Newton step the iteration
/// falls back to descent along -F with adaptive step. ball_radius <= 0
/// disables the ball constraint.
SolveResult solve_fixed(const ProblemSpec& spec, const RegularizedNonlinearity& fn,
                        std::int64_t n, const SpacePtr& space, double ball_radius, Vector xi0,
                        const QuadratureRule& rule, const SolveOptions& opts = {});

struct CoercivityCertificate {
  int num_dirs = 0;
  double radius = 0.0;
  double rho = 0.0;
  double min_pairing = 0.0;
  double mean_pairing = 0.0;
  bool pass = false;             // min > 0
  bool warn_below_half_rho = false;
  std::uint64_t seed = 0;
};

/// Samples Gaussian directions rescaled to |xi|_m = radius and evaluates
/// <F(xi), xi> on each; the certificate passes when the minimum is positive,
/// with a warning tier when it falls below rho/2.
CoercivityCertificate coercivity_certificate(const ProblemSpec& spec,
                                             const RegularizedNonlinearity& fn, std::int64_t n,
                                             const SpacePtr& space, double radius, double rho,
                                             int num_dirs, std::uint64_t seed,
                                             const QuadratureRule& rule);

struct StageRecord {
  int level = 0;
  std::int64_t n = 0;
  int iterations = 0;
  double residual_norm = 0.0;
  double xi_norm = 0.0;
  double diff_from_prev = -1.0;  // W-norm increment, -1 when not applicable
};

struct MRefinementResult {
  std::vector<StageRecord> stages;
  std::vector<double> diffs;  // ||u_{L+1} - prolong(u_L)||_W
  SpacePtr space;             // finest space
  Vector xi;                  // solution on the finest space
  bool diffs_decreasing = true;
};

/// Solves on each level of the chain ending at `finest`, warm-starting by
/// prolongation, at fixed n.
MRefinementResult refine_in_m(const ProblemSpec& spec, const RegularizedNonlinearity& fn,
                              std::int64_t n, const SpacePtr& finest, double ball_radius,
                              const QuadratureRule& rule, const SolveOptions& opts);

/// True when the convergence history stalls: three consecutive increments
/// with no decrease.
bool stagnated(const std::vector<double>& diffs);

struct ContinuationResult {
  std::vector<StageRecord> stages;
  std::vector<double> diffs;
  std::int64_t final_n = 0;
  Vector xi;
  double weak_form_defect = -1.0;
};

struct ContinuationOptions {
  double continuation_tol = 1e-6;     // on ||u_{n_{j+1}} - u_{n_j}||_W
  double weak_form_target = 1e-6;     // original-f defect required to accept
  int weak_form_random_tests = 16;
  int max_stages = 42;
  std::uint64_t seed = 0;
};

/// Solves the regularized problems along a geometric n-schedule (each stage
/// builds f_n = make_fk(f, n)), warm-started; accepts when the W-norm
/// increment is below tolerance and the original-f weak identity holds to the
/// requested defect. Throws Error on stagnation, NonConvergence on stage
/// exhaustion.
ContinuationResult continue_in_n(const ProblemSpec& spec, const SpacePtr& space,
                                 std::vector<std::int64_t> schedule, Vector xi0,
                                 double ball_radius, const QuadratureRule& rule,
                                 const SolveOptions& solve_opts,
                                 const ContinuationOptions& copts);

struct NegativePartVerdict {
  bool pass = false;
  double min_nodal = 0.0;
  double tolerance = 0.0;
};

/// min nodal value >= -1e-10 (1 + max nodal value).
NegativePartVerdict negative_part_check(const DiscreteField& u);

/// Largest relative defect of the original-f weak identity
///   int |grad u|^{N-2} grad u . grad w
///     = lambda (a1 int u^{r1} w + a2 int |grad u|^{r2} w) + int f(u) w
/// over all basis functions plus `num_tests` random fields:
/// max |LHS - RHS| / (1 + |LHS|).
double final_weak_form_check(const ProblemSpec& spec, const DiscreteField& u, int num_tests,
                             std::uint64_t seed, const QuadratureRule& rule);

}  // namespace nlap
