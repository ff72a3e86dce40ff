#include "nlap/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nlap {

namespace {

double ref_lambda_local(const QuadratureRule& rule, std::size_t q, int local) {
  const auto& p = rule.points[q];
  if (local == 0) return rule.dim == 2 ? 1.0 - p[0] - p[1] : 1.0 - p[0] - p[1] - p[2];
  return p[local - 1];
}

Vector project_to_ball(const GalerkinSpace& space, Vector xi, double radius) {
  if (radius <= 0.0) return xi;
  const double norm = xi_norm(space, xi);
  if (norm > radius) {
    const double s = radius / norm;
    for (double& v : xi) v *= s;
  }
  return xi;
}

void check_pairing_consistency(const ProblemSpec& spec, const RegularizedNonlinearity& fn,
                               std::int64_t n, const DiscreteField& field, const Vector& F,
                               const QuadratureRule& rule, int iter) {
  const double direct = coercivity_pairing(spec, fn, n, field, rule);
  const double via_dot = dot(F, field.xi());
  const PairingSplit split = pairing_decomposition(spec, fn, n, field, rule);
  const double scale = 1.0 + std::abs(direct);
  if (std::abs(direct - via_dot) > 1e-9 * scale ||
      std::abs(split.total() - direct) > 1e-9 * scale)
    throw Error("solve_fixed: pairing diagnostics failed at iteration " +
                std::to_string(iter) + " (direct " + std::to_string(direct) + ", dot " +
                std::to_string(via_dot) + ", split " + std::to_string(split.total()) + ")");
}

}  // namespace

double default_stage_tol(int N) { return N >= 3 ? 1e-8 : 1e-10; }

SolveResult solve_fixed(const ProblemSpec& spec, const RegularizedNonlinearity& fn,
                        std::int64_t n, const SpacePtr& space, double ball_radius, Vector xi0,
                        const QuadratureRule& rule, const SolveOptions& opts) {
  if (!space || space->dimension() == 0)
    throw Error("solve_fixed: space has no interior vertices");
  if (!(opts.tol > 0.0)) throw Error("solve_fixed: tol must be positive");
  if (ball_radius > 0.0 && xi_norm(*space, xi0) > ball_radius * (1.0 + 1e-12))
    throw Error("solve_fixed: initial iterate lies outside the ball");

  Vector xi = project_to_ball(*space, std::move(xi0), ball_radius);
  DiscreteField field(space, xi);
  Vector F = residual(spec, fn, n, field, rule);
  double fnorm = norm2(F);
  SolveResult best{xi, 0, fnorm, {fnorm}};
  if (opts.pairing_diagnostics) check_pairing_consistency(spec, fn, n, field, F, rule, 0);
  if (fnorm <= opts.tol) return best;

  double descent_step = 1.0;
  for (int iter = 1; iter <= opts.max_iterations; ++iter) {
    bool moved = false;

    // Newton direction with Armijo backtracking on ||F||^2
    Matrix J = jacobian(spec, fn, n, field, rule, opts.eps_reg);
    std::vector<int> piv;
    if (lu_factor(J, piv)) {
      Vector d = lu_apply(J, piv, scaled(F, -1.0));
      double t = 1.0;
      for (int bt = 0; bt < opts.max_backtracks; ++bt) {
        Vector trial = xi;
        add_scaled(trial, t, d);
        trial = project_to_ball(*space, std::move(trial), ball_radius);
        DiscreteField trial_field(space, trial);
        Vector trial_F;
        try {
          trial_F = residual(spec, fn, n, trial_field, rule);
        } catch (const Error&) {
          t *= 0.5;  // overflow inside the trial step; shorten
          continue;
        }
        const double trial_norm = norm2(trial_F);
        if (trial_norm * trial_norm <= (1.0 - opts.armijo_c * t) * fnorm * fnorm) {
          xi = std::move(trial);
          field = std::move(trial_field);
          F = std::move(trial_F);
          fnorm = trial_norm;
          moved = true;
          break;
        }
        t *= 0.5;
      }
    }

    if (!moved) {
      // descent fallback xi <- xi - eta F with adaptive eta
      double eta = descent_step;
      for (int bt = 0; bt < 60; ++bt) {
        Vector trial = xi;
        add_scaled(trial, -eta, F);
        trial = project_to_ball(*space, std::move(trial), ball_radius);
        DiscreteField trial_field(space, trial);
        Vector trial_F;
        try {
          trial_F = residual(spec, fn, n, trial_field, rule);
        } catch (const Error&) {
          eta *= 0.5;
          continue;
        }
        const double trial_norm = norm2(trial_F);
        if (trial_norm < fnorm) {
          xi = std::move(trial);
          field = std::move(trial_field);
          F = std::move(trial_F);
          fnorm = trial_norm;
          descent_step = eta * 2.0;
          moved = true;
          break;
        }
        eta *= 0.5;
      }
    }

    if (moved && opts.pairing_diagnostics)
      check_pairing_consistency(spec, fn, n, field, F, rule, iter);

    best.history.push_back(fnorm);
    if (fnorm < best.residual_norm) {
      best.xi = xi;
      best.residual_norm = fnorm;
    }
    best.iterations = iter;

    if (!moved)
      throw NonConvergence("solve_fixed: no descent direction found at iteration " +
                               std::to_string(iter),
                           best);
    if (fnorm <= opts.tol) {
      best.xi = xi;
      best.residual_norm = fnorm;
      return best;
    }
  }
  throw NonConvergence("solve_fixed: iteration cap (" + std::to_string(opts.max_iterations) +
                           ") reached with residual " + std::to_string(best.residual_norm),
                       best);
}

CoercivityCertificate coercivity_certificate(const ProblemSpec& spec,
                                             const RegularizedNonlinearity& fn, std::int64_t n,
                                             const SpacePtr& space, double radius, double rho,
                                             int num_dirs, std::uint64_t seed,
                                             const QuadratureRule& rule) {
  if (num_dirs < 1) throw Error("coercivity_certificate: num_dirs must be >= 1");
  if (!(radius > 0.0)) throw Error("coercivity_certificate: radius must be positive");
  CoercivityCertificate cert;
  cert.num_dirs = num_dirs;
  cert.radius = radius;
  cert.rho = rho;
  cert.seed = seed;
  Rng rng(seed);
  double sum = 0.0;
  double min_pair = std::numeric_limits<double>::infinity();
  for (int d = 0; d < num_dirs; ++d) {
    Vector g = rng.gaussian_vector(space->dimension());
    double norm = xi_norm(*space, g);
    while (!(norm > 0.0)) {
      g = rng.gaussian_vector(space->dimension());
      norm = xi_norm(*space, g);
    }
    for (double& v : g) v *= radius / norm;
    DiscreteField field(space, std::move(g));
    const double pairing = coercivity_pairing(spec, fn, n, field, rule);
    sum += pairing;
    min_pair = std::min(min_pair, pairing);
  }
  cert.min_pairing = min_pair;
  cert.mean_pairing = sum / num_dirs;
  cert.pass = min_pair > 0.0;
  cert.warn_below_half_rho = min_pair < 0.5 * rho;
  return cert;
}

MRefinementResult refine_in_m(const ProblemSpec& spec, const RegularizedNonlinearity& fn,
                              std::int64_t n, const SpacePtr& finest, double ball_radius,
                              const QuadratureRule& rule, const SolveOptions& opts) {
  if (!finest) throw Error("refine_in_m: null space");
  std::vector<SpacePtr> chain;
  for (SpacePtr s = finest; s; s = s->parent())
    if (s->dimension() > 0) chain.push_back(s);
  std::reverse(chain.begin(), chain.end());
  if (chain.empty()) throw Error("refine_in_m: no solvable levels (all spaces trivial)");

  MRefinementResult result;
  Vector xi;
  SpacePtr prev;
  for (const SpacePtr& s : chain) {
    Vector warm = prev ? prolong(prev, xi, s) : Vector(s->dimension(), 0.0);
    warm = project_to_ball(*s, std::move(warm), ball_radius);
    const SolveResult solved = solve_fixed(spec, fn, n, s, ball_radius, warm, rule, opts);
    StageRecord rec;
    rec.level = s->level();
    rec.n = n;
    rec.iterations = solved.iterations;
    rec.residual_norm = solved.residual_norm;
    rec.xi_norm = xi_norm(*s, solved.xi);
    if (prev) {
      const Vector lifted = prolong(prev, xi, s);
      rec.diff_from_prev = xi_norm(*s, subtract(solved.xi, lifted));
      result.diffs.push_back(rec.diff_from_prev);
    }
    result.stages.push_back(rec);
    xi = solved.xi;
    prev = s;
  }
  result.space = chain.back();
  result.xi = std::move(xi);
  const std::size_t nd = result.diffs.size();
  if (nd >= 2) result.diffs_decreasing = result.diffs[nd - 1] < result.diffs[nd - 2];
  return result;
}

bool stagnated(const std::vector<double>& diffs) {
  const std::size_t n = diffs.size();
  if (n < 3) return false;
  return diffs[n - 1] >= diffs[n - 2] && diffs[n - 2] >= diffs[n - 3];
}

ContinuationResult continue_in_n(const ProblemSpec& spec, const SpacePtr& space,
                                 std::vector<std::int64_t> schedule, Vector xi0,
                                 double ball_radius, const QuadratureRule& rule,
                                 const SolveOptions& solve_opts,
                                 const ContinuationOptions& copts) {
  if (schedule.empty()) throw Error("continue_in_n: empty schedule");
  for (std::size_t i = 1; i < schedule.size(); ++i)
    if (schedule[i] < schedule[i - 1]) throw Error("continue_in_n: schedule must be nondecreasing");

  ContinuationResult result;
  Vector xi = std::move(xi0);
  bool have_prev = false;

  for (int stage = 0; stage < copts.max_stages; ++stage) {
    if (stage >= static_cast<int>(schedule.size())) {
      if (schedule.back() > (std::int64_t{1} << 60))
        throw NonConvergence(
            "continue_in_n: regularization index exhausted without meeting the weak-form "
            "target (stage tolerance may be the floor)",
            SolveResult{xi, stage, result.diffs.empty() ? -1.0 : result.diffs.back(),
                        result.diffs});
      schedule.push_back(schedule.back() * 2);
    }
    const std::int64_t n = schedule[stage];
    const RegularizedNonlinearity fn = make_fk(spec.nonlinearity, n);
    const SolveResult solved =
        solve_fixed(spec, fn, n, space, ball_radius, xi, rule, solve_opts);

    StageRecord rec;
    rec.level = space->level();
    rec.n = n;
    rec.iterations = solved.iterations;
    rec.residual_norm = solved.residual_norm;
    rec.xi_norm = xi_norm(*space, solved.xi);
    if (have_prev) {
      rec.diff_from_prev = xi_norm(*space, subtract(solved.xi, xi));
      result.diffs.push_back(rec.diff_from_prev);
    }
    result.stages.push_back(rec);
    xi = solved.xi;
    have_prev = true;
    result.final_n = n;

    if (!result.diffs.empty() && result.diffs.back() <= copts.continuation_tol) {
      const DiscreteField field(space, xi);
      const double defect = final_weak_form_check(spec, field, copts.weak_form_random_tests,
                                                  copts.seed, rule);
      result.weak_form_defect = defect;
      if (defect <= copts.weak_form_target) {
        result.xi = std::move(xi);
        return result;
      }
    }

    // stagnation only counts while the increments are still above tolerance
    if (result.diffs.size() >= 3) {
      const std::size_t m = result.diffs.size();
      bool above = true;
      for (std::size_t i = m - 3; i < m; ++i)
        if (result.diffs[i] <= copts.continuation_tol) above = false;
      if (above && stagnated(result.diffs))
        throw Error("continue_in_n: stagnation, increments " +
                    std::to_string(result.diffs[m - 3]) + " -> " +
                    std::to_string(result.diffs[m - 2]) + " -> " +
                    std::to_string(result.diffs[m - 1]) + " at n = " + std::to_string(n));
    }
  }
  result.xi = std::move(xi);
  throw NonConvergence(
      "continue_in_n: stage cap reached before the continuation tolerance was met",
      SolveResult{result.xi, static_cast<int>(result.stages.size()),
                  result.diffs.empty() ? -1.0 : result.diffs.back(), result.diffs});
}

NegativePartVerdict negative_part_check(const DiscreteField& u) {
  NegativePartVerdict v;
  v.min_nodal = u.min_nodal();
  v.tolerance = 1e-10 * (1.0 + std::max(0.0, u.max_nodal()));
  v.pass = v.min_nodal >= -v.tolerance;
  return v;
}

double final_weak_form_check(const ProblemSpec& spec, const DiscreteField& u, int num_tests,
                             std::uint64_t seed, const QuadratureRule& rule) {
  const GalerkinSpace& space = u.space();
  const SimplexMesh& mesh = space.mesh();
  const int N = mesh.dim;
  const int npe = mesh.nodes_per_element();
  const std::size_t m = space.dimension();

  // One assembly pass produces LHS_j and RHS_j against every basis hat; the
  // identity is linear in the test function, so random test fields are dot
  // products afterwards.
  Vector lhs(m, 0.0), rhs(m, 0.0);
  for (std::size_t e = 0; e < mesh.element_count(); ++e) {
    const double vol = mesh.element_volume(static_cast<int>(e));
    const double scale = vol / rule.reference_volume();
    const auto basis = mesh.element_basis_gradients(static_cast<int>(e));
    const auto& gradu = u.element_gradients()[e];
    const double gn = u.element_gradient_norms()[e];
    const double gpow = std::pow(gn, N - 2);
    const double conv = std::pow(gn, spec.r2);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      double uq = 0.0;
      for (int j = 0; j < npe; ++j)
        uq += ref_lambda_local(rule, q, j) * u.nodal_values()[mesh.elements[e][j]];
      const double up = uq > 0.0 ? uq : 0.0;
      const double fval = spec.nonlinearity.f(up);
      if (!std::isfinite(fval))
        throw Error("final_weak_form_check: f overflow in element " + std::to_string(e));
      const double zero_order =
          spec.lambda * (spec.a1 * std::pow(up, spec.r1) + spec.a2 * conv) + fval;
      const double w = rule.weights[q] * scale;
      for (int j = 0; j < npe; ++j) {
        const int dof = space.dof_of_vertex(mesh.elements[e][j]);
        if (dof < 0) continue;
        double dgrad = 0.0;
        for (int c = 0; c < N; ++c) dgrad += gradu[c] * basis[j][c];
        lhs[dof] += w * gpow * dgrad;
        rhs[dof] += w * zero_order * ref_lambda_local(rule, q, j);
      }
    }
  }

  double worst = 0.0;
  for (std::size_t j = 0; j < m; ++j)
    worst = std::max(worst, std::abs(lhs[j] - rhs[j]) / (1.0 + std::abs(lhs[j])));

  Rng rng(seed);
  for (int t = 0; t < num_tests; ++t) {
    Vector c = rng.gaussian_vector(m);
    const double cn = norm2(c);
    if (!(cn > 0.0)) continue;
    for (double& v : c) v /= cn;
    const double l = dot(lhs, c);
    const double r = dot(rhs, c);
    worst = std::max(worst, std::abs(l - r) / (1.0 + std::abs(l)));
  }
  return worst;
}

}  // namespace nlap
