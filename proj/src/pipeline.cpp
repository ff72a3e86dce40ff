#include "nlap/pipeline.hpp"

#include <algorithm>
#include <cmath>

namespace nlap {

namespace {

double mesh_width(const SimplexMesh& mesh) {
  return std::pow(mesh.total_volume() / static_cast<double>(mesh.element_count()),
                  1.0 / mesh.dim);
}

}  // namespace

json constants_to_json(const ConstantsReport& rep) {
  return json{{"N", rep.N},
              {"alpha_N", rep.alpha_n},
              {"omega_Nminus1", rep.omega_nm1},
              {"L_estimate", rep.l_estimate},
              {"domain_measure", rep.domain_measure},
              {"cemb1", rep.cemb1},
              {"cemb2", rep.cemb2},
              {"cemb3", rep.cemb3},
              {"cemb4", rep.cemb4},
              {"cemb5", rep.cemb5},
              {"c1_power", rep.c1_power},
              {"c2_convection", rep.c2_convection},
              {"c3_exponential", rep.c3_exponential},
              {"c4_forcing", rep.c4_forcing},
              {"c5_tail", rep.c5_tail},
              {"safety", rep.safety},
              {"r", rep.r},
              {"lambda_star", rep.lambda_star},
              {"rho", rep.rho},
              {"n_star", rep.n_star},
              {"note", "discrete-constant certificate"}};
}

json certificate_to_json(const CoercivityCertificate& cert) {
  return json{{"num_dirs", cert.num_dirs},     {"radius", cert.radius},
              {"rho", cert.rho},               {"min_pairing", cert.min_pairing},
              {"mean_pairing", cert.mean_pairing}, {"pass", cert.pass},
              {"warn_below_half_rho", cert.warn_below_half_rho}, {"seed", cert.seed}};
}

json stage_to_json(const StageRecord& rec) {
  return json{{"level", rec.level},
              {"n", rec.n},
              {"iterations", rec.iterations},
              {"residual_norm", rec.residual_norm},
              {"xi_norm", rec.xi_norm},
              {"diff_from_prev", rec.diff_from_prev}};
}

json SolveReport::to_json() const {
  json j;
  j["config"] = config_echo;
  j["constants"] = constants_to_json(constants);
  j["coercivity_certificate"] = certificate_to_json(certificate);
  j["refinement"] = json::array();
  for (const auto& s : refinement_stages) j["refinement"].push_back(stage_to_json(s));
  j["refinement_diffs"] = refinement_diffs;
  j["refinement_diffs_decreasing"] = refinement_diffs_decreasing;
  j["continuation"] = json::array();
  for (const auto& s : continuation_stages) j["continuation"].push_back(stage_to_json(s));
  j["continuation_diffs"] = continuation_diffs;
  j["final_n"] = final_n;
  j["final_xi_norm"] = final_xi_norm;
  j["ball_radius"] = ball_radius;
  j["a_priori_bound_held"] = a_priori_bound_held;
  j["negative_part"] = {{"pass", negative_part.pass},
                        {"min_nodal", negative_part.min_nodal},
                        {"tolerance", negative_part.tolerance}};
  j["weak_form_defect"] = weak_form_defect;
  j["comparison"] = {{"ran", comparison_ran},
                     {"pass", comparison.pass},
                     {"min_gap", comparison.min_gap},
                     {"slack", comparison.slack_used},
                     {"detail", comparison.detail}};
  j["subsolution"] = {{"energy", subsolution_energy}, {"margin", subsolution_margin}};
  j["force_used"] = force_used;
  j["status"] = status;
  return j;
}

ConstantsReport run_constants(const RunConfig& cfg) {
  cfg.problem.validate();
  const SpacePtr space = make_space(cfg.problem.domain, cfg.max_level);
  const QuadratureRule rule = simplex_rule(cfg.problem.N, cfg.quad_degree);
  ConstantsReport rep =
      compute_constants(cfg.problem, space, cfg.trials, cfg.seed, rule, cfg.safety);
  if (!cfg.force && !(cfg.problem.lambda < rep.lambda_star))
    throw RegimeError("lambda = " + std::to_string(cfg.problem.lambda) +
                          " is not below the certified threshold lambda* = " +
                          std::to_string(rep.lambda_star),
                      rep.lambda_star);
  return rep;
}

PipelineResult run_pipeline(const RunConfig& cfg) {
  cfg.problem.validate();
  PipelineResult out;
  SolveReport& rep = out.report;
  rep.config_echo = cfg.echo();
  rep.force_used = cfg.force;

  const QuadratureRule rule = simplex_rule(cfg.problem.N, cfg.quad_degree);
  const SpacePtr space = make_space(cfg.problem.domain, cfg.max_level);
  if (space->dimension() == 0)
    throw ConfigError("pipeline: the requested level has no interior vertices; refine");

  // constants + regime gate
  rep.constants = compute_constants(cfg.problem, space, cfg.trials, cfg.seed, rule, cfg.safety);
  if (!cfg.force && !(cfg.problem.lambda < rep.constants.lambda_star))
    throw RegimeError("lambda = " + std::to_string(cfg.problem.lambda) +
                          " is not below the certified threshold lambda* = " +
                          std::to_string(rep.constants.lambda_star),
                      rep.constants.lambda_star);

  const double r = rep.constants.r;
  rep.ball_radius = r;
  if (!cfg.n_list.empty() && cfg.n_list.front() < rep.constants.n_star && !cfg.force)
    throw ConfigError("schedule starts at n = " + std::to_string(cfg.n_list.front()) +
                      ", below the certified n* = " + std::to_string(rep.constants.n_star));
  const std::int64_t n0 =
      cfg.n_list.empty() ? std::max<std::int64_t>(rep.constants.n_star, 10) : cfg.n_list.front();

  SolveOptions sopts;
  sopts.tol = cfg.effective_stage_tol();
  sopts.eps_reg = 1e-8 * mesh_width(space->mesh());

  std::string stage = "coercivity_certificate";
  try {
    const RegularizedNonlinearity fn0 = make_fk(cfg.problem.nonlinearity, n0);
    rep.certificate = coercivity_certificate(cfg.problem, fn0, n0, space, r,
                                             rep.constants.rho, cfg.num_dirs, cfg.seed, rule);
    if (!rep.certificate.pass && !cfg.force)
      throw Error("min pairing " + std::to_string(rep.certificate.min_pairing) +
                  " is not positive on the sphere |xi| = r");

    stage = "refine_in_m";
    MRefinementResult mres = refine_in_m(cfg.problem, fn0, n0, space, r, rule, sopts);
    rep.refinement_stages = mres.stages;
    rep.refinement_diffs = mres.diffs;
    rep.refinement_diffs_decreasing = mres.diffs_decreasing;
    // non-monotone increments above the solver noise floor are a failure;
    // at the floor they are indistinguishable from roundoff
    if (!mres.diffs_decreasing && mres.diffs.back() > 100.0 * sopts.tol)
      throw Error("refinement increments not decreasing: " +
                  std::to_string(mres.diffs[mres.diffs.size() - 2]) + " -> " +
                  std::to_string(mres.diffs.back()));

    stage = "continue_in_n";
    ContinuationOptions copts;
    copts.continuation_tol = cfg.continuation_tol;
    copts.weak_form_target = cfg.weak_form_target;
    copts.max_stages = cfg.max_stages;
    copts.seed = cfg.seed;
    std::vector<std::int64_t> schedule =
        cfg.n_list.empty() ? std::vector<std::int64_t>{n0} : cfg.n_list;
    ContinuationResult cres =
        continue_in_n(cfg.problem, mres.space, schedule, mres.xi, r, rule, sopts, copts);
    rep.continuation_stages = cres.stages;
    rep.continuation_diffs = cres.diffs;
    rep.final_n = cres.final_n;
    rep.weak_form_defect = cres.weak_form_defect;

    out.space = mres.space;
    out.xi = cres.xi;
    DiscreteField limit(out.space, out.xi);
    rep.final_xi_norm = limit.wnorm();

    rep.a_priori_bound_held = true;
    for (const auto& s : rep.refinement_stages)
      if (s.xi_norm > r + 1e-12) rep.a_priori_bound_held = false;
    for (const auto& s : rep.continuation_stages)
      if (s.xi_norm > r + 1e-12) rep.a_priori_bound_held = false;

    stage = "negative_part_check";
    rep.negative_part = negative_part_check(limit);
    if (!rep.negative_part.pass)
      throw Error("negative part check failed, min nodal " +
                  std::to_string(rep.negative_part.min_nodal));

    if (cfg.problem.lambda * cfg.problem.a1 > 0.0) {
      stage = "subsolution";
      const SubsolutionField v0 = solve_p5(cfg.problem, out.space, 1e-8, rule);
      rep.subsolution_energy = v0.energy;
      rep.subsolution_margin = v0.positivity_margin;
      out.subsolution = v0.v0;
      stage = "comparison_check";
      rep.comparison = comparison_check(limit, v0, cfg.comparison_slack);
      rep.comparison_ran = true;
      if (!rep.comparison.pass) throw Error("comparison u >= v0 failed: " + rep.comparison.detail);
    }
    rep.status = "ok";
  } catch (const NonConvergence& e) {
    rep.status = stage + ": " + e.what();
  } catch (const Error& e) {
    rep.status = stage + ": " + e.what();
  }
  return out;
}

namespace {

struct SuiteBuilder {
  SuiteResult result;
  explicit SuiteBuilder(std::string name) { result.name = std::move(name); }
  void check(bool ok, const std::string& what) {
    if (ok)
      result.passed++;
    else {
      result.failed++;
      result.failures.push_back(what);
    }
  }
};

std::vector<double> dense_grid(double lo, double hi, int count) {
  std::vector<double> g(count);
  for (int i = 0; i < count; ++i) g[i] = lo + (hi - lo) * i / (count - 1);
  return g;
}

SuiteResult suite_hypothesis_f(const RunConfig& cfg) {
  SuiteBuilder b("hypothesisF");
  const auto grid = default_certificate_grid(3.0);
  try {
    const FReport rep = check_hypothesis_f(cfg.problem.nonlinearity, grid);
    b.check(rep.pass(), "growth certificate violated at " +
                            std::to_string(rep.violations.size()) + " grid points");
  } catch (const Error& e) {
    b.check(false, e.what());
  }
  return b.result;
}

SuiteResult suite_fk(const RunConfig& cfg) {
  SuiteBuilder b("fk");
  const NonlinearitySpec& f = cfg.problem.nonlinearity;
  const auto dense = dense_grid(-3.0, 3.0, 2000);

  // sign + continuity for the configured f at every k
  for (std::int64_t k : {1, 2, 4, 8, 16}) {
    const RegularizedNonlinearity reg = make_fk(f, k);
    bool sign_ok = true;
    for (double s : dense)
      if (s * reg(s) < -1e-300) sign_ok = false;
    b.check(sign_ok, "sign condition failed for k=" + std::to_string(k));
    b.check(breakpoint_continuity_defect(reg) <= 1e-9,
            "breakpoint continuity failed for k=" + std::to_string(k));
  }

  // growth bounds for the configured f, enforced exactly where they are
  // implied: the bound at s is derived through a mean value eta in the
  // window between s and s -+ 1/k, so it is checked only when the growth
  // certificate holds at sampled window points. A certificate that fails
  // near zero (every catalog entry behaving like t there does, for r3 > 1)
  // exempts exactly the small-|s| band and nothing else.
  {
    const double q = f.critical_power();
    auto certificate_holds = [&](double eta) {
      const double product = eta * f.f(eta);
      const double bound =
          f.a3 * std::pow(std::abs(eta), f.r3 + 1.0) * std::exp(f.alpha * std::pow(std::abs(eta), q));
      return product >= -1e-300 && product <= bound * (1.0 + 1e-12) + 1e-300;
    };
    for (std::int64_t k : {1, 2, 4, 8, 16}) {
      const RegularizedNonlinearity reg = make_fk(f, k);
      const double inv = 1.0 / static_cast<double>(k);
      int enforced = 0, violations = 0;
      for (double s : dense) {
        if (s == 0.0) continue;
        const double sgn = s > 0.0 ? 1.0 : -1.0;
        const double base = std::abs(s) <= inv
                                ? inv  // inner regime derives through eta in (1/k, 2/k)
                                : std::min(std::abs(s), static_cast<double>(k));
        bool window_ok = true;
        for (double frac : {0.0, 0.5, 1.0})
          if (!certificate_holds(sgn * (base + frac * inv))) window_ok = false;
        if (!window_ok) continue;
        enforced++;
        const double product = s * reg(s);
        const double expfac = std::pow(2.0, q) * f.alpha;
        const double bound =
            std::abs(s) <= inv
                ? reg.growth_c2() * s * s * std::exp(expfac * std::pow(std::abs(s), q))
                : reg.growth_c1() * std::pow(std::abs(s), f.r3) *
                      std::exp(expfac * std::pow(std::abs(s), q));
        if (product < -1e-300 || product > bound * (1.0 + 1e-12) + 1e-300) violations++;
      }
      b.check(enforced > 0 && violations == 0,
              "windowed growth bounds for configured f, k=" + std::to_string(k) + ": " +
                  std::to_string(violations) + " violations at " + std::to_string(enforced) +
                  " enforceable points");
    }
  }
  // the compliant power reference satisfies the certificate everywhere, so
  // the full two-regime check applies at every k
  const NonlinearitySpec ref = catalog_nonlinearity("power", cfg.problem.N, f.r3, f.a3,
                                                    f.alpha, f.r3);
  for (std::int64_t k : {1, 2, 4, 8, 16}) {
    const GrowthReport g = verify_growth_bounds(make_fk(ref, k), dense);
    b.check(g.pass(), "growth bounds failed for power reference, k=" + std::to_string(k));
  }

  // uniform approximation: the last table entry must be the minimum
  const std::vector<std::int64_t> ks = {1, 4, 16, 64};
  const auto errors = uniform_convergence_errors(f, 2.0, ks);
  b.check(errors.back() <= *std::min_element(errors.begin(), errors.end()) + 1e-30,
          "uniform convergence table does not end at its minimum");

  // G consistency: numerical derivative of G matches f
  const Antiderivative G(f.f);
  bool g_ok = true;
  for (double s : {-1.5, -0.5, 0.25, 0.75, 1.5, 2.5}) {
    const double h = 1e-6 * (1.0 + std::abs(s));
    const double d = (G(s + h) - G(s - h)) / (2.0 * h);
    if (std::abs(d - f.f(s)) > 1e-6 * (1.0 + std::abs(f.f(s)))) g_ok = false;
  }
  b.check(g_ok, "dG/ds does not match f");
  return b.result;
}

SuiteResult suite_norm(const RunConfig& cfg) {
  SuiteBuilder b("norm");
  const int level = std::min(2, cfg.max_level);
  const SpacePtr coarse = make_space(cfg.problem.domain, level);
  const SpacePtr fine = refined(coarse);
  Rng rng(cfg.seed + 17);
  const std::size_t m = coarse->dimension();

  for (int trial = 0; trial < 20; ++trial) {
    Vector x = rng.gaussian_vector(m), y = rng.gaussian_vector(m);
    Vector sum = x;
    add_scaled(sum, 1.0, y);
    const double nx = xi_norm(*coarse, x), ny = xi_norm(*coarse, y);
    const double ns = xi_norm(*coarse, sum);
    b.check(ns <= (nx + ny) * (1.0 + 1e-12), "triangle inequality failed");
    b.check(std::abs(xi_norm(*coarse, scaled(x, -2.5)) - 2.5 * nx) <= 1e-12 * nx,
            "homogeneity failed");
    b.check(nx > 0.0, "definiteness failed on a nonzero vector");

    // nesting: prolongation preserves the norm (exactly for straight-edged
    // domains; the disk boundary moves under refinement)
    const Vector lifted = prolong(coarse, x, fine);
    const double drift = std::abs(xi_norm(*fine, lifted) - nx) / nx;
    b.check(drift <= (cfg.problem.domain == Domain::UnitDisk ? 5e-2 : 1e-13),
            "nesting norm drift " + std::to_string(drift));
  }

  // isometry: |xi|^N equals an independently assembled quadrature of
  // int |grad u|^N (gradient recomputed from nodal values at every point)
  const QuadratureRule high = simplex_rule(cfg.problem.N, 11);
  Vector x = rng.gaussian_vector(m);
  DiscreteField u(coarse, x);
  const SimplexMesh& mesh = coarse->mesh();
  double integral = 0.0;
  for (std::size_t e = 0; e < mesh.element_count(); ++e) {
    const auto basis = mesh.element_basis_gradients(static_cast<int>(e));
    const double scale = mesh.element_volume(static_cast<int>(e)) / high.reference_volume();
    for (std::size_t q = 0; q < high.size(); ++q) {
      double g[3] = {0, 0, 0};
      for (int j = 0; j <= mesh.dim; ++j)
        for (int c = 0; c < mesh.dim; ++c)
          g[c] += u.nodal_values()[mesh.elements[e][j]] * basis[j][c];
      integral += high.weights[q] * scale *
                  std::pow(std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]), cfg.problem.N);
    }
  }
  const double direct = std::pow(xi_norm(*coarse, x), cfg.problem.N);
  b.check(std::abs(integral - direct) <= 1e-10 * std::max(1.0, direct),
          "norm does not match the independent quadrature");
  return b.result;
}

SuiteResult suite_operators(const RunConfig& cfg) {
  SuiteBuilder b("operators");
  const int level = std::min(2, cfg.max_level);
  const SpacePtr space = make_space(cfg.problem.domain, level);
  const QuadratureRule rule = simplex_rule(cfg.problem.N, cfg.quad_degree);
  const std::int64_t n = 25;
  const RegularizedNonlinearity fn = make_fk(cfg.problem.nonlinearity, n);
  Rng rng(cfg.seed + 23);

  for (int trial = 0; trial < 5; ++trial) {
    Vector x = rng.gaussian_vector(space->dimension());
    for (double& v : x) v *= 0.25;
    DiscreteField u(space, x);

    const Vector F = residual(cfg.problem, fn, n, u, rule);
    const double direct = coercivity_pairing(cfg.problem, fn, n, u, rule);
    const double via_dot = dot(F, x);
    b.check(std::abs(direct - via_dot) <= 1e-9 * (1.0 + std::abs(direct)),
            "pairing does not match dot(residual, xi)");

    const PairingSplit split = pairing_decomposition(cfg.problem, fn, n, u, rule);
    b.check(std::abs(split.total() - direct) <= 1e-9 * (1.0 + std::abs(direct)),
            "pairing decomposition does not add up");

    // Hoelder sanity: int |grad u|^{r2} |u| <= ||u||_W^{r2} ||u||_{L^{N/(N-r2)}}
    const SimplexMesh& mesh = space->mesh();
    double lhs = 0.0, unorm_p = 0.0;
    const double p = cfg.problem.N / (cfg.problem.N - cfg.problem.r2);
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
      const double scale = mesh.element_volume(static_cast<int>(e)) / rule.reference_volume();
      for (std::size_t q = 0; q < rule.size(); ++q) {
        double uq = 0.0;
        for (int j = 0; j <= mesh.dim; ++j) {
          const auto& pt = rule.points[q];
          const double lam = j == 0 ? (mesh.dim == 2 ? 1 - pt[0] - pt[1] : 1 - pt[0] - pt[1] - pt[2])
                                    : pt[j - 1];
          uq += lam * u.nodal_values()[mesh.elements[e][j]];
        }
        lhs += rule.weights[q] * scale *
               std::pow(u.element_gradient_norms()[e], cfg.problem.r2) * std::abs(uq);
        unorm_p += rule.weights[q] * scale * std::pow(std::abs(uq), p);
      }
    }
    const double rhs = std::pow(u.wnorm(), cfg.problem.r2) * std::pow(unorm_p, 1.0 / p);
    b.check(lhs <= rhs * (1.0 + 1e-9), "Hoelder bound violated");
  }

  // Jacobian against central differences
  Vector x = rng.gaussian_vector(space->dimension());
  for (double& v : x) v *= 0.25;
  DiscreteField u(space, x);
  const Matrix J = jacobian(cfg.problem, fn, n, u, rule, 1e-8);
  double worst = 0.0;
  const double h = 1e-6;
  for (std::size_t col = 0; col < space->dimension(); ++col) {
    Vector xp = x, xm = x;
    xp[col] += h;
    xm[col] -= h;
    const Vector Fp = residual(cfg.problem, fn, n, DiscreteField(space, xp), rule);
    const Vector Fm = residual(cfg.problem, fn, n, DiscreteField(space, xm), rule);
    double num = 0.0, den = 0.0;
    for (std::size_t row = 0; row < space->dimension(); ++row) {
      const double fd = (Fp[row] - Fm[row]) / (2.0 * h);
      num += (J(row, col) - fd) * (J(row, col) - fd);
      den += fd * fd;
    }
    worst = std::max(worst, std::sqrt(num) / std::max(std::sqrt(den), 1e-14));
  }
  b.check(worst <= 1e-4, "jacobian column error " + std::to_string(worst));
  return b.result;
}

SuiteResult suite_constants(const RunConfig& cfg) {
  SuiteBuilder b("constants");
  b.check(std::abs(alpha_n(2) - 4.0 * 3.14159265358979323846) <= 1e-12, "alpha_2 != 4 pi");
  b.check(std::abs(alpha_n(3) - 3.0 * std::sqrt(4.0 * 3.14159265358979323846)) <= 1e-12,
          "alpha_3 != 3 sqrt(4 pi)");

  const SpacePtr space = make_space(cfg.problem.domain, std::min(3, cfg.max_level));
  const QuadratureRule rule = simplex_rule(cfg.problem.N, cfg.quad_degree);
  const ConstantsReport rep =
      compute_constants(cfg.problem, space, cfg.trials, cfg.seed, rule, cfg.safety);

  const double arg_a =
      1.0 / (2.0 * std::pow(2.0 * rep.c3_exponential * std::pow(rep.l_estimate, 1.0 / cfg.problem.N),
                            1.0 / (cfg.problem.nonlinearity.r3 + 1.0 - cfg.problem.N)));
  const double arg_b = 0.5 * std::pow(rep.alpha_n / (cfg.problem.N * cfg.problem.nonlinearity.alpha),
                                      (cfg.problem.N - 1.0) / cfg.problem.N);
  b.check(rep.r <= arg_a * (1 + 1e-12) && rep.r <= arg_b * (1 + 1e-12),
          "r exceeds one of its defining bounds");
  if (cfg.problem.lambda < rep.lambda_star)
    b.check(rep.rho > 0.0, "rho is not positive although lambda < lambda*");
  if (rep.n_star > 0) {
    const double at = n_star_lhs(rep.n_star, rep.rho, rep.r, cfg.problem, rep.c4_forcing,
                                 rep.c5_tail, rep.domain_measure);
    b.check(at < 0.5 * rep.rho, "tail bound fails at n*");
    if (rep.n_star > 1) {
      const double before = n_star_lhs(rep.n_star - 1, rep.rho, rep.r, cfg.problem,
                                       rep.c4_forcing, rep.c5_tail, rep.domain_measure);
      b.check(before >= 0.5 * rep.rho, "n* is not minimal");
    }
  }
  return b.result;
}

SuiteResult suite_tm(const RunConfig& cfg) {
  SuiteBuilder b("tm");
  const SpacePtr space = make_space(cfg.problem.domain, std::min(3, cfg.max_level));
  const QuadratureRule rule = simplex_rule(cfg.problem.N, cfg.quad_degree);
  const auto family = tm_probe_family(*space, 4, cfg.seed + 31);
  const double measure = space->mesh().total_volume();
  const double a_n = alpha_n(cfg.problem.N);

  const double at_alpha = tm_probe(*space, a_n, family, rule);
  b.check(at_alpha >= measure * (1.0 - 1e-12), "zero probe bound failed (L < 1 territory)");

  const double at_half = tm_probe(*space, 0.5 * a_n, family, rule);
  b.check(at_half <= at_alpha * (1.0 + 1e-12), "probe integral not monotone in sigma");
  return b.result;
}

}  // namespace

std::vector<SuiteResult> run_check_suites(const RunConfig& cfg, const std::string& filter) {
  std::vector<SuiteResult> out;
  auto want = [&](const std::string& name) { return filter.empty() || filter == name; };
  if (want("hypothesisF")) out.push_back(suite_hypothesis_f(cfg));
  if (want("fk")) out.push_back(suite_fk(cfg));
  if (want("norm")) out.push_back(suite_norm(cfg));
  if (want("operators")) out.push_back(suite_operators(cfg));
  if (want("constants")) out.push_back(suite_constants(cfg));
  if (want("tm")) out.push_back(suite_tm(cfg));
  if (out.empty())
    throw ConfigError("unknown suite '" + filter +
                      "' (expected hypothesisF, fk, norm, operators, constants or tm)");
  return out;
}

}  // namespace nlap
