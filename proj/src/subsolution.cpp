#include "nlap/subsolution.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace nlap {

namespace {

double ref_lambda_local(const QuadratureRule& rule, std::size_t q, int local) {
  const auto& p = rule.points[q];
  if (local == 0) return rule.dim == 2 ? 1.0 - p[0] - p[1] : 1.0 - p[0] - p[1] - p[2];
  return p[local - 1];
}

ProblemSpec p5_spec(const ProblemSpec& spec) {
  ProblemSpec s = spec;
  s.a2 = 0.0;
  s.nonlinearity = catalog_nonlinearity("zero", spec.N);
  return s;
}

}  // namespace

double p5_energy(const ProblemSpec& spec, const DiscreteField& v, const QuadratureRule& rule) {
  const SimplexMesh& mesh = v.space().mesh();
  const int N = mesh.dim;
  const int npe = mesh.nodes_per_element();
  double grad_part = 0.0, power_part = 0.0;
  for (std::size_t e = 0; e < mesh.element_count(); ++e) {
    const double vol = mesh.element_volume(static_cast<int>(e));
    grad_part += vol * std::pow(v.element_gradient_norms()[e], N);
    const double scale = vol / rule.reference_volume();
    for (std::size_t q = 0; q < rule.size(); ++q) {
      double uq = 0.0;
      for (int j = 0; j < npe; ++j)
        uq += ref_lambda_local(rule, q, j) * v.nodal_values()[mesh.elements[e][j]];
      if (uq > 0.0) power_part += rule.weights[q] * scale * std::pow(uq, spec.r1 + 1.0);
    }
  }
  return grad_part / N - spec.lambda * spec.a1 / (spec.r1 + 1.0) * power_part;
}

Vector p5_gradient(const ProblemSpec& spec, const DiscreteField& v, const QuadratureRule& rule) {
  const RegularizedNonlinearity zero = make_fk(catalog_nonlinearity("zero", spec.N), 1);
  return residual(p5_spec(spec), zero, 0, v, rule);
}

SubsolutionField solve_p5(const ProblemSpec& spec, const SpacePtr& space, double tol,
                          const QuadratureRule& rule, const P5Options& opts) {
  if (!(spec.r1 > 0.0 && spec.r1 < spec.N - 1))
    throw Error("solve_p5: r1 must lie in (0, N-1)");
  if (!(spec.lambda * spec.a1 > 0.0))
    throw Error("solve_p5: lambda * a1 must be positive for the sublinear problem");
  if (!space || space->dimension() == 0) throw Error("solve_p5: degenerate space");
  if (!(tol > 0.0)) throw Error("solve_p5: tol must be positive");

  const ProblemSpec sub = p5_spec(spec);
  const std::size_t m = space->dimension();

  // positive boundary-distance bump, unit W-norm
  Vector xi(m, 0.0);
  for (std::size_t d = 0; d < m; ++d) {
    const auto& x = space->mesh().vertices[space->vertex_of_dof(static_cast<int>(d))];
    double dist = 1.0;
    switch (space->mesh().domain) {
      case Domain::UnitSquare:
        dist = std::min(std::min(x[0], 1.0 - x[0]), std::min(x[1], 1.0 - x[1]));
        break;
      case Domain::UnitDisk:
        dist = 1.0 - std::hypot(x[0], x[1]);
        break;
      case Domain::UnitCube:
        dist = std::min({x[0], 1.0 - x[0], x[1], 1.0 - x[1], x[2], 1.0 - x[2]});
        break;
    }
    xi[d] = dist;
  }
  {
    const double wn = xi_norm(*space, xi);
    if (wn > 0.0)
      for (double& v : xi) v /= wn;
  }

  DiscreteField field(space, xi);
  Vector grad = p5_gradient(sub, field, rule);
  double energy = p5_energy(sub, field, rule);
  const double g0 = std::max(1.0, norm2(grad));
  double step = 1.0;
  Vector prev_xi, prev_grad;
  int iter = 0;
  int flat_streak = 0;

  for (; iter < opts.max_iterations; ++iter) {
    const double gn = norm2(grad);
    if (gn <= tol * g0) break;
    // Armijo certifies decrease through the energy, whose resolution in
    // doubles bounds the reachable gradient norm from below
    if (flat_streak >= 5) {
      std::ostringstream msg;
      msg << "solve_p5: stalled at gradient norm " << gn
          << " (energy decrease below double resolution); loosen tol";
      throw Error(msg.str());
    }

    // Barzilai-Borwein initialization, Armijo backtracking safeguard
    if (!prev_xi.empty()) {
      const Vector sx = subtract(field.xi(), prev_xi);
      const Vector sg = subtract(grad, prev_grad);
      const double num = dot(sx, sx);
      const double den = dot(sx, sg);
      if (den > 0.0 && num > 0.0) step = num / den;
    }
    step = std::clamp(step, 1e-12, 1e6);

    prev_xi = field.xi();
    prev_grad = grad;
    const double energy_before = energy;
    double t = step;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      Vector trial = prev_xi;
      add_scaled(trial, -t, grad);
      DiscreteField trial_field(space, std::move(trial));
      const double trial_energy = p5_energy(sub, trial_field, rule);
      if (trial_energy <= energy - opts.armijo_c * t * dot(grad, grad)) {
        field = std::move(trial_field);
        energy = trial_energy;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted)
      throw Error("solve_p5: line search failed at iteration " + std::to_string(iter));
    flat_streak = energy_before - energy <= 0.0 ? flat_streak + 1 : 0;
    grad = p5_gradient(sub, field, rule);
  }

  if (iter >= opts.max_iterations)
    throw Error("solve_p5: no convergence within " + std::to_string(opts.max_iterations) +
                " iterations");

  SubsolutionField out{std::move(field), energy, norm2(grad), 0.0, iter};
  // margin over interior nodes; boundary values are identically zero
  out.positivity_margin = std::numeric_limits<double>::infinity();
  for (double v : out.v0.xi()) out.positivity_margin = std::min(out.positivity_margin, v);
  if (opts.require_negative_energy && !(energy < 0.0))
    throw Error("solve_p5: converged to a degenerate minimizer (J >= 0); "
                "refine the space or increase lambda*a1");
  if (!(out.positivity_margin > 0.0))
    throw Error("solve_p5: minimizer is not interior-positive");
  return out;
}

ComparisonVerdict comparison_check(const DiscreteField& u, const SubsolutionField& v0,
                                   double slack) {
  const DiscreteField* coarse = nullptr;
  const DiscreteField* fine = nullptr;
  Vector lifted;

  if (u.space().level() == v0.v0.space().level() &&
      u.space_ptr().get() == v0.v0.space_ptr().get()) {
    // same space, compare directly
  } else if (u.space().level() >= v0.v0.space().level()) {
    coarse = &v0.v0;
    fine = &u;
  } else {
    coarse = &u;
    fine = &v0.v0;
  }

  ComparisonVerdict verdict;
  verdict.slack_used = slack;
  const double vmax = std::max(std::abs(v0.v0.max_nodal()), std::abs(v0.v0.min_nodal()));
  const double allowance = slack * (1.0 + vmax);

  Vector u_fine, v_fine;
  if (!coarse) {
    u_fine = u.xi();
    v_fine = v0.v0.xi();
  } else {
    lifted = prolong(coarse->space_ptr(), coarse->xi(), fine->space_ptr());
    if (coarse == &u) {
      u_fine = lifted;
      v_fine = fine->xi();
    } else {
      u_fine = fine->xi();
      v_fine = lifted;
    }
  }
  if (u_fine.size() != v_fine.size())
    throw Error("comparison_check: fields are not on comparable spaces");

  double min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < u_fine.size(); ++i)
    min_gap = std::min(min_gap, u_fine[i] - v_fine[i]);
  verdict.min_gap = min_gap;
  verdict.pass = min_gap >= -allowance;
  verdict.detail = "min nodal gap " + std::to_string(min_gap) + ", allowance " +
                   std::to_string(allowance);
  return verdict;
}

}  // namespace nlap
