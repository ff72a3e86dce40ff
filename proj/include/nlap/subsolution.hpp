#pragma once

#include "nlap/operators.hpp"

namespace nlap {

/// Positive solution of the auxiliary sublinear problem
///   -div(|grad v|^{N-2} grad v) = lambda a1 v^{r1},  v|_boundary = 0,
/// found by minimizing J(v) = (1/N) int |grad v|^N
///                            - lambda a1/(r1+1) int (v+)^{r1+1}.
struct SubsolutionField {
  DiscreteField v0;
  double energy = 0.0;
  double gradient_norm = 0.0;
  double positivity_margin = 0.0;  // min interior nodal value
  int iterations = 0;
};

double p5_energy(const ProblemSpec& spec, const DiscreteField& v, const QuadratureRule& rule);

/// Gradient of J: the weak residual with the convection, f and forcing terms
/// absent.
Vector p5_gradient(const ProblemSpec& spec, const DiscreteField& v, const QuadratureRule& rule);

struct P5Options {
  int max_iterations = 50000;
  double armijo_c = 1e-4;
  /// the accepted minimizer must satisfy J(v0) < 0 (the zero field is a
  /// critical point; the sublinear well lies strictly below it)
  bool require_negative_energy = true;
};

/// Gradient descent with Armijo line search (Barzilai-Borwein step
/// initialization) from a positive boundary-distance bump. Converges when
/// ||grad J|| <= tol * max(1, ||grad J(v_init)||). Throws Error on
/// convergence to the zero field or iteration exhaustion.
SubsolutionField solve_p5(const ProblemSpec& spec, const SpacePtr& space, double tol,
                          const QuadratureRule& rule, const P5Options& opts = {});

struct ComparisonVerdict {
  bool pass = false;
  double min_gap = 0.0;  // min over nodes of u - v0
  double slack_used = 0.0;
  std::string detail;
};

/// Nodal ordering check u >= v0 (up to slack * (1 + ||v0||_inf)). Fields on
/// different levels are prolonged to the finer space first.
ComparisonVerdict comparison_check(const DiscreteField& u, const SubsolutionField& v0,
                                   double slack = 1e-3);

}  // namespace nlap
