#pragma once

#include <cstdint>
#include <functional>

#include "nlap/galerkin.hpp"
#include "nlap/nonlinearity.hpp"
#include "nlap/quadrature.hpp"

namespace nlap {

/// Problem data for
///   -div(|grad u|^{N-2} grad u) = lambda (a1 (u+)^{r1} + a2 |grad u|^{r2}) + f(u)
/// on the chosen domain with zero Dirichlet boundary values.
struct ProblemSpec {
  int N = 2;  // equals the space dimension
  Domain domain = Domain::UnitSquare;
  double lambda = 0.0;
  double a1 = 1.0;
  double a2 = 0.0;
  double r1 = 0.5;
  double r2 = 0.5;
  NonlinearitySpec nonlinearity;

  void validate() const;
};

/// Residual of the regularized Galerkin system. With n >= 1:
///   F_j = int |grad u|^{N-2} grad u . grad w_j
///         - lambda ( a1 int (u+)^{r1} w_j + a2 int |grad u|^{r2} w_j )
///         - int f_n(u+) w_j - (1/n) int w_j
/// n == 0 drops the 1/n forcing term (the n -> infinity form) while keeping
/// the supplied f_n. A non-finite integrand raises Error naming the element.
Vector residual(const ProblemSpec& spec, const RegularizedNonlinearity& fn, std::int64_t n,
                const DiscreteField& u, const QuadratureRule& rule);

/// <F(xi), xi> assembled directly by quadrature (not by dotting the residual).
double coercivity_pairing(const ProblemSpec& spec, const RegularizedNonlinearity& fn,
                          std::int64_t n, const DiscreteField& u, const QuadratureRule& rule);

struct PairingSplit {
  double plus_part = 0.0;   // quadrature points with |u| >= 1/n
  double minus_part = 0.0;  // quadrature points with |u| <  1/n
  double total() const { return plus_part + minus_part; }
};

/// Splits the pairing integrand by the set |u(x)| >= 1/n. The parts sum to
/// coercivity_pairing exactly (same points, same weights).
PairingSplit pairing_decomposition(const ProblemSpec& spec, const RegularizedNonlinearity& fn,
                                   std::int64_t n, const DiscreteField& u,
                                   const QuadratureRule& rule);

/// Derivative of the residual for Newton steps. The degenerate N-Laplacian
/// and convection factors use |grad u| ~ sqrt(|grad u|^2 + eps_reg^2) and the
/// sublinear power uses the surrogate r1 (u+ + eps_reg)^{r1-1}; f_n is
/// differentiated by central differences with step 1e-6 (1+|u|). The residual
/// itself is never regularized.
Matrix jacobian(const ProblemSpec& spec, const RegularizedNonlinearity& fn, std::int64_t n,
                const DiscreteField& u, const QuadratureRule& rule, double eps_reg);

/// Local P1 Laplacian (stiffness) matrix of one element.
Matrix element_laplacian(const SimplexMesh& mesh, int e);

/// Interior-dof stiffness matrix of the 2-Laplacian (linear Poisson oracle).
Matrix assemble_laplacian(const GalerkinSpace& space);

/// Load vector int g(x) w_j dx by element-wise quadrature.
Vector assemble_load(const GalerkinSpace& space,
                     const std::function<double(const std::array<double, 3>&)>& g,
                     const QuadratureRule& rule);

/// int_Omega w_j dx for every interior hat.
Vector assemble_unit_load(const GalerkinSpace& space, const QuadratureRule& rule);

}  // namespace nlap
