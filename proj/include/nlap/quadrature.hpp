#pragma once

#include <array>
#include <vector>

#include "nlap/linalg.hpp"

namespace nlap {

/// Quadrature rule on the reference simplex (unit triangle or unit
/// tetrahedron). Weights are strictly positive and sum to the reference
/// volume (1/2 resp. 1/6); the rule integrates polynomials of total degree
/// <= `degree` exactly.
struct QuadratureRule {
  int dim = 2;
  int degree = 0;
  std::vector<std::array<double, 3>> points;  // reference coordinates, z unused in 2d
  Vector weights;

  std::size_t size() const { return weights.size(); }
  double reference_volume() const { return dim == 2 ? 0.5 : 1.0 / 6.0; }
};

/// Gauss-Legendre nodes/weights on [0, 1].
void gauss_legendre_01(int n, Vector& nodes, Vector& weights);

/// Positive-weight rule on the reference simplex, exact to total degree
/// `degree`. Built as a collapsed (Duffy) tensor product of Gauss-Legendre
/// rules with the map Jacobian absorbed into the weights.
QuadratureRule simplex_rule(int dim, int degree);

/// Exact integral of x^p * y^q * z^r over the reference simplex.
double simplex_monomial_integral(int dim, int p, int q, int r = 0);

}  // namespace nlap
