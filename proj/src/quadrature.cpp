#include "nlap/quadrature.hpp"

#include <cmath>

namespace nlap {

void gauss_legendre_01(int n, Vector& nodes, Vector& weights) {
  if (n < 1) throw Error("gauss_legendre_01: n must be >= 1");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  const double pi = 3.14159265358979323846;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Chebyshev initial guess, Newton on the three-term recurrence.
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[i] = 0.5 * (1.0 - x);  // descending x maps to ascending node
    nodes[n - 1 - i] = 0.5 * (1.0 + x);
    weights[i] = 0.5 * w;
    weights[n - 1 - i] = 0.5 * w;
  }
}

QuadratureRule simplex_rule(int dim, int degree) {
  if (dim != 2 && dim != 3) throw Error("simplex_rule: dim must be 2 or 3");
  if (degree < 1) degree = 1;
  QuadratureRule rule;
  rule.dim = dim;
  rule.degree = degree;

  if (dim == 2) {
    // (u,v) -> (u, v(1-u)), Jacobian (1-u).
    const int nu = (degree + 3) / 2;  // exact to degree+1 in u
    const int nv = (degree + 2) / 2;
    Vector xu, wu, xv, wv;
    gauss_legendre_01(nu, xu, wu);
    gauss_legendre_01(nv, xv, wv);
    for (int i = 0; i < nu; ++i)
      for (int j = 0; j < nv; ++j) {
        const double x = xu[i];
        const double y = xv[j] * (1.0 - xu[i]);
        rule.points.push_back({x, y, 0.0});
        rule.weights.push_back(wu[i] * wv[j] * (1.0 - xu[i]));
      }
  } else {
    // (u,v,w) -> (u, v(1-u), w(1-u)(1-v)), Jacobian (1-u)^2 (1-v).
    const int nu = (degree + 4) / 2;
    const int nv = (degree + 3) / 2;
    const int nw = (degree + 2) / 2;
    Vector xu, wu, xv, wv, xw, ww;
    gauss_legendre_01(nu, xu, wu);
    gauss_legendre_01(nv, xv, wv);
    gauss_legendre_01(nw, xw, ww);
    for (int i = 0; i < nu; ++i)
      for (int j = 0; j < nv; ++j)
        for (int k = 0; k < nw; ++k) {
          const double x = xu[i];
          const double y = xv[j] * (1.0 - xu[i]);
          const double z = xw[k] * (1.0 - xu[i]) * (1.0 - xv[j]);
          rule.points.push_back({x, y, z});
          const double jac = (1.0 - xu[i]) * (1.0 - xu[i]) * (1.0 - xv[j]);
          rule.weights.push_back(wu[i] * wv[j] * ww[k] * jac);
        }
  }
  return rule;
}

double simplex_monomial_integral(int dim, int p, int q, int r) {
  // p! q! r! / (p+q+r+dim)!
  double val = 1.0;
  auto fold = [&](int e) {
    for (int i = 1; i <= e; ++i) val *= static_cast<double>(i);
  };
  fold(p);
  fold(q);
  if (dim == 3) fold(r);
  const int total = p + q + (dim == 3 ? r : 0) + dim;
  for (int i = 1; i <= total; ++i) val /= static_cast<double>(i);
  return val;
}

}  // namespace nlap
