#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "nlap/quadrature.hpp"

using namespace nlap;

TEST_CASE("gauss-legendre nodes integrate polynomials exactly") {
  Vector x, w;
  gauss_legendre_01(4, x, w);
  double sum = 0.0;
  for (double v : w) sum += v;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
  for (int deg = 0; deg <= 7; ++deg) {
    double val = 0.0;
    for (int i = 0; i < 4; ++i) val += w[i] * std::pow(x[i], deg);
    CHECK(val == doctest::Approx(1.0 / (deg + 1)).epsilon(1e-13));
  }
}

TEST_CASE("triangle rule: positive weights summing to the reference area") {
  const QuadratureRule rule = simplex_rule(2, 5);
  double sum = 0.0;
  for (double w : rule.weights) {
    CHECK(w > 0.0);
    sum += w;
  }
  CHECK(sum == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("triangle rule: monomial exactness to the stated degree") {
  const QuadratureRule rule = simplex_rule(2, 5);
  for (int p = 0; p <= 5; ++p)
    for (int q = 0; p + q <= 5; ++q) {
      double val = 0.0;
      for (std::size_t i = 0; i < rule.size(); ++i)
        val += rule.weights[i] * std::pow(rule.points[i][0], p) * std::pow(rule.points[i][1], q);
      CHECK(val == doctest::Approx(simplex_monomial_integral(2, p, q)).epsilon(1e-13));
    }
}

TEST_CASE("tetrahedron rule: weights and monomial exactness") {
  const QuadratureRule rule = simplex_rule(3, 5);
  double sum = 0.0;
  for (double w : rule.weights) {
    CHECK(w > 0.0);
    sum += w;
  }
  CHECK(sum == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  for (int p = 0; p <= 5; ++p)
    for (int q = 0; p + q <= 5; ++q)
      for (int r = 0; p + q + r <= 5; ++r) {
        double val = 0.0;
        for (std::size_t i = 0; i < rule.size(); ++i)
          val += rule.weights[i] * std::pow(rule.points[i][0], p) *
                 std::pow(rule.points[i][1], q) * std::pow(rule.points[i][2], r);
        CHECK(val == doctest::Approx(simplex_monomial_integral(3, p, q, r)).epsilon(1e-12));
      }
}

TEST_CASE("higher-degree rules stay consistent on a smooth integrand") {
  const QuadratureRule lo = simplex_rule(2, 5);
  const QuadratureRule hi = simplex_rule(2, 11);
  auto f = [](double x, double y) { return std::exp(x + 0.5 * y); };
  double a = 0.0, b = 0.0;
  for (std::size_t i = 0; i < lo.size(); ++i)
    a += lo.weights[i] * f(lo.points[i][0], lo.points[i][1]);
  for (std::size_t i = 0; i < hi.size(); ++i)
    b += hi.weights[i] * f(hi.points[i][0], hi.points[i][1]);
  CHECK(a == doctest::Approx(b).epsilon(1e-9));
}
