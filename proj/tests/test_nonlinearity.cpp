#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "nlap/nonlinearity.hpp"

using namespace nlap;

namespace {

NonlinearitySpec exp_critical_full_line() {
  // t exp(t^2) on the whole line (odd); the N=2 certificate (1, 3, 1) holds
  // on the integer sampling grid
  NonlinearitySpec spec;
  spec.f = [](double t) { return t * std::exp(t * t); };
  spec.a3 = 1.0;
  spec.alpha = 1.0;
  spec.r3 = 3.0;
  spec.dim = 2;
  spec.name = "t*exp(t^2)";
  return spec;
}

NonlinearitySpec identity_full_line() {
  NonlinearitySpec spec;
  spec.f = [](double t) { return t; };
  spec.a3 = 1.0;
  spec.alpha = 1.0;
  spec.r3 = 3.0;
  spec.dim = 2;
  spec.name = "t";
  return spec;
}

NonlinearitySpec cubic_exponential() {
  // t^3 exp(t^2) satisfies the growth certificate (1, 3, 1) everywhere:
  // t f(t) = t^4 exp(t^2) <= |t|^4 exp(|t|^2)
  NonlinearitySpec spec;
  spec.f = [](double t) { return t * t * t * std::exp(t * t); };
  spec.a3 = 1.0;
  spec.alpha = 1.0;
  spec.r3 = 3.0;
  spec.dim = 2;
  spec.name = "t^3*exp(t^2)";
  return spec;
}

std::vector<double> dense_grid(double lo, double hi, int count) {
  std::vector<double> g(count);
  for (int i = 0; i < count; ++i) g[i] = lo + (hi - lo) * i / (count - 1);
  return g;
}

}  // namespace

TEST_CASE("hypothesis (F): exponential example passes on the integer grid") {
  const std::vector<double> grid = {-2, -1, 0, 1, 2};
  const FReport rep = check_hypothesis_f(exp_critical_full_line(), grid);
  CHECK(rep.pass());
}

TEST_CASE("hypothesis (F): the zero function saturates the lower bound") {
  const auto rep = check_hypothesis_f(catalog_nonlinearity("zero", 2, 1.0, 1.0, 1.0, 3.0),
                                      default_certificate_grid(3.0));
  CHECK(rep.pass());
}

TEST_CASE("hypothesis (F): sign violation fails at every nonzero point") {
  NonlinearitySpec bad = identity_full_line();
  bad.f = [](double t) { return -t; };
  const std::vector<double> grid = {-2, -1, 0, 1, 2};
  const FReport rep = check_hypothesis_f(bad, grid);
  CHECK_FALSE(rep.pass());
  CHECK(rep.violations.size() == 4);  // every s != 0
}

TEST_CASE("hypothesis (F): non-finite evaluation raises naming the point") {
  NonlinearitySpec bad = identity_full_line();
  bad.f = [](double t) { return t > 1.5 ? std::numeric_limits<double>::infinity() : t; };
  const std::vector<double> grid = {0, 1, 2};
  CHECK_THROWS_WITH_AS(check_hypothesis_f(bad, grid),
                       doctest::Contains("s = 2"), Error);
}

TEST_CASE("antiderivative: G(2) = 2 for f(t) = t, G(0) = 0 exactly") {
  const Antiderivative G([](double t) { return t; });
  CHECK(G(2.0) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(G(0.0) == 0.0);
  CHECK(G(-1.0) == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("antiderivative: closed form for t exp(t^2)") {
  const Antiderivative G([](double t) { return t * std::exp(t * t); });
  CHECK(G(1.0) == doctest::Approx((std::exp(1.0) - 1.0) / 2.0).epsilon(1e-12));
}

TEST_CASE("antiderivative derivative matches f") {
  const auto spec = exp_critical_full_line();
  const Antiderivative G(spec.f);
  for (double s : {-1.5, -0.3, 0.4, 1.1, 2.2}) {
    const double h = 1e-6 * (1.0 + std::abs(s));
    const double d = (G(s + h) - G(s - h)) / (2.0 * h);
    CHECK(d == doctest::Approx(spec.f(s)).epsilon(1e-6));
  }
}

TEST_CASE("f_k branches: closed forms for f(t) = t with k = 2") {
  const auto reg = make_fk(identity_full_line(), 2);
  // interior branch: k[G(s+1/k) - G(s)] = s + 1/(2k)
  CHECK(reg(1.0) == doctest::Approx(1.25).epsilon(1e-13));
  // zero stays zero
  CHECK(reg(0.0) == 0.0);
  // inner negative branch: k^2 s [G(-2/k) - G(-1/k)] = 4 (-0.25) (0.5 - 0.125)
  CHECK(reg(-0.25) == doctest::Approx(-0.375).epsilon(1e-13));
  // plateau: k[G(k+1/k) - G(k)] = k + 1/(2k)
  CHECK(reg(7.0) == doctest::Approx(2.25).epsilon(1e-13));
}

TEST_CASE("f_k: continuity defect at the breakpoints") {
  for (std::int64_t k : {1, 2, 4, 8, 16}) {
    CHECK(breakpoint_continuity_defect(make_fk(exp_critical_full_line(), k)) <= 1e-9);
    CHECK(breakpoint_continuity_defect(make_fk(identity_full_line(), k)) <= 1e-9);
  }
}

TEST_CASE("f_k: sign condition on a dense grid") {
  const auto grid = dense_grid(-3.0, 3.0, 1501);
  for (std::int64_t k : {1, 3, 8}) {
    const auto reg = make_fk(exp_critical_full_line(), k);
    for (double s : grid) CHECK(s * reg(s) >= -1e-300);
  }
}

TEST_CASE("lipschitz estimate: f(t) = t, k = 2 has slope 3/2 on the inner branch") {
  // the inner branch k^2 s [G(2/k) - G(1/k)] has slope k^2 (3 / (2 k^2)) = 1.5
  // for f(t) = t, which dominates the unit slope of the moving-window branch
  const auto reg = make_fk(identity_full_line(), 2);
  CHECK(reg.lipschitz_estimate(2.0) == doctest::Approx(1.5).epsilon(1e-4));
  CHECK(reg.stored_lipschitz() == doctest::Approx(1.5).epsilon(1e-4));
}

TEST_CASE("lipschitz estimate: zero function") {
  const auto reg = make_fk(catalog_nonlinearity("zero", 2, 1.0, 1.0, 1.0, 3.0), 3);
  CHECK(reg.lipschitz_estimate(1.0) == 0.0);
}

TEST_CASE("lipschitz estimate agrees with the pairwise-slope oracle") {
  const auto reg = make_fk(exp_critical_full_line(), 1);
  const double est = reg.lipschitz_estimate(2.0);
  // brute force: max slope over consecutive grid pairs
  const int n = 10000;
  double brute = 0.0;
  double prev_s = -2.0, prev_v = reg(-2.0);
  for (int i = 1; i <= n; ++i) {
    const double s = -2.0 + 4.0 * i / n;
    const double v = reg(s);
    brute = std::max(brute, std::abs(v - prev_v) / (s - prev_s));
    prev_s = s;
    prev_v = v;
  }
  CHECK(est == doctest::Approx(brute).epsilon(0.01));
}

TEST_CASE("growth bounds: exponential example passes at k = 3 on a dense grid") {
  const auto rep = verify_growth_bounds(make_fk(exp_critical_full_line(), 3),
                                        dense_grid(-3.0, 3.0, 2000));
  CHECK(rep.pass());
}

TEST_CASE("growth bounds: stored constants match their closed forms") {
  const auto reg = make_fk(exp_critical_full_line(), 5);
  CHECK(reg.growth_c1() == doctest::Approx(8.0).epsilon(1e-14));            // a3 2^{r3}
  CHECK(reg.growth_c2() == doctest::Approx(4.0 * std::exp(4.0)).epsilon(1e-14));
}

TEST_CASE("growth bounds: plateau point s = 1.5 for f(t) = t with k = 1") {
  const auto reg = make_fk(identity_full_line(), 1);
  // s >= k: plateau value k[G(k+1/k) - G(k)] = 1.5
  CHECK(reg(1.5) == doctest::Approx(1.5).epsilon(1e-13));
  const double product = 1.5 * reg(1.5);
  const double bound = reg.growth_c1() * std::pow(1.5, 3.0) * std::exp(4.0 * std::pow(1.5, 2.0));
  CHECK(product <= bound);
}

TEST_CASE("growth bounds: compliant nonlinearities pass for every k") {
  const auto grid = dense_grid(-3.0, 3.0, 2000);
  for (std::int64_t k : {1, 2, 4, 8, 16}) {
    CHECK(verify_growth_bounds(make_fk(cubic_exponential(), k), grid).pass());
    CHECK(verify_growth_bounds(
              make_fk(catalog_nonlinearity("power", 2, 3.0, 1.0, 1.0, 3.0), k), grid)
              .pass());
  }
}

TEST_CASE("growth bounds: grid must cover both regimes") {
  const std::vector<double> outer_only = {-2.0, -1.0, 1.0, 2.0};
  CHECK_THROWS_AS(verify_growth_bounds(make_fk(exp_critical_full_line(), 4), outer_only),
                  Error);
}

TEST_CASE("uniform convergence: closed-form errors 1/(2k) for f(t) = t") {
  const std::vector<std::int64_t> ks = {1, 2, 4, 8};
  const auto errors = uniform_convergence_errors(identity_full_line(), 1.0, ks);
  REQUIRE(errors.size() == 4);
  CHECK(errors[0] == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(errors[1] == doctest::Approx(0.25).epsilon(1e-10));
  CHECK(errors[2] == doctest::Approx(0.125).epsilon(1e-10));
  CHECK(errors[3] == doctest::Approx(0.0625).epsilon(1e-10));
}

TEST_CASE("uniform convergence: zero function gives zeros") {
  const std::vector<std::int64_t> ks = {1, 4};
  for (double e : uniform_convergence_errors(
           catalog_nonlinearity("zero", 2, 1.0, 1.0, 1.0, 3.0), 2.0, ks))
    CHECK(e == 0.0);
}

TEST_CASE("uniform convergence: exponential example ends at its minimum") {
  // for t exp(t^2) the k = 1 plateau clips the sup error below the k = 4
  // forward-window overshoot (83.3 vs 97.6 on [-2, 2]), so the table is not
  // monotone at the first step; it decreases from k = 4 on and the final
  // entry is the minimum
  const std::vector<std::int64_t> ks = {1, 4, 16, 64};
  const auto errors = uniform_convergence_errors(exp_critical_full_line(), 2.0, ks);
  REQUIRE(errors.size() == 4);
  for (std::size_t i = 2; i < errors.size(); ++i) CHECK(errors[i] < errors[i - 1]);
  CHECK(errors.back() == *std::min_element(errors.begin(), errors.end()));
}

TEST_CASE("monotone approximation along dyadic k for compliant f") {
  const std::vector<std::int64_t> ks = {2, 4, 8, 16, 32};
  for (const auto& spec : {cubic_exponential(),
                           catalog_nonlinearity("power", 2, 3.0, 1.0, 1.0, 3.0)}) {
    const auto errors = uniform_convergence_errors(spec, 2.0, ks);
    for (std::size_t i = 1; i < errors.size(); ++i) CHECK(errors[i] <= errors[i - 1] * (1 + 1e-12));
  }
}

TEST_CASE("catalog: exp_critical matches t exp(alpha t^{N/(N-1)}) on t >= 0") {
  const auto spec = catalog_nonlinearity("exp_critical", 2, 1.0, 1.0, 1.0, 3.0);
  CHECK(spec.f(1.5) == doctest::Approx(1.5 * std::exp(1.5 * 1.5)).epsilon(1e-14));
  CHECK(spec.f(-1.0) == 0.0);
  const auto spec3 = catalog_nonlinearity("exp_critical", 3, 1.0, 1.0, 1.0, 4.0);
  CHECK(spec3.f(2.0) == doctest::Approx(2.0 * std::exp(std::pow(2.0, 1.5))).epsilon(1e-14));
}

TEST_CASE("catalog: unknown kind raises a config error") {
  CHECK_THROWS_AS(catalog_nonlinearity("quintic", 2), ConfigError);
}

TEST_CASE("tabulated nonlinearity: monotone interpolation hits the samples") {
  const std::vector<double> s = {-1.0, 0.0, 0.5, 1.0, 2.0};
  const std::vector<double> fs = {0.0, 0.0, 0.25, 1.0, 4.0};
  const auto spec = tabulated_nonlinearity(s, fs, 2, 1.0, 1.0, 3.0);
  for (std::size_t i = 0; i < s.size(); ++i)
    CHECK(spec.f(s[i]) == doctest::Approx(fs[i]).epsilon(1e-14));
  // monotone data cannot overshoot between samples
  CHECK(spec.f(0.75) >= 0.25);
  CHECK(spec.f(0.75) <= 1.0);
  // constant extension outside the table
  CHECK(spec.f(5.0) == doctest::Approx(4.0));
}
