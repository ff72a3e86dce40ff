#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nlap/linalg.hpp"

namespace nlap {

using ScalarFn = std::function<double(double)>;

/// A reaction nonlinearity f together with its growth certificate
/// (a3, alpha, r3) relative to the space dimension N:
///   0 <= s f(s) <= a3 |s|^{r3+1} exp(alpha |s|^{N/(N-1)})
/// sampled on a validation grid. Catalog functions are zero on the negative
/// half-line unless the user supplies a full-line f.
struct NonlinearitySpec {
  ScalarFn f;
  double a3 = 1.0;
  double alpha = 1.0;
  double r3 = 3.0;
  int dim = 2;  // N
  std::string name = "custom";

  void validate() const;
  /// N/(N-1), the critical exponential power.
  double critical_power() const { return static_cast<double>(dim) / (dim - 1); }
};

struct FViolation {
  double s = 0.0;
  double product = 0.0;  // s*f(s)
  double bound = 0.0;
};

struct FReport {
  std::vector<FViolation> violations;
  bool pass() const { return violations.empty(); }
};

/// Samples the growth certificate on `grid`; a non-finite f value raises an
/// Error naming the sample point.
FReport check_hypothesis_f(const NonlinearitySpec& spec, std::span<const double> grid);

/// Default sampling grid for the certificate: integers away from zero, where
/// exponential-type catalog entries meet their stated growth envelope.
std::vector<double> default_certificate_grid(double extent = 3.0);

/// Antiderivative G(s) = \int_0^s f, adaptive Gauss-Kronrod quadrature with
/// cached unit panels. Safe for concurrent evaluation.
class Antiderivative {
 public:
  explicit Antiderivative(ScalarFn f, double abs_tol = 1e-12);

  double operator()(double s) const;
  /// \int_a^b f by the same adaptive scheme (no panel cache involved).
  double integrate(double a, double b) const;

 private:
  double panel(long long j) const;  // \int_j^{j+1} f, cached

  struct Cache {
    std::mutex mu;
    std::map<long long, double> panels;
  };

  ScalarFn f_;
  double tol_;
  std::shared_ptr<Cache> cache_;
};

struct GrowthViolation {
  double s = 0.0;
  double product = 0.0;
  double bound = 0.0;
  int regime = 0;  // 0 sign, 1 outer (|s|>=1/k), 2 inner (|s|<=1/k)
};

struct GrowthReport {
  std::vector<GrowthViolation> violations;
  double worst_ratio = 0.0;
  bool pass() const { return violations.empty(); }
};

/// Lipschitz regularization f_k of f:
///
///   f_k(s) = -k[G(-k-1/k) - G(-k)]        s <= -k
///            -k[G(s-1/k) - G(s)]          -k <= s <= -1/k
///            k^2 s [G(-2/k) - G(-1/k)]    -1/k <= s <= 0
///            k^2 s [G(2/k) - G(1/k)]      0 <= s <= 1/k
///            k[G(s+1/k) - G(s)]           1/k <= s <= k
///            k[G(k+1/k) - G(k)]           s >= k
///
/// Adjacent branches agree at the breakpoints +-1/k, +-k; evaluation uses the
/// inner branch there. Branch values are computed as k times the integral of
/// f over the width-1/k window, which is the same quantity as the G
/// difference without the cancellation for large k.
class RegularizedNonlinearity {
 public:
  RegularizedNonlinearity(NonlinearitySpec base, std::int64_t k);

  double operator()(double s) const;

  std::int64_t k() const { return k_; }
  const NonlinearitySpec& base() const { return base_; }
  const Antiderivative& antiderivative() const { return G_; }

  /// Growth constants of the regularized sequence: C1 = a3 2^{r3},
  /// C2 = a3 2^{r3-1} exp(2^{N/(N-1)} alpha).
  double growth_c1() const { return c1_; }
  double growth_c2() const { return c2_; }

  /// sup over a dense grid on [-M, M] of |f_k(s+h) - f_k(s)| / h with
  /// h = M*1e-6; the result is cached as the working Lipschitz constant.
  double lipschitz_estimate(double M) const;
  double stored_lipschitz() const;

 private:
  double outer_pos() const;
  double outer_neg() const;

  // Outer plateau values involve f out at |s| ~ k and are computed lazily;
  // for exponential f and large k they overflow to +inf, which evaluation
  // reports as-is (assembly then raises the overflow error).
  struct Lazy {
    std::mutex mu;
    std::optional<double> outer_pos, outer_neg;
    double ck = 0.0;
  };

  NonlinearitySpec base_;
  std::int64_t k_;
  Antiderivative G_;
  double slope_pos_ = 0.0;  // k^2 \int_{1/k}^{2/k} f
  double slope_neg_ = 0.0;  // -k^2 \int_{-2/k}^{-1/k} f
  double c1_ = 0.0, c2_ = 0.0;
  std::shared_ptr<Lazy> lazy_;
};

RegularizedNonlinearity make_fk(const NonlinearitySpec& spec, std::int64_t k);

/// Largest relative disagreement between the two adjacent branch formulas,
/// each evaluated exactly at the breakpoints +-1/k and +-k:
/// max_b |left(b) - right(b)| / (1 + |f_k(b)|).
double breakpoint_continuity_defect(const RegularizedNonlinearity& reg);

/// Checks the two-regime growth bounds with the stored constants:
///   |s| >= 1/k:  0 <= s f_k(s) <= C1 |s|^{r3} exp(2^{N/(N-1)} alpha |s|^{N/(N-1)})
///   |s| <= 1/k:  0 <= s f_k(s) <= C2 |s|^2   exp(2^{N/(N-1)} alpha |s|^{N/(N-1)})
GrowthReport verify_growth_bounds(const RegularizedNonlinearity& reg,
                                  std::span<const double> grid);

/// e_k = sup_{|s|<=M} |f_k(s) - f(s)| on a uniform grid, one entry per k.
std::vector<double> uniform_convergence_errors(const NonlinearitySpec& spec, double M,
                                               std::span<const std::int64_t> ks,
                                               int grid_points = 10000);

/// Built-in catalog: "zero", "linear", "power" (uses p), "exp_critical"
/// (t exp(alpha t^{N/(N-1)}) on t>=0). All are zero on the negative half-line.
NonlinearitySpec catalog_nonlinearity(const std::string& kind, int dim, double p = 1.0,
                                      double a3 = 1.0, double alpha = 1.0, double r3 = 0.0);

/// Tabulated nonlinearity from (s, f(s)) samples with monotone cubic
/// (Fritsch-Carlson) interpolation; constant extension outside the table.
NonlinearitySpec tabulated_nonlinearity(const std::vector<double>& s,
                                        const std::vector<double>& fs, int dim, double a3,
                                        double alpha, double r3);

NonlinearitySpec tabulated_nonlinearity_from_csv(const std::string& path, int dim, double a3,
                                                 double alpha, double r3);

}  // namespace nlap
