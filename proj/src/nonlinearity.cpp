#include "nlap/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace nlap {

namespace {

// 7-point Gauss / 15-point Kronrod pair on [-1, 1].
const double kKronrodNodes[15] = {
    -0.991455371120812639206854697526329, -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926, -0.741531185599394439863864773280788,
    -0.586087235467691130294144838258730, -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245, 0.0,
    0.207784955007898467600689403773245,  0.405845151377397166906606412076961,
    0.586087235467691130294144838258730,  0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,  0.949107912342758524526189684047851,
    0.991455371120812639206854697526329};

const double kKronrodWeights[15] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
    0.204432940075298892414161999234649, 0.190350578064785409913256402421014,
    0.169004726639267902826583426598550, 0.140653259715525918745189590510238,
    0.104790010322250183839876322541518, 0.063092092629978553290700663189204,
    0.022935322010529224963732008058970};

const double kGaussWeights[7] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
    0.381830050505118944950369775488975, 0.279705391489276667901467771423780,
    0.129484966168869693270611432679082};

struct PanelEstimate {
  double value;
  double error;
};

PanelEstimate gk15(const ScalarFn& f, double a, double b) {
  const double h = 0.5 * (b - a);
  const double c = 0.5 * (a + b);
  double kron = 0.0, gauss = 0.0;
  for (int i = 0; i < 15; ++i) {
    const double x = c + h * kKronrodNodes[i];
    const double v = f(x);
    kron += kKronrodWeights[i] * v;
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * v;
  }
  kron *= h;
  gauss *= h;
  return {kron, std::abs(kron - gauss)};
}

double adaptive_gk(const ScalarFn& f, double a, double b, double tol, int depth = 0) {
  const PanelEstimate est = gk15(f, a, b);
  if (!std::isfinite(est.value)) return est.value;
  // absolute tolerance with a machine-relative floor for very large values
  if (est.error <= tol || est.error <= 1e-13 * std::abs(est.value)) return est.value;
  if (depth >= 48)
    throw Error("antiderivative quadrature did not converge on [" + std::to_string(a) + ", " +
                std::to_string(b) + "]; best error estimate " + std::to_string(est.error));
  const double c = 0.5 * (a + b);
  return adaptive_gk(f, a, c, 0.5 * tol, depth + 1) +
         adaptive_gk(f, c, b, 0.5 * tol, depth + 1);
}

}  // namespace

void NonlinearitySpec::validate() const {
  if (dim < 2) throw ConfigError("nonlinearity: N must be >= 2");
  if (!(a3 > 0.0)) throw ConfigError("nonlinearity: a3 must be positive");
  if (!(alpha > 0.0)) throw ConfigError("nonlinearity: alpha must be positive");
  if (!(r3 > dim - 1)) throw ConfigError("nonlinearity: r3 must exceed N-1");
  if (!f) throw ConfigError("nonlinearity: f is not set");
}

FReport check_hypothesis_f(const NonlinearitySpec& spec, std::span<const double> grid) {
  spec.validate();
  if (grid.empty()) throw Error("check_hypothesis_f: empty grid");
  FReport report;
  const double q = spec.critical_power();
  for (double s : grid) {
    if (!std::isfinite(s)) throw Error("check_hypothesis_f: non-finite grid point");
    const double fs = spec.f(s);
    if (!std::isfinite(fs))
      throw Error("check_hypothesis_f: f evaluated non-finite at s = " + std::to_string(s));
    const double product = s * fs;
    const double bound =
        spec.a3 * std::pow(std::abs(s), spec.r3 + 1.0) * std::exp(spec.alpha * std::pow(std::abs(s), q));
    if (product < -1e-300 || product > bound * (1.0 + 1e-12) + 1e-300)
      report.violations.push_back({s, product, bound});
  }
  return report;
}

std::vector<double> default_certificate_grid(double extent) {
  std::vector<double> grid;
  const int m = static_cast<int>(extent);
  for (int i = -m; i <= m; ++i) grid.push_back(static_cast<double>(i));
  return grid;
}

Antiderivative::Antiderivative(ScalarFn f, double abs_tol)
    : f_(std::move(f)), tol_(abs_tol), cache_(std::make_shared<Cache>()) {}

double Antiderivative::panel(long long j) const {
  {
    std::lock_guard<std::mutex> lock(cache_->mu);
    auto it = cache_->panels.find(j);
    if (it != cache_->panels.end()) return it->second;
  }
  const double v =
      adaptive_gk(f_, static_cast<double>(j), static_cast<double>(j + 1), tol_);
  std::lock_guard<std::mutex> lock(cache_->mu);
  cache_->panels.emplace(j, v);
  return v;
}

double Antiderivative::operator()(double s) const {
  if (!std::isfinite(s)) throw Error("antiderivative: non-finite argument");
  if (s == 0.0) return 0.0;
  double total = 0.0;
  if (s > 0.0) {
    const long long full = static_cast<long long>(std::floor(s));
    for (long long j = 0; j < full; ++j) total += panel(j);
    total += adaptive_gk(f_, static_cast<double>(full), s, tol_);
  } else {
    const long long full = static_cast<long long>(std::ceil(s));
    for (long long j = -1; j >= full; --j) total -= panel(j);
    total -= adaptive_gk(f_, s, static_cast<double>(full), tol_);
  }
  return total;
}

double Antiderivative::integrate(double a, double b) const {
  if (a == b) return 0.0;
  return adaptive_gk(f_, a, b, tol_);
}

RegularizedNonlinearity::RegularizedNonlinearity(NonlinearitySpec base, std::int64_t k)
    : base_(std::move(base)), k_(k), G_(base_.f), lazy_(std::make_shared<Lazy>()) {
  if (k_ < 1) throw Error("make_fk: k must be >= 1");
  base_.validate();
  const double kk = static_cast<double>(k_);
  slope_pos_ = kk * kk * G_.integrate(1.0 / kk, 2.0 / kk);
  slope_neg_ = -kk * kk * G_.integrate(-2.0 / kk, -1.0 / kk);
  const double q = base_.critical_power();
  c1_ = base_.a3 * std::pow(2.0, base_.r3);
  c2_ = base_.a3 * std::pow(2.0, base_.r3 - 1.0) * std::exp(std::pow(2.0, q) * base_.alpha);
}

double RegularizedNonlinearity::outer_pos() const {
  std::lock_guard<std::mutex> lock(lazy_->mu);
  if (!lazy_->outer_pos) {
    const double kk = static_cast<double>(k_);
    lazy_->outer_pos = kk * G_.integrate(kk, kk + 1.0 / kk);
  }
  return *lazy_->outer_pos;
}

double RegularizedNonlinearity::outer_neg() const {
  std::lock_guard<std::mutex> lock(lazy_->mu);
  if (!lazy_->outer_neg) {
    const double kk = static_cast<double>(k_);
    lazy_->outer_neg = kk * G_.integrate(-kk - 1.0 / kk, -kk);
  }
  return *lazy_->outer_neg;
}

double RegularizedNonlinearity::operator()(double s) const {
  const double kk = static_cast<double>(k_);
  const double inv = 1.0 / kk;
  if (s >= 0.0) {
    if (s <= inv) return slope_pos_ * s;
    if (s <= kk) return kk * G_.integrate(s, s + inv);
    return outer_pos();
  }
  if (s >= -inv) return slope_neg_ * s;
  if (s >= -kk) return kk * G_.integrate(s - inv, s);
  return outer_neg();
}

double RegularizedNonlinearity::lipschitz_estimate(double M) const {
  if (!(M > 0.0)) throw Error("lipschitz_estimate: M must be positive");
  const double h = M * 1e-6;
  const int samples = 20000;
  double best = 0.0;
  for (int i = 0; i <= samples; ++i) {
    const double s = -M + 2.0 * M * i / samples;
    const double slope = std::abs((*this)(s + h) - (*this)(s)) / h;
    best = std::max(best, slope);
  }
  std::lock_guard<std::mutex> lock(lazy_->mu);
  lazy_->ck = best;
  return best;
}

double RegularizedNonlinearity::stored_lipschitz() const {
  std::lock_guard<std::mutex> lock(lazy_->mu);
  return lazy_->ck;
}

RegularizedNonlinearity make_fk(const NonlinearitySpec& spec, std::int64_t k) {
  return RegularizedNonlinearity(spec, k);
}

double breakpoint_continuity_defect(const RegularizedNonlinearity& reg) {
  const double kk = static_cast<double>(reg.k());
  const double inv = 1.0 / kk;
  const Antiderivative& G = reg.antiderivative();
  double worst = 0.0;
  auto record = [&](double left, double right, double at) {
    const double defect = std::abs(left - right) / (1.0 + std::abs(reg(at)));
    worst = std::max(worst, defect);
  };
  // +-1/k: the linear branch k^2 s [G(2/k)-G(1/k)] against the moving window;
  // at s = -1/k the linear branch evaluates to +k int_{-2/k}^{-1/k} f
  record(kk * kk * inv * G.integrate(inv, 2.0 * inv), kk * G.integrate(inv, inv + inv), inv);
  record(kk * kk * inv * G.integrate(-2.0 * inv, -inv), kk * G.integrate(-inv - inv, -inv),
         -inv);
  // +-k: the moving window against the plateau
  record(kk * G.integrate(kk, kk + inv), reg(kk * (1.0 + 1e-9) + inv), kk);
  record(kk * G.integrate(-kk - inv, -kk), reg(-kk * (1.0 + 1e-9) - inv), -kk);
  return worst;
}

GrowthReport verify_growth_bounds(const RegularizedNonlinearity& reg,
                                  std::span<const double> grid) {
  const NonlinearitySpec& base = reg.base();
  const double q = base.critical_power();
  const double expfac = std::pow(2.0, q) * base.alpha;
  const double inv = 1.0 / static_cast<double>(reg.k());
  bool saw_inner = false, saw_outer = false;
  GrowthReport report;
  for (double s : grid) {
    const double fk = reg(s);
    const double product = s * fk;
    if (product < -1e-300) {
      report.violations.push_back({s, product, 0.0, 0});
      continue;
    }
    const double abss = std::abs(s);
    double bound;
    int regime;
    if (abss <= inv) {
      saw_inner = true;
      regime = 2;
      bound = reg.growth_c2() * abss * abss * std::exp(expfac * std::pow(abss, q));
    } else {
      saw_outer = true;
      regime = 1;
      bound = reg.growth_c1() * std::pow(abss, base.r3) * std::exp(expfac * std::pow(abss, q));
    }
    if (product > bound * (1.0 + 1e-12) + 1e-300) {
      report.violations.push_back({s, product, bound, regime});
      if (bound > 0.0) report.worst_ratio = std::max(report.worst_ratio, product / bound);
    }
  }
  if (!saw_inner || !saw_outer)
    throw Error("verify_growth_bounds: grid must cover both |s| <= 1/k and |s| >= 1/k");
  return report;
}

std::vector<double> uniform_convergence_errors(const NonlinearitySpec& spec, double M,
                                               std::span<const std::int64_t> ks,
                                               int grid_points) {
  spec.validate();
  std::vector<double> errors;
  errors.reserve(ks.size());
  for (std::int64_t k : ks) {
    const RegularizedNonlinearity reg(spec, k);
    double worst = 0.0;
    for (int i = 0; i < grid_points; ++i) {
      const double s = -M + 2.0 * M * i / (grid_points - 1);
      worst = std::max(worst, std::abs(reg(s) - spec.f(s)));
    }
    errors.push_back(worst);
  }
  return errors;
}

NonlinearitySpec catalog_nonlinearity(const std::string& kind, int dim, double p, double a3,
                                      double alpha, double r3) {
  NonlinearitySpec spec;
  spec.dim = dim;
  spec.a3 = a3;
  spec.alpha = alpha;
  spec.r3 = (r3 > 0.0) ? r3 : dim + 1.0;
  spec.name = kind;
  const double q = static_cast<double>(dim) / (dim - 1);
  if (kind == "zero") {
    spec.f = [](double) { return 0.0; };
  } else if (kind == "linear") {
    spec.f = [](double s) { return s > 0.0 ? s : 0.0; };
  } else if (kind == "power") {
    spec.f = [p](double s) { return s > 0.0 ? std::pow(s, p) : 0.0; };
    spec.name = "power(" + std::to_string(p) + ")";
  } else if (kind == "exp_critical") {
    const double a = spec.alpha;
    spec.f = [a, q](double s) { return s > 0.0 ? s * std::exp(a * std::pow(s, q)) : 0.0; };
  } else {
    throw ConfigError("unknown nonlinearity kind '" + kind + "'");
  }
  return spec;
}

namespace {

// Fritsch-Carlson monotone cubic interpolant.
struct Pchip {
  std::vector<double> x, y, d;

  double eval(double s) const {
    if (s <= x.front()) return y.front();
    if (s >= x.back()) return y.back();
    std::size_t hi = std::upper_bound(x.begin(), x.end(), s) - x.begin();
    const std::size_t i = hi - 1;
    const double h = x[i + 1] - x[i];
    const double t = (s - x[i]) / h;
    const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
    const double h10 = t * (1 - t) * (1 - t);
    const double h01 = t * t * (3 - 2 * t);
    const double h11 = t * t * (t - 1);
    return h00 * y[i] + h10 * h * d[i] + h01 * y[i + 1] + h11 * h * d[i + 1];
  }
};

Pchip build_pchip(std::vector<double> x, std::vector<double> y) {
  const std::size_t n = x.size();
  if (n < 2) throw ConfigError("tabulated nonlinearity needs at least two samples");
  for (std::size_t i = 1; i < n; ++i)
    if (!(x[i] > x[i - 1])) throw ConfigError("tabulated nonlinearity samples must be strictly increasing in s");
  std::vector<double> slope(n - 1), d(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) slope[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
  d[0] = slope[0];
  d[n - 1] = slope[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (slope[i - 1] * slope[i] <= 0.0) {
      d[i] = 0.0;
    } else {
      const double w1 = 2.0 * (x[i + 1] - x[i]) + (x[i] - x[i - 1]);
      const double w2 = (x[i + 1] - x[i]) + 2.0 * (x[i] - x[i - 1]);
      d[i] = (w1 + w2) / (w1 / slope[i - 1] + w2 / slope[i]);
    }
  }
  return Pchip{std::move(x), std::move(y), std::move(d)};
}

}  // namespace

NonlinearitySpec tabulated_nonlinearity(const std::vector<double>& s,
                                        const std::vector<double>& fs, int dim, double a3,
                                        double alpha, double r3) {
  if (s.size() != fs.size()) throw ConfigError("tabulated nonlinearity: column length mismatch");
  auto interp = std::make_shared<Pchip>(build_pchip(s, fs));
  NonlinearitySpec spec;
  spec.dim = dim;
  spec.a3 = a3;
  spec.alpha = alpha;
  spec.r3 = r3 > 0.0 ? r3 : dim + 1.0;
  spec.name = "table";
  spec.f = [interp](double v) { return interp->eval(v); };
  return spec;
}

NonlinearitySpec tabulated_nonlinearity_from_csv(const std::string& path, int dim, double a3,
                                                 double alpha, double r3) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open nonlinearity table '" + path + "'");
  std::vector<double> s, fs;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double a, b;
    if (row >> a >> b) {
      s.push_back(a);
      fs.push_back(b);
    }
  }
  return tabulated_nonlinearity(s, fs, dim, a3, alpha, r3);
}

}  // namespace nlap
