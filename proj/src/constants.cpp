#include "nlap/constants.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace nlap {

namespace {

constexpr double kPi = 3.14159265358979323846;

double ref_lambda_local(const QuadratureRule& rule, std::size_t q, int local) {
  const auto& p = rule.points[q];
  if (local == 0) return rule.dim == 2 ? 1.0 - p[0] - p[1] : 1.0 - p[0] - p[1] - p[2];
  return p[local - 1];
}

/// || sum xi_j w_j ||_{L^p} by element-wise quadrature.
double lp_norm(const GalerkinSpace& space, const Vector& xi, double p,
               const QuadratureRule& rule) {
  const SimplexMesh& mesh = space.mesh();
  std::vector<double> nodal(mesh.vertex_count(), 0.0);
  for (std::size_t d = 0; d < xi.size(); ++d) nodal[space.vertex_of_dof(static_cast<int>(d))] = xi[d];
  double total = 0.0;
  const int npe = mesh.nodes_per_element();
  for (std::size_t e = 0; e < mesh.element_count(); ++e) {
    const double scale = mesh.element_volume(static_cast<int>(e)) / rule.reference_volume();
    for (std::size_t q = 0; q < rule.size(); ++q) {
      double uq = 0.0;
      for (int j = 0; j < npe; ++j)
        uq += ref_lambda_local(rule, q, j) * nodal[mesh.elements[e][j]];
      total += rule.weights[q] * scale * std::pow(std::abs(uq), p);
    }
  }
  return std::pow(total, 1.0 / p);
}

double domain_inradius(Domain d) {
  switch (d) {
    case Domain::UnitSquare: return 0.5;
    case Domain::UnitDisk: return 1.0;
    case Domain::UnitCube: return 0.5;
  }
  return 0.5;
}

double boundary_distance(Domain d, const std::array<double, 3>& x) {
  switch (d) {
    case Domain::UnitSquare:
      return std::min(std::min(x[0], 1.0 - x[0]), std::min(x[1], 1.0 - x[1]));
    case Domain::UnitDisk:
      return 1.0 - std::hypot(x[0], x[1]);
    case Domain::UnitCube:
      return std::min({x[0], 1.0 - x[0], x[1], 1.0 - x[1], x[2], 1.0 - x[2]});
  }
  return 0.0;
}

Vector interpolate_interior(const GalerkinSpace& space,
                            const std::function<double(const std::array<double, 3>&)>& g) {
  Vector xi(space.dimension(), 0.0);
  for (std::size_t d = 0; d < xi.size(); ++d)
    xi[d] = g(space.mesh().vertices[space.vertex_of_dof(static_cast<int>(d))]);
  return xi;
}

double mean_mesh_width(const SimplexMesh& mesh) {
  return std::pow(mesh.total_volume() / static_cast<double>(mesh.element_count()),
                  1.0 / mesh.dim);
}

/// Deterministic probe fields for one space (not yet normalized).
std::vector<Vector> base_probes(const GalerkinSpace& space, int trials, std::uint64_t seed) {
  std::vector<Vector> probes;
  const std::size_t m = space.dimension();
  if (m == 0) throw Error("embedding probes: degenerate space (no interior vertices)");
  auto hat = [&](std::size_t d) {
    Vector v(m, 0.0);
    v[d] = 1.0;
    return v;
  };
  probes.push_back(hat(0));
  if (m > 2) probes.push_back(hat(m / 2));
  if (m > 1) probes.push_back(hat(m - 1));
  probes.push_back(Vector(m, 1.0));

  const Domain dom = space.mesh().domain;
  probes.push_back(interpolate_interior(space, [dom](const std::array<double, 3>& x) {
    if (dom == Domain::UnitDisk) return std::cos(0.5 * kPi * std::hypot(x[0], x[1]));
    double v = std::sin(kPi * x[0]) * std::sin(kPi * x[1]);
    if (dom == Domain::UnitCube) v *= std::sin(kPi * x[2]);
    return v;
  }));
  probes.push_back(interpolate_interior(
      space, [dom](const std::array<double, 3>& x) { return boundary_distance(dom, x); }));

  Rng rng(seed);
  for (int t = 0; t < trials; ++t) {
    Vector v(m);
    for (double& x : v) x = rng.uniform(-1.0, 1.0);
    probes.push_back(std::move(v));
  }
  return probes;
}

}  // namespace

double sphere_surface_measure(int N) {
  if (N < 2) throw Error("sphere_surface_measure: N must be >= 2");
  return 2.0 * std::pow(kPi, 0.5 * N) / std::tgamma(0.5 * N);
}

double alpha_n(int N) {
  const double omega = sphere_surface_measure(N);
  return N * std::pow(omega, 1.0 / (N - 1));
}

double embedding_ratio(const SpacePtr& space, double p, int trials, std::uint64_t seed,
                       const QuadratureRule& rule, double safety) {
  if (!space) throw Error("embedding_ratio: null space");
  if (trials < 1) throw Error("embedding_ratio: trials must be >= 1");
  // chain from root to the target space; coarse probes are prolonged so the
  // sup never shrinks under refinement
  std::vector<SpacePtr> chain;
  for (SpacePtr s = space; s; s = s->parent()) chain.push_back(s);
  std::reverse(chain.begin(), chain.end());

  double best = 0.0;
  std::vector<Vector> probes;
  for (std::size_t li = 0; li < chain.size(); ++li) {
    const GalerkinSpace& s = *chain[li];
    if (li > 0) {
      std::vector<Vector> lifted;
      lifted.reserve(probes.size());
      for (const auto& v : probes) lifted.push_back(s.prolong_from_parent(v));
      probes = std::move(lifted);
    }
    if (s.dimension() > 0) {
      auto fresh = base_probes(s, trials, seed + li);
      for (auto& v : fresh) probes.push_back(std::move(v));
    }
    if (li + 1 < chain.size()) continue;
    for (const auto& v : probes) {
      const double wn = xi_norm(s, v);
      if (!(wn > 0.0)) continue;
      const double ratio = lp_norm(s, v, p, rule) / wn;
      best = std::max(best, ratio);
    }
  }
  return best * safety;
}

double tm_probe(const GalerkinSpace& space, double sigma, const std::vector<Vector>& family,
                const QuadratureRule& rule) {
  const SimplexMesh& mesh = space.mesh();
  const double q_exp = static_cast<double>(mesh.dim) / (mesh.dim - 1);
  const int npe = mesh.nodes_per_element();
  double best = 0.0;
  for (const auto& xi : family) {
    if (xi.size() != space.dimension()) throw Error("tm_probe: probe length mismatch");
    std::vector<double> nodal(mesh.vertex_count(), 0.0);
    for (std::size_t d = 0; d < xi.size(); ++d)
      nodal[space.vertex_of_dof(static_cast<int>(d))] = xi[d];
    double integral = 0.0;
    bool overflow = false;
    for (std::size_t e = 0; e < mesh.element_count() && !overflow; ++e) {
      const double scale = mesh.element_volume(static_cast<int>(e)) / rule.reference_volume();
      for (std::size_t q = 0; q < rule.size(); ++q) {
        double uq = 0.0;
        for (int j = 0; j < npe; ++j)
          uq += ref_lambda_local(rule, q, j) * nodal[mesh.elements[e][j]];
        const double expo = sigma * std::pow(std::abs(uq), q_exp);
        if (expo > 700.0) {
          overflow = true;
          break;
        }
        integral += rule.weights[q] * scale * std::exp(expo);
      }
    }
    best = std::max(best, overflow ? std::numeric_limits<double>::infinity() : integral);
  }
  return best;
}

Vector moser_probe(const GalerkinSpace& space, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw Error("moser_probe: delta must lie in (0,1)");
  const SimplexMesh& mesh = space.mesh();
  const auto center = mesh.centroid();
  const double R = domain_inradius(mesh.domain);
  const double T = std::log(1.0 / delta);
  const double sqrtT = std::sqrt(T);
  Vector xi(space.dimension(), 0.0);
  for (std::size_t d = 0; d < space.dimension(); ++d) {
    const auto& v = mesh.vertices[space.vertex_of_dof(static_cast<int>(d))];
    double rho = 0.0;
    for (int c = 0; c < mesh.dim; ++c) rho += (v[c] - center[c]) * (v[c] - center[c]);
    rho = std::sqrt(rho) / R;
    double val = 0.0;
    if (rho < 1.0) {
      if (rho <= delta)
        val = sqrtT;
      else
        val = std::log(1.0 / rho) / sqrtT;
    }
    xi[d] = val;
  }
  const double wn = xi_norm(space, xi);
  if (!(wn > 0.0)) throw Error("moser_probe: degenerate probe");
  for (double& v : xi) v /= wn;
  return xi;
}

std::vector<Vector> tm_probe_family(const GalerkinSpace& space, int random_count,
                                    std::uint64_t seed) {
  std::vector<Vector> family;
  family.push_back(Vector(space.dimension(), 0.0));  // zero probe: integral = |Omega|
  const double h = mean_mesh_width(space.mesh()) / domain_inradius(space.mesh().domain);
  for (double delta : {2.0 * h, 4.0 * h, 0.25}) {
    if (delta >= 0.9 || delta <= 0.0) continue;
    family.push_back(moser_probe(space, delta));
  }
  const Domain dom = space.mesh().domain;
  Vector bump = [&] {
    Vector v(space.dimension(), 0.0);
    for (std::size_t d = 0; d < v.size(); ++d)
      v[d] = boundary_distance(dom, space.mesh().vertices[space.vertex_of_dof(static_cast<int>(d))]);
    return v;
  }();
  const double bn = xi_norm(space, bump);
  if (bn > 0.0) {
    for (double& v : bump) v /= bn;
    family.push_back(std::move(bump));
  }
  Rng rng(seed);
  for (int t = 0; t < random_count; ++t) {
    Vector v(space.dimension());
    for (double& x : v) x = rng.uniform(-1.0, 1.0);
    const double wn = xi_norm(space, v);
    if (wn > 0.0) {
      for (double& x : v) x /= wn;
      family.push_back(std::move(v));
    }
  }
  return family;
}

double compute_r(double c3_exponential, double l_estimate, const ProblemSpec& spec) {
  const int N = spec.N;
  const double r3 = spec.nonlinearity.r3;
  const double alpha = spec.nonlinearity.alpha;
  if (!(r3 + 1.0 - N > 0.0))
    throw Error("compute_r: hypothesis violation, r3 + 1 must exceed N");
  const double a =
      1.0 / (2.0 * std::pow(2.0 * c3_exponential * std::pow(l_estimate, 1.0 / N),
                            1.0 / (r3 + 1.0 - N)));
  const double b = 0.5 * std::pow(alpha_n(N) / (N * alpha), (N - 1.0) / N);
  return std::min(a, b);
}

double compute_lambda_star(double r, const ProblemSpec& spec, double c1_power,
                           double c2_convection) {
  if (!(r > 0.0)) throw Error("compute_lambda_star: r must be positive");
  const double denom = 2.0 * spec.a1 * c1_power * std::pow(r, spec.r1 + 1.0) +
                       2.0 * spec.a2 * c2_convection * std::pow(r, spec.r2 + 1.0);
  if (denom == 0.0) return std::numeric_limits<double>::infinity();
  return 0.5 * std::pow(r, spec.N) / denom;
}

double rho_margin(double lambda, double r, const ProblemSpec& spec, double c1_power,
                  double c2_convection) {
  return 0.5 * std::pow(r, spec.N) -
         lambda * (spec.a1 * c1_power * std::pow(r, spec.r1 + 1.0) +
                   spec.a2 * c2_convection * std::pow(r, spec.r2 + 1.0));
}

double n_star_lhs(std::int64_t n, double rho, double r, const ProblemSpec& spec,
                  double c4_forcing, double c5_tail, double domain_measure) {
  (void)rho;
  const double nn = static_cast<double>(n);
  const double q = static_cast<double>(spec.N) / (spec.N - 1);
  return c4_forcing * r / nn +
         spec.lambda * spec.a1 * domain_measure / std::pow(nn, spec.r1 + 1.0) +
         c5_tail * std::exp(std::pow(2.0, q) * spec.nonlinearity.alpha) * domain_measure /
             (nn * nn) +
         domain_measure / (nn * nn);
}

std::int64_t compute_n_star(double rho, double r, const ProblemSpec& spec, double c4_forcing,
                            double c5_tail, double domain_measure) {
  if (!(rho > 0.0)) throw Error("compute_n_star: rho must be positive");
  auto lhs = [&](std::int64_t n) {
    return n_star_lhs(n, rho, r, spec, c4_forcing, c5_tail, domain_measure);
  };
  std::int64_t hi = 1;
  while (!(lhs(hi) < 0.5 * rho)) {
    hi *= 2;
    if (hi > (std::int64_t{1} << 60)) throw Error("compute_n_star: tail condition unreachable");
  }
  std::int64_t lo = hi / 2;  // lhs(lo) >= rho/2 (or lo == 0)
  while (lo + 1 < hi) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (lhs(mid) < 0.5 * rho)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

ConstantsReport compute_constants(const ProblemSpec& spec, const SpacePtr& probe_space,
                                  int trials, std::uint64_t seed, const QuadratureRule& rule,
                                  double safety) {
  spec.validate();
  if (!probe_space || probe_space->dimension() == 0)
    throw Error("compute_constants: probe space is degenerate");
  ConstantsReport rep;
  rep.N = spec.N;
  rep.safety = safety;
  rep.omega_nm1 = sphere_surface_measure(spec.N);
  rep.alpha_n = alpha_n(spec.N);
  rep.domain_measure = probe_space->mesh().total_volume();

  const double nprime = static_cast<double>(spec.N) / (spec.N - 1);
  rep.cemb1 = embedding_ratio(probe_space, spec.r1 + 1.0, trials, seed + 1, rule, safety);
  rep.cemb2 = embedding_ratio(probe_space, spec.N / (spec.N - spec.r2), trials, seed + 2, rule,
                              safety);
  rep.cemb3 = embedding_ratio(probe_space, nprime * (spec.nonlinearity.r3 + 1.0), trials,
                              seed + 3, rule, safety);
  rep.cemb4 = embedding_ratio(probe_space, 1.0, trials, seed + 4, rule, safety);
  rep.cemb5 = spec.nonlinearity.a3 * std::pow(2.0, spec.nonlinearity.r3 - 1.0);

  rep.c1_power = std::pow(rep.cemb1, spec.r1 + 1.0);
  rep.c2_convection = rep.cemb2;
  rep.c3_exponential = spec.nonlinearity.a3 * std::pow(2.0, spec.nonlinearity.r3) *
                       std::pow(rep.cemb3, spec.nonlinearity.r3 + 1.0);
  rep.c4_forcing = rep.cemb4;
  rep.c5_tail = rep.cemb5;

  const double observed =
      tm_probe(*probe_space, rep.alpha_n, tm_probe_family(*probe_space, 8, seed + 5), rule);
  rep.l_estimate = std::max(observed / rep.domain_measure, 1.0) * safety;

  rep.r = compute_r(rep.c3_exponential, rep.l_estimate, spec);
  rep.lambda_star = compute_lambda_star(rep.r, spec, rep.c1_power, rep.c2_convection);
  rep.rho = rho_margin(spec.lambda, rep.r, spec, rep.c1_power, rep.c2_convection);
  rep.n_star = rep.rho > 0.0 ? compute_n_star(rep.rho, rep.r, spec, rep.c4_forcing,
                                              rep.c5_tail, rep.domain_measure)
                             : 0;
  return rep;
}

}  // namespace nlap
