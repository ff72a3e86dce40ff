#include "nlap/operators.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

namespace nlap {

namespace {

int worker_count() {
  static const int n = [] {
    const char* env = std::getenv("NLAP_THREADS");
    if (!env) return 1;
    const int v = std::atoi(env);
    return v > 0 ? v : 1;
  }();
  return n;
}

// Per-element work runs in parallel into disjoint slots; callers reduce the
// slots in element order afterwards, so results do not depend on the worker
// count.
template <typename F>
void parallel_elements(std::size_t count, F&& body) {
  const int workers = std::min<int>(worker_count(), static_cast<int>(count));
  if (workers <= 1) {
    for (std::size_t e = 0; e < count; ++e) body(e);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::atomic<std::size_t> next{0};
  for (int t = 0; t < workers; ++t)
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t e = next.fetch_add(1);
        if (e >= count) break;
        body(e);
      }
    });
  for (auto& th : pool) th.join();
}

double ref_lambda(const QuadratureRule& rule, std::size_t q, int local) {
  const auto& p = rule.points[q];
  if (local == 0) return rule.dim == 2 ? 1.0 - p[0] - p[1] : 1.0 - p[0] - p[1] - p[2];
  return p[local - 1];
}

struct ElementContext {
  const SimplexMesh* mesh;
  const GalerkinSpace* space;
  const DiscreteField* u;
  const QuadratureRule* rule;
  int N;
};

}  // namespace

void ProblemSpec::validate() const {
  if (N != 2 && N != 3) throw ConfigError("problem: N must be 2 or 3");
  if (domain_dimension(domain) != N)
    throw ConfigError("problem: domain dimension does not match N");
  if (lambda < 0.0) throw ConfigError("problem: lambda must be nonnegative");
  if (a1 < 0.0) throw ConfigError("problem: a1 must be nonnegative");
  if (a2 < 0.0) throw ConfigError("problem: a2 must be nonnegative");
  if (!(r1 > 0.0 && r1 < N - 1)) throw ConfigError("problem: r1 must lie in (0, N-1)");
  if (!(r2 > 0.0 && r2 < N - 1)) throw ConfigError("problem: r2 must lie in (0, N-1)");
  NonlinearitySpec nl = nonlinearity;
  nl.dim = N;
  nl.validate();
}

Vector residual(const ProblemSpec& spec, const RegularizedNonlinearity& fn, std::int64_t n,
                const DiscreteField& u, const QuadratureRule& rule) {
  const GalerkinSpace& space = u.space();
  const SimplexMesh& mesh = space.mesh();
  if (space.dimension() < 1) throw Error("residual: space has no interior vertices");
  if (n < 0) throw Error("residual: n must be >= 1 (or 0 to drop the forcing term)");
  const int N = mesh.dim;
  const double inv_n = n > 0 ? 1.0 / static_cast<double>(n) : 0.0;
  const int npe = mesh.nodes_per_element();

  std::vector<std::array<double, 4>> local(mesh.element_count());
  std::atomic<long long> bad_element{-1};

  parallel_elements(mesh.element_count(), [&](std::size_t e) {
    const double vol = mesh.element_volume(static_cast<int>(e));
    const double scale = vol / rule.reference_volume();
    const auto basis = mesh.element_basis_gradients(static_cast<int>(e));
    const auto& gradu = u.element_gradients()[e];
    const double gn = u.element_gradient_norms()[e];
    const double gpow = std::pow(gn, N - 2);
    const double conv = std::pow(gn, spec.r2);
    double acc[4] = {0, 0, 0, 0};
    for (std::size_t q = 0; q < rule.size(); ++q) {
      double uq = 0.0;
      for (int j = 0; j < npe; ++j)
        uq += ref_lambda(rule, q, j) * u.nodal_values()[mesh.elements[e][j]];
      const double up = uq > 0.0 ? uq : 0.0;
      const double fnval = fn(up);
      const double pw = std::pow(up, spec.r1);
      const double zero_order =
          -spec.lambda * (spec.a1 * pw + spec.a2 * conv) - fnval - inv_n;
      if (!std::isfinite(zero_order)) {
        bad_element.store(static_cast<long long>(e));
        return;
      }
      const double w = rule.weights[q] * scale;
      for (int j = 0; j < npe; ++j) {
        double dgrad = 0.0;
        for (int c = 0; c < N; ++c) dgrad += gradu[c] * basis[j][c];
        acc[j] += w * (gpow * dgrad + zero_order * ref_lambda(rule, q, j));
      }
    }
    for (int j = 0; j < npe; ++j) local[e][j] = acc[j];
  });

  if (bad_element.load() >= 0)
    throw Error("residual: non-finite integrand in element " +
                std::to_string(bad_element.load()));

  Vector F(space.dimension(), 0.0);
  for (std::size_t e = 0; e < mesh.element_count(); ++e)
    for (int j = 0; j < npe; ++j) {
      const int dof = space.dof_of_vertex(mesh.elements[e][j]);
      if (dof >= 0) F[dof] += local[e][j];
    }
  return F;
}

namespace {

// Shared integrand of the pairing: test function equal to u itself.
double pairing_contribution(const ProblemSpec& spec, const RegularizedNonlinearity& fn,
                            double inv_n, const DiscreteField& u, const QuadratureRule& rule,
                            std::size_t e, std::size_t q, double& uq_out) {
  const SimplexMesh& mesh = u.space().mesh();
  const int N = mesh.dim;
  const int npe = mesh.nodes_per_element();
  double uq = 0.0;
  for (int j = 0; j < npe; ++j)
    uq += ref_lambda(rule, q, j) * u.nodal_values()[mesh.elements[e][j]];
  uq_out = uq;
  const double up = uq > 0.0 ? uq : 0.0;
  const double gn = u.element_gradient_norms()[e];
  const double value = std::pow(gn, N) -
                       spec.lambda * (spec.a1 * std::pow(up, spec.r1) * uq +
                                      spec.a2 * std::pow(gn, spec.r2) * uq) -
                       fn(up) * uq - inv_n * uq;
  return value;
}

}  // namespace

double coercivity_pairing(const ProblemSpec& spec, const RegularizedNonlinearity& fn,
                          std::int64_t n, const DiscreteField& u, const QuadratureRule& rule) {
  const SimplexMesh& mesh = u.space().mesh();
  const double inv_n = n > 0 ? 1.0 / static_cast<double>(n) : 0.0;
  std::vector<double> local(mesh.element_count(), 0.0);
  std::atomic<long long> bad_element{-1};
  parallel_elements(mesh.element_count(), [&](std::size_t e) {
    const double scale = mesh.element_volume(static_cast<int>(e)) / rule.reference_volume();
    double acc = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      double uq;
      const double v = pairing_contribution(spec, fn, inv_n, u, rule, e, q, uq);
      if (!std::isfinite(v)) {
        bad_element.store(static_cast<long long>(e));
        return;
      }
      acc += rule.weights[q] * scale * v;
    }
    local[e] = acc;
  });
  if (bad_element.load() >= 0)
    throw Error("coercivity_pairing: non-finite integrand in element " +
                std::to_string(bad_element.load()));
  double total = 0.0;
  for (double v : local) total += v;
  return total;
}

PairingSplit pairing_decomposition(const ProblemSpec& spec, const RegularizedNonlinearity& fn,
                                   std::int64_t n, const DiscreteField& u,
                                   const QuadratureRule& rule) {
  const SimplexMesh& mesh = u.space().mesh();
  const double inv_n = n > 0 ? 1.0 / static_cast<double>(n) : 0.0;
  const double threshold = n > 0 ? 1.0 / static_cast<double>(n)
                                 : std::numeric_limits<double>::infinity();
  PairingSplit split;
  for (std::size_t e = 0; e < mesh.element_count(); ++e) {
    const double scale = mesh.element_volume(static_cast<int>(e)) / rule.reference_volume();
    for (std::size_t q = 0; q < rule.size(); ++q) {
      double uq;
      const double v = rule.weights[q] * scale *
                       pairing_contribution(spec, fn, inv_n, u, rule, e, q, uq);
      if (std::abs(uq) >= threshold)
        split.plus_part += v;
      else
        split.minus_part += v;
    }
  }
  return split;
}

Matrix jacobian(const ProblemSpec& spec, const RegularizedNonlinearity& fn, std::int64_t n,
                const DiscreteField& u, const QuadratureRule& rule, double eps_reg) {
  if (!(eps_reg > 0.0)) throw Error("jacobian: eps_reg must be positive");
  const GalerkinSpace& space = u.space();
  const SimplexMesh& mesh = space.mesh();
  const int N = mesh.dim;
  const int npe = mesh.nodes_per_element();
  const std::size_t m = space.dimension();
  (void)n;

  std::vector<std::array<double, 16>> local(mesh.element_count());
  parallel_elements(mesh.element_count(), [&](std::size_t e) {
    const double vol = mesh.element_volume(static_cast<int>(e));
    const double scale = vol / rule.reference_volume();
    const auto basis = mesh.element_basis_gradients(static_cast<int>(e));
    const auto& gradu = u.element_gradients()[e];
    const double gn = u.element_gradient_norms()[e];
    const double greg = std::sqrt(gn * gn + eps_reg * eps_reg);
    double acc[16] = {0};

    // gradient terms are constant on each element
    double dg[4];
    for (int j = 0; j < npe; ++j) {
      dg[j] = 0.0;
      for (int c = 0; c < N; ++c) dg[j] += gradu[c] * basis[j][c];
    }
    for (int i = 0; i < npe; ++i)
      for (int j = 0; j < npe; ++j) {
        double gij = 0.0;
        for (int c = 0; c < N; ++c) gij += basis[i][c] * basis[j][c];
        double val = std::pow(greg, N - 2) * gij;
        if (N > 2) val += (N - 2) * std::pow(greg, N - 4) * dg[i] * dg[j];
        acc[i * 4 + j] += vol * val;
      }

    for (std::size_t q = 0; q < rule.size(); ++q) {
      double uq = 0.0;
      for (int j = 0; j < npe; ++j)
        uq += ref_lambda(rule, q, j) * u.nodal_values()[mesh.elements[e][j]];
      const double up = uq > 0.0 ? uq : 0.0;
      const double w = rule.weights[q] * scale;
      double dpow = 0.0, dfn = 0.0;
      if (uq > 0.0) {
        dpow = spec.r1 * std::pow(up + eps_reg, spec.r1 - 1.0);
        const double step = 1e-6 * (1.0 + std::abs(uq));
        dfn = (fn(up + step) - fn(up - step)) / (2.0 * step);
      }
      const double dconv = spec.r2 * std::pow(greg, spec.r2 - 2.0);
      for (int i = 0; i < npe; ++i) {
        const double li = ref_lambda(rule, q, i);
        for (int j = 0; j < npe; ++j) {
          const double lj = ref_lambda(rule, q, j);
          double val = -spec.lambda * spec.a1 * dpow * li * lj - dfn * li * lj;
          val += -spec.lambda * spec.a2 * dconv * dg[j] * li;
          acc[i * 4 + j] += w * val;
        }
      }
    }
    for (int i = 0; i < 16; ++i) local[e][i] = acc[i];
  });

  Matrix J(m, m, 0.0);
  for (std::size_t e = 0; e < mesh.element_count(); ++e)
    for (int i = 0; i < npe; ++i) {
      const int di = space.dof_of_vertex(mesh.elements[e][i]);
      if (di < 0) continue;
      for (int j = 0; j < npe; ++j) {
        const int dj = space.dof_of_vertex(mesh.elements[e][j]);
        if (dj < 0) continue;
        J(di, dj) += local[e][i * 4 + j];
      }
    }
  return J;
}

Matrix element_laplacian(const SimplexMesh& mesh, int e) {
  const int npe = mesh.nodes_per_element();
  const auto basis = mesh.element_basis_gradients(e);
  const double vol = mesh.element_volume(e);
  Matrix K(npe, npe, 0.0);
  for (int i = 0; i < npe; ++i)
    for (int j = 0; j < npe; ++j) {
      double g = 0.0;
      for (int c = 0; c < mesh.dim; ++c) g += basis[i][c] * basis[j][c];
      K(i, j) = vol * g;
    }
  return K;
}

Matrix assemble_laplacian(const GalerkinSpace& space) {
  const SimplexMesh& mesh = space.mesh();
  const std::size_t m = space.dimension();
  Matrix A(m, m, 0.0);
  for (std::size_t e = 0; e < mesh.element_count(); ++e) {
    const Matrix K = element_laplacian(mesh, static_cast<int>(e));
    for (int i = 0; i <= mesh.dim; ++i) {
      const int di = space.dof_of_vertex(mesh.elements[e][i]);
      if (di < 0) continue;
      for (int j = 0; j <= mesh.dim; ++j) {
        const int dj = space.dof_of_vertex(mesh.elements[e][j]);
        if (dj < 0) continue;
        A(di, dj) += K(i, j);
      }
    }
  }
  return A;
}

Vector assemble_load(const GalerkinSpace& space,
                     const std::function<double(const std::array<double, 3>&)>& g,
                     const QuadratureRule& rule) {
  const SimplexMesh& mesh = space.mesh();
  Vector b(space.dimension(), 0.0);
  const int npe = mesh.nodes_per_element();
  for (std::size_t e = 0; e < mesh.element_count(); ++e) {
    const double scale = mesh.element_volume(static_cast<int>(e)) / rule.reference_volume();
    for (std::size_t q = 0; q < rule.size(); ++q) {
      std::array<double, 3> x = {0, 0, 0};
      for (int j = 0; j < npe; ++j) {
        const double lj = ref_lambda(rule, q, j);
        for (int c = 0; c < mesh.dim; ++c) x[c] += lj * mesh.vertices[mesh.elements[e][j]][c];
      }
      const double gv = g(x) * rule.weights[q] * scale;
      for (int j = 0; j < npe; ++j) {
        const int dof = space.dof_of_vertex(mesh.elements[e][j]);
        if (dof >= 0) b[dof] += gv * ref_lambda(rule, q, j);
      }
    }
  }
  return b;
}

Vector assemble_unit_load(const GalerkinSpace& space, const QuadratureRule& rule) {
  return assemble_load(
      space, [](const std::array<double, 3>&) { return 1.0; }, rule);
}

}  // namespace nlap
