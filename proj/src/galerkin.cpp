#include "nlap/galerkin.hpp"

#include <cmath>
#include <fstream>

namespace nlap {

SpacePtr GalerkinSpace::create(SimplexMesh mesh, SpacePtr parent) {
  auto space = std::make_shared<GalerkinSpace>();
  space->mesh_ = std::move(mesh);
  space->parent_ = std::move(parent);
  const auto& m = space->mesh_;
  space->vertex_to_dof_.assign(m.vertex_count(), -1);
  for (std::size_t v = 0; v < m.vertex_count(); ++v) {
    if (!m.on_boundary[v]) {
      space->vertex_to_dof_[v] = static_cast<int>(space->dof_to_vertex_.size());
      space->dof_to_vertex_.push_back(static_cast<int>(v));
    }
  }
  if (space->parent_) {
    if (m.origin.size() != m.vertex_count())
      throw Error("galerkin: refined mesh lacks vertex provenance");
    const GalerkinSpace& coarse = *space->parent_;
    space->pulls_.resize(space->dof_to_vertex_.size());
    for (std::size_t d = 0; d < space->dof_to_vertex_.size(); ++d) {
      const auto& org = m.origin[space->dof_to_vertex_[d]];
      GalerkinSpace::Pull pull;
      if (org.b < 0) {
        pull.dof_a = coarse.dof_of_vertex(org.a);
        pull.w_a = 1.0;
      } else {
        pull.dof_a = coarse.dof_of_vertex(org.a);
        pull.dof_b = coarse.dof_of_vertex(org.b);
        pull.w_a = pull.w_b = 0.5;
      }
      space->pulls_[d] = pull;
    }
  }
  return space;
}

Vector GalerkinSpace::prolong_from_parent(const Vector& coarse_xi) const {
  if (!parent_) throw Error("prolong: space has no parent");
  if (coarse_xi.size() != parent_->dimension())
    throw Error("prolong: coefficient length does not match the coarse space");
  Vector fine(dimension(), 0.0);
  for (std::size_t d = 0; d < pulls_.size(); ++d) {
    const Pull& p = pulls_[d];
    double v = 0.0;
    if (p.dof_a >= 0) v += p.w_a * coarse_xi[p.dof_a];
    if (p.dof_b >= 0) v += p.w_b * coarse_xi[p.dof_b];
    fine[d] = v;
  }
  return fine;
}

SpacePtr make_space(Domain domain, int level) {
  SpacePtr space = GalerkinSpace::create(build_mesh(domain, 0));
  for (int l = 0; l < level; ++l) space = refined(space);
  return space;
}

SpacePtr refined(const SpacePtr& space) {
  if (!space) throw Error("refined: null space");
  return GalerkinSpace::create(refine(space->mesh()), space);
}

double xi_norm(const GalerkinSpace& space, const Vector& xi) {
  if (xi.size() != space.dimension()) throw Error("xi_norm: coefficient length mismatch");
  const SimplexMesh& mesh = space.mesh();
  const int N = mesh.dim;
  double total = 0.0;
  for (std::size_t e = 0; e < mesh.element_count(); ++e) {
    const auto grads = mesh.element_basis_gradients(static_cast<int>(e));
    double g[3] = {0, 0, 0};
    for (int j = 0; j <= N; ++j) {
      const int dof = space.dof_of_vertex(mesh.elements[e][j]);
      if (dof < 0) continue;
      for (int c = 0; c < N; ++c) g[c] += xi[dof] * grads[j][c];
    }
    const double norm = std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]);
    total += mesh.element_volume(static_cast<int>(e)) * std::pow(norm, N);
  }
  return std::pow(total, 1.0 / N);
}

Vector prolong(const SpacePtr& from, const Vector& xi, const SpacePtr& to) {
  if (!from || !to) throw Error("prolong: null space");
  if (to->level() < from->level()) throw Error("prolong: target level below source level");
  // collect the chain to -> ... -> from
  std::vector<const GalerkinSpace*> chain;
  const GalerkinSpace* s = to.get();
  while (s && s != from.get()) {
    chain.push_back(s);
    s = s->parent().get();
  }
  if (s != from.get()) throw Error("prolong: target space is not a refinement of the source");
  Vector v = xi;
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) v = (*it)->prolong_from_parent(v);
  return v;
}

DiscreteField::DiscreteField(SpacePtr space, Vector xi)
    : space_(std::move(space)), xi_(std::move(xi)) {
  if (!space_) throw Error("DiscreteField: null space");
  if (xi_.size() != space_->dimension()) throw Error("DiscreteField: coefficient length mismatch");
  const SimplexMesh& mesh = space_->mesh();
  nodal_.assign(mesh.vertex_count(), 0.0);
  for (std::size_t d = 0; d < xi_.size(); ++d) nodal_[space_->vertex_of_dof(static_cast<int>(d))] = xi_[d];
  min_nodal_ = max_nodal_ = nodal_.empty() ? 0.0 : nodal_[0];
  for (double v : nodal_) {
    min_nodal_ = std::min(min_nodal_, v);
    max_nodal_ = std::max(max_nodal_, v);
  }
  grads_.resize(mesh.element_count());
  grad_norms_.resize(mesh.element_count());
  for (std::size_t e = 0; e < mesh.element_count(); ++e) {
    const auto basis = mesh.element_basis_gradients(static_cast<int>(e));
    std::array<double, 3> g = {0, 0, 0};
    for (int j = 0; j <= mesh.dim; ++j) {
      const double val = nodal_[mesh.elements[e][j]];
      for (int c = 0; c < mesh.dim; ++c) g[c] += val * basis[j][c];
    }
    grads_[e] = g;
    grad_norms_[e] = std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]);
  }
}

double DiscreteField::wnorm() const { return xi_norm(*space_, xi_); }

double DiscreteField::evaluate(const std::array<double, 3>& x) const {
  const SimplexMesh& mesh = space_->mesh();
  const int e = mesh.locate(x, 1e-10);
  if (e < 0) throw Error("DiscreteField::evaluate: point outside the mesh");
  const auto lam = mesh.barycentric(e, x);
  double v = 0.0;
  for (int j = 0; j <= mesh.dim; ++j) v += lam[j] * nodal_[mesh.elements[e][j]];
  return v;
}

void write_field_csv(const DiscreteField& field, const std::string& path) {
  const SimplexMesh& mesh = field.space().mesh();
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << (mesh.dim == 2 ? "x,y,u\n" : "x,y,z,u\n");
  out.precision(17);
  for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
    out << mesh.vertices[v][0] << ',' << mesh.vertices[v][1];
    if (mesh.dim == 3) out << ',' << mesh.vertices[v][2];
    out << ',' << field.nodal_values()[v] << '\n';
  }
}

}  // namespace nlap
