#pragma once

#include <memory>
#include <string>
#include <vector>

#include "nlap/mesh.hpp"

namespace nlap {

class GalerkinSpace;
using SpacePtr = std::shared_ptr<const GalerkinSpace>;

/// P1 finite-element space with interior-vertex hat basis. Functions vanish
/// on the boundary; the space dimension m is the number of interior vertices.
/// Spaces built by refinement keep a pointer to the coarser space and an
/// exact prolongation (nodal copy / edge-midpoint average), so the nested
/// family W_1 c W_2 c ... is available with norm-preserving inclusion.
class GalerkinSpace {
 public:
  const SimplexMesh& mesh() const { return mesh_; }
  int level() const { return mesh_.level; }
  std::size_t dimension() const { return dof_to_vertex_.size(); }

  int dof_of_vertex(int v) const { return vertex_to_dof_[v]; }
  int vertex_of_dof(int d) const { return dof_to_vertex_[d]; }

  const SpacePtr& parent() const { return parent_; }

  /// Prolongation of parent coefficients into this space.
  Vector prolong_from_parent(const Vector& coarse_xi) const;

  static SpacePtr create(SimplexMesh mesh, SpacePtr parent = nullptr);

  GalerkinSpace() = default;

 private:
  SimplexMesh mesh_;
  SpacePtr parent_;
  std::vector<int> vertex_to_dof_;  // -1 on boundary
  std::vector<int> dof_to_vertex_;
  // per fine dof: up to two (parent dof, weight) pairs
  struct Pull {
    int dof_a = -1, dof_b = -1;
    double w_a = 0.0, w_b = 0.0;
  };
  std::vector<Pull> pulls_;
};

/// Builds the level-`level` space by refining from level 0, so the whole
/// parent chain is available.
SpacePtr make_space(Domain domain, int level);
SpacePtr refined(const SpacePtr& space);

/// Coefficient-space norm: |xi|_m = || sum xi_j w_j ||_{W^{1,N}_0} with
/// N = mesh dimension. |grad u| is constant per element for P1, so the
/// integral is the exact finite sum of vol_T |grad u|_T^N.
double xi_norm(const GalerkinSpace& space, const Vector& xi);

/// Coefficients of the identical function on a descendant space. `to` must
/// be reachable from `from` through parent links.
Vector prolong(const SpacePtr& from, const Vector& xi, const SpacePtr& to);

/// Piecewise-linear field u = sum xi_j w_j with cached nodal values and
/// per-element gradients. Immutable; build a new field to change xi.
class DiscreteField {
 public:
  DiscreteField(SpacePtr space, Vector xi);

  const GalerkinSpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  const Vector& xi() const { return xi_; }

  const std::vector<double>& nodal_values() const { return nodal_; }
  const std::vector<std::array<double, 3>>& element_gradients() const { return grads_; }
  const std::vector<double>& element_gradient_norms() const { return grad_norms_; }

  double min_nodal() const { return min_nodal_; }
  double max_nodal() const { return max_nodal_; }
  double wnorm() const;

  double evaluate(const std::array<double, 3>& x) const;

 private:
  SpacePtr space_;
  Vector xi_;
  std::vector<double> nodal_;
  std::vector<std::array<double, 3>> grads_;
  std::vector<double> grad_norms_;
  double min_nodal_ = 0.0, max_nodal_ = 0.0;
};

/// Per-vertex CSV export: header then x,y[,z],u rows.
void write_field_csv(const DiscreteField& field, const std::string& path);

}  // namespace nlap
