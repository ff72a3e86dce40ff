#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nlap/linalg.hpp"

namespace nlap {

enum class Domain { UnitSquare, UnitDisk, UnitCube };

Domain parse_domain(std::string_view name);
std::string domain_name(Domain d);
int domain_dimension(Domain d);

/// Conforming simplicial mesh (triangles for dim 2, tetrahedra for dim 3).
/// Meshes are immutable after construction.
struct SimplexMesh {
  int dim = 2;
  Domain domain = Domain::UnitSquare;
  int level = 0;
  bool structured = true;  // false for meshes built from raw arrays

  std::vector<std::array<double, 3>> vertices;  // z = 0 in 2d
  std::vector<std::array<int, 4>> elements;     // elements[e][3] == -1 for triangles
  std::vector<bool> on_boundary;

  /// Provenance of each vertex relative to the parent mesh: either a copy of
  /// parent vertex `a` (b == -1) or the midpoint of parent edge (a, b).
  struct Origin {
    int a = -1;
    int b = -1;
  };
  std::vector<Origin> origin;  // empty for root meshes

  int nodes_per_element() const { return dim + 1; }
  std::size_t vertex_count() const { return vertices.size(); }
  std::size_t element_count() const { return elements.size(); }
  std::size_t interior_vertex_count() const;

  double element_volume(int e) const;
  double total_volume() const;

  /// Gradients of the P1 barycentric basis functions on element e (constant
  /// vectors, one per local node).
  std::array<std::array<double, 3>, 4> element_basis_gradients(int e) const;

  /// Barycentric coordinates of x with respect to element e.
  std::array<double, 4> barycentric(int e, const std::array<double, 3>& x) const;

  /// Brute-force point location; returns -1 when x lies in no element.
  int locate(const std::array<double, 3>& x, double tol = 1e-12) const;

  std::array<double, 3> centroid() const;
};

SimplexMesh build_mesh(Domain domain, int level);

/// Raw construction for tests and user geometries. Boundary flags derived
/// from face incidence.
SimplexMesh raw_mesh(int dim, std::vector<std::array<double, 3>> vertices,
                     std::vector<std::array<int, 4>> elements);

/// Uniform refinement. Triangle meshes use red refinement; unit-cube meshes
/// rebuild the halved Kuhn grid (the refined elements tile the coarse ones
/// exactly). New boundary vertices of unit-disk meshes are projected onto the
/// circle, so disk refinement is only approximately nested.
SimplexMesh refine(const SimplexMesh& mesh);

/// Throws Error when a mesh invariant fails (non-positive volume, boundary
/// flags inconsistent with face incidence, parent vertices not preserved).
void validate_mesh(const SimplexMesh& mesh);

void write_mesh_csv(const SimplexMesh& mesh, const std::string& vertex_path,
                    const std::string& element_path);

}  // namespace nlap
