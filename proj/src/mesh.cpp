#include "nlap/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <tuple>

namespace nlap {

namespace {

using Edge = std::pair<int, int>;

Edge make_edge(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

std::vector<bool> boundary_flags_from_faces(int dim,
                                            const std::vector<std::array<int, 4>>& elements,
                                            std::size_t nvertices) {
  std::vector<bool> flags(nvertices, false);
  if (dim == 2) {
    std::map<Edge, int> count;
    for (const auto& el : elements)
      for (int i = 0; i < 3; ++i) count[make_edge(el[i], el[(i + 1) % 3])]++;
    for (const auto& [edge, c] : count)
      if (c == 1) {
        flags[edge.first] = true;
        flags[edge.second] = true;
      }
  } else {
    std::map<std::tuple<int, int, int>, int> count;
    for (const auto& el : elements) {
      const int f[4][3] = {{el[0], el[1], el[2]},
                           {el[0], el[1], el[3]},
                           {el[0], el[2], el[3]},
                           {el[1], el[2], el[3]}};
      for (const auto& face : f) {
        std::array<int, 3> v = {face[0], face[1], face[2]};
        std::sort(v.begin(), v.end());
        count[{v[0], v[1], v[2]}]++;
      }
    }
    for (const auto& [face, c] : count)
      if (c == 1) {
        flags[std::get<0>(face)] = true;
        flags[std::get<1>(face)] = true;
        flags[std::get<2>(face)] = true;
      }
  }
  return flags;
}

std::map<Edge, int> edge_incidence(const SimplexMesh& mesh) {
  std::map<Edge, int> count;
  for (const auto& el : mesh.elements)
    for (int i = 0; i < 3; ++i) count[make_edge(el[i], el[(i + 1) % 3])]++;
  return count;
}

}  // namespace

Domain parse_domain(std::string_view name) {
  if (name == "unit_square" || name == "square") return Domain::UnitSquare;
  if (name == "unit_disk" || name == "disk") return Domain::UnitDisk;
  if (name == "unit_cube" || name == "cube") return Domain::UnitCube;
  throw ConfigError("unsupported domain '" + std::string(name) +
                    "' (expected unit_square, unit_disk or unit_cube)");
}

std::string domain_name(Domain d) {
  switch (d) {
    case Domain::UnitSquare: return "unit_square";
    case Domain::UnitDisk: return "unit_disk";
    case Domain::UnitCube: return "unit_cube";
  }
  return "?";
}

int domain_dimension(Domain d) { return d == Domain::UnitCube ? 3 : 2; }

std::size_t SimplexMesh::interior_vertex_count() const {
  std::size_t n = 0;
  for (bool b : on_boundary)
    if (!b) ++n;
  return n;
}

double SimplexMesh::element_volume(int e) const {
  const auto& el = elements[e];
  const auto& p0 = vertices[el[0]];
  const auto& p1 = vertices[el[1]];
  const auto& p2 = vertices[el[2]];
  if (dim == 2) {
    return 0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]));
  }
  const auto& p3 = vertices[el[3]];
  const double a[3] = {p1[0] - p0[0], p1[1] - p0[1], p1[2] - p0[2]};
  const double b[3] = {p2[0] - p0[0], p2[1] - p0[1], p2[2] - p0[2]};
  const double c[3] = {p3[0] - p0[0], p3[1] - p0[1], p3[2] - p0[2]};
  const double det = a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) +
                     a[2] * (b[0] * c[1] - b[1] * c[0]);
  return det / 6.0;
}

double SimplexMesh::total_volume() const {
  double v = 0.0;
  for (std::size_t e = 0; e < elements.size(); ++e) v += element_volume(static_cast<int>(e));
  return v;
}

std::array<std::array<double, 3>, 4> SimplexMesh::element_basis_gradients(int e) const {
  std::array<std::array<double, 3>, 4> grads{};
  const auto& el = elements[e];
  const auto& p0 = vertices[el[0]];
  if (dim == 2) {
    const auto& p1 = vertices[el[1]];
    const auto& p2 = vertices[el[2]];
    const double b00 = p1[0] - p0[0], b01 = p2[0] - p0[0];
    const double b10 = p1[1] - p0[1], b11 = p2[1] - p0[1];
    const double det = b00 * b11 - b01 * b10;
    // rows of B^{-1}
    grads[1] = {b11 / det, -b01 / det, 0.0};
    grads[2] = {-b10 / det, b00 / det, 0.0};
    grads[0] = {-grads[1][0] - grads[2][0], -grads[1][1] - grads[2][1], 0.0};
  } else {
    const auto& p1 = vertices[el[1]];
    const auto& p2 = vertices[el[2]];
    const auto& p3 = vertices[el[3]];
    double B[3][3];
    for (int r = 0; r < 3; ++r) {
      B[r][0] = p1[r] - p0[r];
      B[r][1] = p2[r] - p0[r];
      B[r][2] = p3[r] - p0[r];
    }
    const double det = B[0][0] * (B[1][1] * B[2][2] - B[1][2] * B[2][1]) -
                       B[0][1] * (B[1][0] * B[2][2] - B[1][2] * B[2][0]) +
                       B[0][2] * (B[1][0] * B[2][1] - B[1][1] * B[2][0]);
    // inv(B) rows, cofactor expansion
    const double inv[3][3] = {
        {(B[1][1] * B[2][2] - B[1][2] * B[2][1]) / det,
         (B[0][2] * B[2][1] - B[0][1] * B[2][2]) / det,
         (B[0][1] * B[1][2] - B[0][2] * B[1][1]) / det},
        {(B[1][2] * B[2][0] - B[1][0] * B[2][2]) / det,
         (B[0][0] * B[2][2] - B[0][2] * B[2][0]) / det,
         (B[0][2] * B[1][0] - B[0][0] * B[1][2]) / det},
        {(B[1][0] * B[2][1] - B[1][1] * B[2][0]) / det,
         (B[0][1] * B[2][0] - B[0][0] * B[2][1]) / det,
         (B[0][0] * B[1][1] - B[0][1] * B[1][0]) / det}};
    for (int j = 0; j < 3; ++j) grads[j + 1] = {inv[j][0], inv[j][1], inv[j][2]};
    for (int c = 0; c < 3; ++c)
      grads[0][c] = -grads[1][c] - grads[2][c] - grads[3][c];
  }
  return grads;
}

std::array<double, 4> SimplexMesh::barycentric(int e, const std::array<double, 3>& x) const {
  const auto grads = element_basis_gradients(e);
  const auto& p0 = vertices[elements[e][0]];
  std::array<double, 4> lam{};
  double rest = 0.0;
  for (int j = 1; j <= dim; ++j) {
    double v = 0.0;
    for (int c = 0; c < dim; ++c) v += grads[j][c] * (x[c] - p0[c]);
    lam[j] = v;
    rest += v;
  }
  lam[0] = 1.0 - rest;
  return lam;
}

int SimplexMesh::locate(const std::array<double, 3>& x, double tol) const {
  for (std::size_t e = 0; e < elements.size(); ++e) {
    const auto lam = barycentric(static_cast<int>(e), x);
    bool inside = true;
    for (int j = 0; j <= dim; ++j)
      if (lam[j] < -tol) inside = false;
    if (inside) return static_cast<int>(e);
  }
  return -1;
}

std::array<double, 3> SimplexMesh::centroid() const {
  switch (domain) {
    case Domain::UnitSquare: return {0.5, 0.5, 0.0};
    case Domain::UnitDisk: return {0.0, 0.0, 0.0};
    case Domain::UnitCube: return {0.5, 0.5, 0.5};
  }
  return {0, 0, 0};
}

namespace {

SimplexMesh build_square(int level) {
  SimplexMesh mesh;
  mesh.dim = 2;
  mesh.domain = Domain::UnitSquare;
  mesh.level = level;
  const int n = 1 << level;
  const double h = 1.0 / n;
  auto id = [n](int i, int j) { return i * (n + 1) + j; };
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j)
      mesh.vertices.push_back({i * h, j * h, 0.0});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      // one diagonal direction everywhere, so the P1 stiffness matches the
      // five-point stencil
      mesh.elements.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), -1});
      mesh.elements.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1), -1});
    }
  mesh.on_boundary = boundary_flags_from_faces(2, mesh.elements, mesh.vertices.size());
  return mesh;
}

SimplexMesh build_cube(int level) {
  SimplexMesh mesh;
  mesh.dim = 3;
  mesh.domain = Domain::UnitCube;
  mesh.level = level;
  const int n = 1 << level;
  const double h = 1.0 / n;
  auto id = [n](int i, int j, int k) { return (i * (n + 1) + j) * (n + 1) + k; };
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j)
      for (int k = 0; k <= n; ++k) mesh.vertices.push_back({i * h, j * h, k * h});
  // Kuhn subdivision: one tetrahedron per permutation of the axes, walking
  // from the low corner to the high corner of each cell.
  const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const int base[3] = {i, j, k};
        for (const auto& p : perms) {
          int c[3] = {base[0], base[1], base[2]};
          std::array<int, 4> tet{};
          tet[0] = id(c[0], c[1], c[2]);
          for (int step = 0; step < 3; ++step) {
            c[p[step]] += 1;
            tet[step + 1] = id(c[0], c[1], c[2]);
          }
          mesh.elements.push_back(tet);
        }
      }
  // fix orientations
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    if (mesh.element_volume(static_cast<int>(e)) < 0.0)
      std::swap(mesh.elements[e][2], mesh.elements[e][3]);
  }
  mesh.on_boundary = boundary_flags_from_faces(3, mesh.elements, mesh.vertices.size());
  return mesh;
}

SimplexMesh build_disk(int level) {
  SimplexMesh mesh;
  mesh.dim = 2;
  mesh.domain = Domain::UnitDisk;
  mesh.level = 0;
  mesh.vertices.push_back({0.0, 0.0, 0.0});
  for (int i = 0; i < 4; ++i) {
    const double a = 1.5707963267948966 * i;
    mesh.vertices.push_back({std::cos(a), std::sin(a), 0.0});
  }
  for (int i = 0; i < 4; ++i) mesh.elements.push_back({0, 1 + i, 1 + (i + 1) % 4, -1});
  mesh.on_boundary = boundary_flags_from_faces(2, mesh.elements, mesh.vertices.size());
  for (int l = 0; l < level; ++l) mesh = refine(mesh);
  return mesh;
}

}  // namespace

SimplexMesh build_mesh(Domain domain, int level) {
  if (level < 0) throw Error("build_mesh: level must be >= 0");
  switch (domain) {
    case Domain::UnitSquare: return build_square(level);
    case Domain::UnitCube: return build_cube(level);
    case Domain::UnitDisk: return build_disk(level);
  }
  throw Error("build_mesh: unreachable");
}

SimplexMesh raw_mesh(int dim, std::vector<std::array<double, 3>> vertices,
                     std::vector<std::array<int, 4>> elements) {
  SimplexMesh mesh;
  mesh.dim = dim;
  mesh.structured = false;
  mesh.vertices = std::move(vertices);
  mesh.elements = std::move(elements);
  mesh.on_boundary = boundary_flags_from_faces(dim, mesh.elements, mesh.vertices.size());
  return mesh;
}

namespace {

SimplexMesh refine_triangles(const SimplexMesh& mesh) {
  SimplexMesh fine;
  fine.dim = 2;
  fine.domain = mesh.domain;
  fine.level = mesh.level + 1;
  fine.structured = mesh.structured;
  fine.vertices = mesh.vertices;
  fine.origin.resize(mesh.vertices.size());
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v)
    fine.origin[v] = {static_cast<int>(v), -1};

  const auto incidence = edge_incidence(mesh);
  std::map<Edge, int> midpoint;
  auto midpoint_id = [&](int a, int b) {
    const Edge e = make_edge(a, b);
    auto it = midpoint.find(e);
    if (it != midpoint.end()) return it->second;
    std::array<double, 3> m = {0.5 * (mesh.vertices[a][0] + mesh.vertices[b][0]),
                               0.5 * (mesh.vertices[a][1] + mesh.vertices[b][1]), 0.0};
    auto be = incidence.find(e);
    const bool on_bdry = be != incidence.end() && be->second == 1;
    if (on_bdry && mesh.domain == Domain::UnitDisk && mesh.structured) {
      const double r = std::hypot(m[0], m[1]);
      if (r > 0.0) {
        m[0] /= r;
        m[1] /= r;
      }
    }
    const int id = static_cast<int>(fine.vertices.size());
    fine.vertices.push_back(m);
    fine.origin.push_back({e.first, e.second});
    midpoint.emplace(e, id);
    return id;
  };

  for (const auto& el : mesh.elements) {
    const int a = el[0], b = el[1], c = el[2];
    const int ab = midpoint_id(a, b);
    const int bc = midpoint_id(b, c);
    const int ca = midpoint_id(c, a);
    fine.elements.push_back({a, ab, ca, -1});
    fine.elements.push_back({ab, b, bc, -1});
    fine.elements.push_back({ca, bc, c, -1});
    fine.elements.push_back({ab, bc, ca, -1});
  }
  fine.on_boundary = boundary_flags_from_faces(2, fine.elements, fine.vertices.size());
  return fine;
}

SimplexMesh refine_cube(const SimplexMesh& mesh) {
  SimplexMesh fine = build_cube(mesh.level + 1);
  const int n = 1 << (mesh.level + 1);
  const int nc = 1 << mesh.level;
  auto coarse_id = [nc](int i, int j, int k) { return (i * (nc + 1) + j) * (nc + 1) + k; };
  fine.origin.resize(fine.vertices.size());
  int idx = 0;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j)
      for (int k = 0; k <= n; ++k, ++idx) {
        if (i % 2 == 0 && j % 2 == 0 && k % 2 == 0) {
          fine.origin[idx] = {coarse_id(i / 2, j / 2, k / 2), -1};
        } else {
          // midpoint of the coarse edge running from the floored to the
          // ceiled corner; that diagonal is an edge of the Kuhn triangulation
          const int a = coarse_id(i / 2, j / 2, k / 2);
          const int b = coarse_id((i + 1) / 2, (j + 1) / 2, (k + 1) / 2);
          fine.origin[idx] = {a, b};
        }
      }
  return fine;
}

}  // namespace

SimplexMesh refine(const SimplexMesh& mesh) {
  if (mesh.dim == 2) return refine_triangles(mesh);
  if (mesh.domain == Domain::UnitCube && mesh.structured) return refine_cube(mesh);
  throw Error("refine: 3d refinement is supported for structured unit-cube meshes only");
}

void validate_mesh(const SimplexMesh& mesh) {
  if (mesh.vertices.empty() || mesh.elements.empty()) throw Error("mesh: empty");
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    if (!(mesh.element_volume(static_cast<int>(e)) > 0.0))
      throw Error("mesh: non-positive volume in element " + std::to_string(e));
    for (int j = 0; j <= mesh.dim; ++j) {
      const int v = mesh.elements[e][j];
      if (v < 0 || v >= static_cast<int>(mesh.vertices.size()))
        throw Error("mesh: vertex index out of range in element " + std::to_string(e));
    }
  }
  const auto flags = boundary_flags_from_faces(mesh.dim, mesh.elements, mesh.vertices.size());
  if (flags != mesh.on_boundary) throw Error("mesh: boundary flags inconsistent with face incidence");
}

void write_mesh_csv(const SimplexMesh& mesh, const std::string& vertex_path,
                    const std::string& element_path) {
  std::ofstream vf(vertex_path);
  if (!vf) throw Error("cannot open '" + vertex_path + "' for writing");
  vf << (mesh.dim == 2 ? "x,y,boundary\n" : "x,y,z,boundary\n");
  vf.precision(17);
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    vf << mesh.vertices[v][0] << ',' << mesh.vertices[v][1];
    if (mesh.dim == 3) vf << ',' << mesh.vertices[v][2];
    vf << ',' << (mesh.on_boundary[v] ? 1 : 0) << '\n';
  }
  std::ofstream ef(element_path);
  if (!ef) throw Error("cannot open '" + element_path + "' for writing");
  ef << (mesh.dim == 2 ? "v0,v1,v2\n" : "v0,v1,v2,v3\n");
  for (const auto& el : mesh.elements) {
    ef << el[0] << ',' << el[1] << ',' << el[2];
    if (mesh.dim == 3) ef << ',' << el[3];
    ef << '\n';
  }
}

}  // namespace nlap
