#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "nlap/galerkin.hpp"

using namespace nlap;

TEST_CASE("unit square level 1: 9 vertices, 8 triangles, 1 interior vertex") {
  const SimplexMesh mesh = build_mesh(Domain::UnitSquare, 1);
  CHECK(mesh.vertex_count() == 9);
  CHECK(mesh.element_count() == 8);
  CHECK(mesh.interior_vertex_count() == 1);
  validate_mesh(mesh);
}

TEST_CASE("unit square level 0: trivial space") {
  const SimplexMesh mesh = build_mesh(Domain::UnitSquare, 0);
  CHECK(mesh.vertex_count() == 4);
  CHECK(mesh.element_count() == 2);
  CHECK(mesh.interior_vertex_count() == 0);
  validate_mesh(mesh);
}

TEST_CASE("unit cube level 1: 27 vertices, 48 tetrahedra, 1 interior vertex") {
  const SimplexMesh mesh = build_mesh(Domain::UnitCube, 1);
  CHECK(mesh.vertex_count() == 27);
  CHECK(mesh.element_count() == 48);
  CHECK(mesh.interior_vertex_count() == 1);
  validate_mesh(mesh);
  CHECK(mesh.total_volume() == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("disk meshes: boundary vertices on the circle, area below pi") {
  const SimplexMesh mesh = build_mesh(Domain::UnitDisk, 3);
  validate_mesh(mesh);
  for (std::size_t v = 0; v < mesh.vertex_count(); ++v)
    if (mesh.on_boundary[v])
      CHECK(std::hypot(mesh.vertices[v][0], mesh.vertices[v][1]) ==
            doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mesh.total_volume() < 3.14159265358979);
  CHECK(mesh.total_volume() > 3.0);
}

TEST_CASE("refinement: level 2 square has 25 vertices, 9 interior") {
  const SpacePtr coarse = make_space(Domain::UnitSquare, 1);
  const SpacePtr fine = refined(coarse);
  CHECK(fine->mesh().vertex_count() == 25);
  CHECK(fine->dimension() == 9);
  validate_mesh(fine->mesh());
}

TEST_CASE("refinement keeps the parent vertex set") {
  for (Domain d : {Domain::UnitSquare, Domain::UnitDisk, Domain::UnitCube}) {
    const SimplexMesh coarse = build_mesh(d, 1);
    const SimplexMesh fine = refine(coarse);
    // every parent vertex appears exactly once among the copied vertices,
    // at its original coordinates (index order may change for cube meshes)
    std::vector<int> copies(coarse.vertex_count(), 0);
    for (std::size_t v = 0; v < fine.vertex_count(); ++v) {
      if (fine.origin[v].b != -1) continue;
      const int parent = fine.origin[v].a;
      copies[parent]++;
      for (int c = 0; c < 3; ++c)
        CHECK(fine.vertices[v][c] ==
              doctest::Approx(coarse.vertices[parent][c]).epsilon(1e-15));
    }
    for (int count : copies) CHECK(count == 1);
  }
}

TEST_CASE("two refinements produce the double refinement's vertex set") {
  const SimplexMesh once = refine(refine(build_mesh(Domain::UnitSquare, 1)));
  const SimplexMesh direct = build_mesh(Domain::UnitSquare, 3);
  auto key_set = [](const SimplexMesh& m) {
    std::set<std::pair<long long, long long>> keys;
    for (const auto& v : m.vertices)
      keys.insert({std::llround(v[0] * 1e12), std::llround(v[1] * 1e12)});
    return keys;
  };
  CHECK(key_set(once) == key_set(direct));
}

TEST_CASE("prolongation reproduces the function exactly on straight domains") {
  for (Domain d : {Domain::UnitSquare, Domain::UnitCube}) {
    const SpacePtr coarse = make_space(d, d == Domain::UnitCube ? 1 : 2);
    const SpacePtr fine = refined(coarse);
    Rng rng(11);
    const Vector xi = rng.gaussian_vector(coarse->dimension());
    const Vector lifted = prolong(coarse, xi, fine);
    const DiscreteField cf(coarse, xi);
    const DiscreteField ff(fine, lifted);
    Rng pts(7);
    for (int t = 0; t < 50; ++t) {
      std::array<double, 3> x = {pts.uniform(0.05, 0.95), pts.uniform(0.05, 0.95), 0.0};
      if (d == Domain::UnitCube) x[2] = pts.uniform(0.05, 0.95);
      CHECK(std::abs(cf.evaluate(x) - ff.evaluate(x)) <= 1e-14);
    }
  }
}

TEST_CASE("prolongation of a single hat: value 1 at the vertex, 1/2 at star midpoints") {
  const SpacePtr coarse = make_space(Domain::UnitSquare, 1);  // one interior vertex
  const SpacePtr fine = refined(coarse);
  Vector xi(coarse->dimension(), 0.0);
  xi[0] = 1.0;
  const Vector lifted = prolong(coarse, xi, fine);
  const DiscreteField ff(fine, lifted);
  int ones = 0, halves = 0, zeros = 0;
  for (std::size_t v = 0; v < fine->mesh().vertex_count(); ++v) {
    const double val = ff.nodal_values()[v];
    if (val == doctest::Approx(1.0).epsilon(1e-15)) ones++;
    else if (val == doctest::Approx(0.5).epsilon(1e-15)) halves++;
    else if (val == 0.0) zeros++;
  }
  CHECK(ones == 1);
  CHECK(halves == 6);  // the interior vertex has 6 incident edges
  CHECK(ones + halves + zeros == static_cast<int>(fine->mesh().vertex_count()));
}

TEST_CASE("prolongation norm preservation") {
  for (Domain d : {Domain::UnitSquare, Domain::UnitCube}) {
    const SpacePtr coarse = make_space(d, d == Domain::UnitCube ? 1 : 2);
    const SpacePtr fine = refined(coarse);
    Rng rng(23);
    for (int t = 0; t < 10; ++t) {
      const Vector xi = rng.gaussian_vector(coarse->dimension());
      const double before = xi_norm(*coarse, xi);
      const double after = xi_norm(*fine, prolong(coarse, xi, fine));
      CHECK(std::abs(after - before) <= 1e-13 * std::max(1.0, before));
    }
  }
}

TEST_CASE("prolong composes across multiple levels") {
  const SpacePtr l1 = make_space(Domain::UnitSquare, 1);
  const SpacePtr l2 = refined(l1);
  const SpacePtr l3 = refined(l2);
  Rng rng(31);
  const Vector xi = rng.gaussian_vector(l1->dimension());
  const Vector direct = prolong(l1, xi, l3);
  const Vector stepwise = prolong(l2, prolong(l1, xi, l2), l3);
  for (std::size_t i = 0; i < direct.size(); ++i) CHECK(direct[i] == stepwise[i]);
  CHECK(xi_norm(*l3, direct) == doctest::Approx(xi_norm(*l1, xi)).epsilon(1e-13));
}

TEST_CASE("prolong: level mismatch is an error") {
  const SpacePtr coarse = make_space(Domain::UnitSquare, 2);
  const SpacePtr fine = refined(coarse);
  const Vector xi(fine->dimension(), 1.0);
  CHECK_THROWS_AS(prolong(fine, xi, coarse), Error);
}

TEST_CASE("xi_norm: zero, homogeneity and the single-hat value 2") {
  const SpacePtr space = make_space(Domain::UnitSquare, 1);
  REQUIRE(space->dimension() == 1);
  CHECK(xi_norm(*space, Vector{0.0}) == 0.0);
  // the center hat on the 2x2 grid: ||grad w||_{L^2} = 2 (stiffness diagonal 4)
  CHECK(xi_norm(*space, Vector{1.0}) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(xi_norm(*space, Vector{2.0}) == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("xi_norm axioms on random samples") {
  const SpacePtr space = make_space(Domain::UnitSquare, 3);
  Rng rng(5);
  for (int t = 0; t < 25; ++t) {
    const Vector x = rng.gaussian_vector(space->dimension());
    const Vector y = rng.gaussian_vector(space->dimension());
    Vector sum = x;
    add_scaled(sum, 1.0, y);
    const double nx = xi_norm(*space, x), ny = xi_norm(*space, y), ns = xi_norm(*space, sum);
    CHECK(ns <= (nx + ny) * (1.0 + 1e-12));
    CHECK(xi_norm(*space, scaled(x, -3.0)) == doctest::Approx(3.0 * nx).epsilon(1e-13));
    CHECK(nx > 0.0);
  }
}

TEST_CASE("xi_norm is the W^{1,3} seminorm on the cube") {
  const SpacePtr space = make_space(Domain::UnitCube, 1);
  REQUIRE(space->dimension() == 1);
  // single hat: sum over elements of vol |grad w|^3, cross-checked against a
  // direct element walk
  const SimplexMesh& mesh = space->mesh();
  const DiscreteField u(space, Vector{1.0});
  double total = 0.0;
  for (std::size_t e = 0; e < mesh.element_count(); ++e)
    total += mesh.element_volume(static_cast<int>(e)) *
             std::pow(u.element_gradient_norms()[e], 3);
  CHECK(xi_norm(*space, Vector{1.0}) == doctest::Approx(std::cbrt(total)).epsilon(1e-13));
}

TEST_CASE("field evaluate matches nodal interpolation") {
  const SpacePtr space = make_space(Domain::UnitSquare, 2);
  Rng rng(3);
  const Vector xi = rng.gaussian_vector(space->dimension());
  const DiscreteField u(space, xi);
  for (std::size_t d = 0; d < space->dimension(); ++d) {
    const auto& x = space->mesh().vertices[space->vertex_of_dof(static_cast<int>(d))];
    CHECK(u.evaluate(x) == doctest::Approx(xi[d]).epsilon(1e-12));
  }
}

TEST_CASE("mesh and field CSV export round out with headers") {
  const SpacePtr space = make_space(Domain::UnitSquare, 1);
  const SimplexMesh& mesh = space->mesh();
  write_mesh_csv(mesh, "test_vertices.csv", "test_elements.csv");
  const DiscreteField u(space, Vector{0.75});
  write_field_csv(u, "test_field.csv");
  std::ifstream vf("test_vertices.csv"), ef("test_elements.csv"), ff("test_field.csv");
  std::string line;
  std::getline(vf, line);
  CHECK(line == "x,y,boundary");
  std::getline(ef, line);
  CHECK(line == "v0,v1,v2");
  std::getline(ff, line);
  CHECK(line == "x,y,u");
  int rows = 0;
  while (std::getline(ff, line)) rows++;
  CHECK(rows == 9);
}

TEST_CASE("raw meshes: boundary flags derived from face incidence") {
  // single reference triangle: everything is boundary, no interior dofs
  const SimplexMesh tri = raw_mesh(
      2, {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 2, -1}});
  CHECK(tri.interior_vertex_count() == 0);
  validate_mesh(tri);
}

TEST_CASE("unsupported domain name raises") {
  CHECK_THROWS_AS(parse_domain("unit_pentagon"), ConfigError);
}
