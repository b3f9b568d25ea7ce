#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "anisoflow/error.hpp"
#include "anisoflow/mesh.hpp"
#include "anisoflow/recovery.hpp"
#include "anisoflow/vtk.hpp"

using namespace anisoflow;

namespace {

const std::string kFixtures = ANISOFLOW_FIXTURES;

ScalarField sample(const TriMesh& mesh, double (*f)(double, double)) {
  ScalarField out(mesh.num_nodes());
  for (Index i = 0; i < mesh.num_nodes(); ++i) out[i] = f(mesh.nodes(0, i), mesh.nodes(1, i));
  return out;
}

double max_edge(const TriMesh& mesh) {
  double worst = 0.0;
  for (Index t = 0; t < mesh.num_triangles(); ++t) worst = std::max(worst, mesh.longest_edge(t));
  return worst;
}

bool interior(const TriMesh& mesh, Index i, double margin) {
  const Eigen::Vector2d p = mesh.node(i);
  return p.x() > margin && p.x() < mesh.domain.xmax - margin && p.y() > margin && p.y() < mesh.domain.ymax - margin;
}

/// Perturbed interior nodes of a structured grid: an irregular mesh for
/// reproduction checks.
TriMesh jittered(double h, unsigned seed) {
  TriMesh mesh = generate_rect_mesh(1.0, 1.0, h);
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-0.2 * h, 0.2 * h);
  for (Index i = 0; i < mesh.num_nodes(); ++i) {
    if (interior(mesh, i, 1e-12)) mesh.nodes.col(i) += Eigen::Vector2d(u(rng), u(rng));
  }
  return mesh;
}

}  // namespace

TEST_CASE("rect mesh sizes") {
  const TriMesh coarse = generate_rect_mesh(1, 1, 0.5);
  CHECK(coarse.num_nodes() == 9);
  CHECK(coarse.num_triangles() == 8);
  for (Index t = 0; t < coarse.num_triangles(); ++t) CHECK(coarse.signed_area(t) == doctest::Approx(0.125));

  const TriMesh quarter = generate_rect_mesh(1, 1, 0.25);
  CHECK(quarter.num_nodes() == 25);
  CHECK(quarter.num_triangles() == 32);
  CHECK(audit(quarter).ok);
}

TEST_CASE("rect mesh at paper scale") {
  const TriMesh mesh = generate_rect_mesh(1, 1, 3e-3);
  CHECK(max_edge(mesh) <= 4.5e-3);
  const double expected = std::pow(1.0 / 3e-3 + 1.0, 2);
  CHECK(std::abs(mesh.num_nodes() - expected) / expected < 0.01);
  const MeshAudit a = audit(mesh);
  CHECK(a.ok);
  // centre is a node
  bool centre = false;
  for (Index i = 0; i < mesh.num_nodes() && !centre; ++i) centre = (mesh.node(i) - Eigen::Vector2d(0.5, 0.5)).norm() < 1e-12;
  CHECK(centre);
}

TEST_CASE("rect mesh rejects bad dimensions") {
  CHECK_THROWS_AS(generate_rect_mesh(0, 1, 0.1), Error);
  CHECK_THROWS_AS(generate_rect_mesh(1, -1, 0.1), Error);
  CHECK_THROWS_AS(generate_rect_mesh(1, 1, 0), Error);
  try {
    generate_rect_mesh(1, 1, -0.1);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidDimension);
  }
}

TEST_CASE("gmsh import") {
  SUBCASE("two triangles") {
    const TriMesh mesh = import_gmsh(kFixtures + "/unit_square.msh");
    CHECK(mesh.num_nodes() == 4);
    CHECK(mesh.num_triangles() == 2);
    CHECK(audit(mesh).ok);
  }
  SUBCASE("quad skipped") {
    const TriMesh mesh = import_gmsh(kFixtures + "/with_quad.msh");
    CHECK(mesh.num_triangles() == 2);
    CHECK(mesh.num_nodes() == 4);
    CHECK(audit(mesh).ok);
  }
  SUBCASE("clockwise reordered") {
    // signed area of (1,3,2) before import
    const Eigen::Vector2d p1(0, 0), p3(1, 1), p2(1, 0);
    const double before = 0.5 * ((p3 - p1).x() * (p2 - p1).y() - (p3 - p1).y() * (p2 - p1).x());
    CHECK(before < 0.0);
    const TriMesh mesh = import_gmsh(kFixtures + "/clockwise.msh");
    for (Index t = 0; t < mesh.num_triangles(); ++t) CHECK(mesh.signed_area(t) == doctest::Approx(0.5));
  }
  SUBCASE("errors") {
    try {
      import_gmsh(kFixtures + "/bad_version.msh");
      FAIL("expected error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::UnsupportedVersion);
    }
    try {
      import_gmsh(kFixtures + "/bad_line.msh");
      FAIL("expected error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 7);
    }
    std::istringstream empty("$MeshFormat\n2.2 0 8\n$EndMeshFormat\n");
    try {
      import_gmsh(empty);
      FAIL("expected error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::EmptyMesh);
    }
  }
}

TEST_CASE("element gradient") {
  const TriMesh mesh = jittered(0.1, 3);
  const ScalarField x = sample(mesh, [](double px, double) { return px; });
  const ScalarField c = sample(mesh, [](double, double) { return 4.0; });
  const ScalarField lin = sample(mesh, [](double px, double py) { return 3 * px - 2 * py; });
  for (Index t = 0; t < mesh.num_triangles(); ++t) {
    CHECK((element_gradient(mesh, x, t) - Eigen::Vector2d(1, 0)).norm() < 1e-12);
    CHECK(element_gradient(mesh, c, t).norm() < 1e-12);
    CHECK((element_gradient(mesh, lin, t) - Eigen::Vector2d(3, -2)).norm() < 1e-12);
  }
  CHECK_THROWS_AS(element_gradient(mesh, x, mesh.num_triangles()), Error);
  CHECK_THROWS_AS(element_gradient(mesh, ScalarField::Zero(3), 0), Error);
}

TEST_CASE("recovered gradient reproduces affine fields") {
  const TriMesh mesh = jittered(0.05, 7);
  const GradientRecovery rec(mesh);
  const VectorField g = rec.gradient(sample(mesh, [](double px, double py) { return 1.5 + 3 * px - 2 * py; }));
  const VectorField z = rec.gradient(sample(mesh, [](double, double) { return 2.0; }));
  for (Index i = 0; i < mesh.num_nodes(); ++i) {
    CHECK(std::abs(g.x[i] - 3.0) < 1e-12 * 3.0);
    CHECK(std::abs(g.y[i] + 2.0) < 1e-12 * 3.0);
    CHECK(z[i].norm() < 1e-12);
  }
}

TEST_CASE("recovered gradient of x^2 is O(h)") {
  for (double h : {0.05, 0.025}) {
    const TriMesh mesh = generate_rect_mesh(1, 1, h);
    const VectorField g = recover_nodal_gradient(mesh, sample(mesh, [](double px, double) { return px * px; }));
    double worst = 0.0;
    for (Index i = 0; i < mesh.num_nodes(); ++i) {
      if (interior(mesh, i, 1e-9)) worst = std::max(worst, std::abs(g.x[i] - 2 * mesh.nodes(0, i)));
    }
    CHECK(worst <= h);
  }
}

TEST_CASE("divergence of tensors") {
  const TriMesh mesh = jittered(0.05, 11);
  TensorField d;
  d.xx = ScalarField::Constant(mesh.num_nodes(), 2.0);
  d.yy = ScalarField::Constant(mesh.num_nodes(), 3.0);
  d.xy = ScalarField::Constant(mesh.num_nodes(), -0.5);
  const VectorField zero = divergence_of_tensor(mesh, d);
  CHECK(zero.x.cwiseAbs().maxCoeff() < 1e-12);
  CHECK(zero.y.cwiseAbs().maxCoeff() < 1e-12);

  d.xx = mesh.nodes.row(0).transpose();
  d.yy.setZero();
  d.xy.setZero();
  const VectorField lin = divergence_of_tensor(mesh, d);
  for (Index i = 0; i < mesh.num_nodes(); ++i) {
    CHECK(std::abs(lin.x[i] - 1.0) < 1e-12);
    CHECK(std::abs(lin.y[i]) < 1e-12);
  }
}

TEST_CASE("locate and interpolate") {
  const TriMesh mesh = jittered(0.1, 5);
  const ScalarField lin = sample(mesh, [](double px, double py) { return 2 * px + py; });
  const Eigen::Vector2d p(0.37, 0.61);
  CHECK(locate(mesh, p).has_value());
  CHECK(interpolate(mesh, lin, p) == doctest::Approx(2 * 0.37 + 0.61).epsilon(1e-12));
  CHECK_FALSE(locate(mesh, {1.5, 0.5}).has_value());
  try {
    interpolate(mesh, lin, {1.5, 0.5});
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ProbeOutside);
  }
}

TEST_CASE("audit flags broken meshes") {
  TriMesh mesh = generate_rect_mesh(1, 1, 0.25);
  CHECK(audit(mesh).ok);
  TriMesh flipped = mesh;
  std::swap(flipped.triangles(1, 0), flipped.triangles(2, 0));
  CHECK_FALSE(audit(flipped).ok);
  TriMesh outside = mesh;
  outside.nodes(0, 0) = -1.0;
  CHECK_FALSE(audit(outside).ok);
  TriMesh missing = mesh;
  missing.boundary_edges.conservativeResize(2, missing.boundary_edges.cols() - 1);
  CHECK_FALSE(audit(missing).ok);
}

TEST_CASE("vtk writer") {
  const TriMesh mesh = generate_rect_mesh(1, 1, 0.5);
  std::ostringstream out;
  VtkWriter(mesh).add("phi", ScalarField::Zero(9)).write(out, "t");
  const std::string s = out.str();
  CHECK(s.rfind("# vtk DataFile Version", 0) == 0);
  CHECK(s.find("POINTS 9") != std::string::npos);
  CHECK(s.find("CELLS 8 32") != std::string::npos);
  CHECK(s.find("SCALARS phi") != std::string::npos);
  CHECK_THROWS_AS(VtkWriter(mesh).add("bad", ScalarField::Zero(4)), Error);
}
