#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "anisoflow/error.hpp"
#include "anisoflow/levelset.hpp"
#include "anisoflow/recovery.hpp"

using namespace anisoflow;

namespace {

constexpr double kPi = std::numbers::pi;

/// Distance to the ellipse by brute-force sampling of the parameterization.
double sampled_ellipse_distance(const Eigen::Vector2d& p, double a, double b, int n = 200000) {
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n; ++k) {
    const double t = 2.0 * kPi * k / n;
    best = std::min(best, (p - Eigen::Vector2d(a * std::cos(t), b * std::sin(t))).norm());
  }
  return best;
}

double band_gradient_deviation(const TriMesh& mesh, const LevelSet& ls, double band) {
  const VectorField g = recover_nodal_gradient(mesh, ls.phi);
  double worst = 0.0;
  for (Index i = 0; i < mesh.num_nodes(); ++i) {
    if (std::abs(ls.phi[i]) < band) worst = std::max(worst, std::abs(g[i].norm() - 1.0));
  }
  return worst;
}

/// One-sided Hausdorff distance from the segment midpoints/ends of `a` to `b`.
double contour_gap(const Contour& a, const Contour& b) {
  std::vector<std::pair<Eigen::Vector2d, Eigen::Vector2d>> segs;
  for (const auto& s : b.segments) segs.emplace_back(s.start, s.end);
  const SegmentDistance dist(segs);
  double worst = 0.0;
  for (const auto& s : a.segments) {
    worst = std::max({worst, dist(s.start), dist(s.end), dist(0.5 * (s.start + s.end))});
  }
  return worst;
}

}  // namespace

TEST_CASE("ellipse distance against sampling") {
  const double a = 0.4, b = 0.2;
  for (const Eigen::Vector2d p : {Eigen::Vector2d(0.1, 0.05), Eigen::Vector2d(0.5, 0.3), Eigen::Vector2d(-0.3, 0.01),
                                  Eigen::Vector2d(0.0, -0.5), Eigen::Vector2d(0.39, -0.02), Eigen::Vector2d(0.0, 0.0)}) {
    CHECK(ellipse_distance(p, a, b) == doctest::Approx(sampled_ellipse_distance(p, a, b)).epsilon(1e-6));
  }
}

TEST_CASE("init ellipse and circle") {
  const TriMesh mesh = generate_rect_mesh(1, 1, 0.01);
  const Eigen::Vector2d c(0.5, 0.5);
  SUBCASE("circle centre") {
    const LevelSet ls = init_ellipse(mesh, c, 0.3, 0.3);
    CHECK(ls.phi.maxCoeff() == doctest::Approx(0.3).epsilon(1e-10));
  }
  SUBCASE("outside tip") {
    const double eps = 0.02;
    const LevelSet ls = init_ellipse(mesh, c, 0.4, 0.2);
    for (Index i = 0; i < mesh.num_nodes(); ++i) {
      const Eigen::Vector2d p = mesh.node(i) - c;
      if ((p - Eigen::Vector2d(0.4 + eps, 0.0)).norm() < 1e-9) {
        CHECK(ls.phi[i] == doctest::Approx(-sampled_ellipse_distance(p, 0.4, 0.2)).epsilon(1e-6));
        CHECK(ls.phi[i] == doctest::Approx(-eps).epsilon(1e-9));
      }
      if ((p - Eigen::Vector2d(0.4, 0.0)).norm() < 1e-9) CHECK(std::abs(ls.phi[i]) < 1e-10);
    }
  }
  SUBCASE("outside domain") {
    try {
      init_ellipse(mesh, c, 0.6, 0.2);
      FAIL("expected error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::GeometryOutside);
    }
  }
}

TEST_CASE("contour extraction") {
  SUBCASE("circle length") {
    const TriMesh mesh = generate_rect_mesh(1, 1, 3e-3);
    const Contour contour = extract_contour(mesh, init_circle(mesh, {0.5, 0.5}, 0.4));
    CHECK(std::abs(contour.length() - 2 * kPi * 0.4) / (2 * kPi * 0.4) < 0.01);
  }
  SUBCASE("plane") {
    const TriMesh mesh = generate_rect_mesh(1, 1, 0.1);
    LevelSet ls{mesh.nodes.row(1).transpose().array() - 0.55, 0.6};
    const Contour contour = extract_contour(mesh, ls);
    CHECK(std::abs(contour.length() - 1.0) < 1e-12);
    // positive side (y > 0.55) on the left of every segment
    for (const auto& s : contour.segments) CHECK((s.end - s.start).x() > 0.0);
  }
  SUBCASE("node-exact zeros") {
    const TriMesh mesh = generate_rect_mesh(1, 1, 0.1);
    LevelSet ls{mesh.nodes.row(1).transpose().array() - 0.5, 0.6};
    CHECK(extract_contour(mesh, ls).length() == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("uniform sign") {
    const TriMesh mesh = generate_rect_mesh(1, 1, 0.25);
    try {
      extract_contour(mesh, LevelSet{ScalarField::Ones(mesh.num_nodes()), 1.0});
      FAIL("expected error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::UniformSign);
    }
  }
}

TEST_CASE("reinitialization") {
  const TriMesh mesh = generate_rect_mesh(1, 1, 5e-3);
  const Eigen::Vector2d c(0.5, 0.5);
  SUBCASE("exact circle unchanged") {
    const LevelSet ls = init_circle(mesh, c, 0.3);
    const LevelSet re = reinitialize(mesh, ls);
    CHECK((re.phi - ls.phi).cwiseAbs().maxCoeff() < 1e-3 * 0.3);
  }
  SUBCASE("scaled field restored") {
    LevelSet ls = init_circle(mesh, c, 0.3);
    ls.phi *= 5.0;
    const double band = ls.band_width;
    CHECK(band_gradient_deviation(mesh, ls, 5 * band) > 1.0);
    const LevelSet re = reinitialize(mesh, ls);
    CHECK(band_gradient_deviation(mesh, re, band) <= 1e-2);
  }
  SUBCASE("idempotent") {
    const LevelSet once = reinitialize(mesh, init_ellipse(mesh, c, 0.4, 0.2));
    const LevelSet twice = reinitialize(mesh, once);
    CHECK((twice.phi - once.phi).cwiseAbs().maxCoeff() < 1e-6 * 1.0);
  }
  SUBCASE("contour preserved") {
    const LevelSet ls = init_ellipse(mesh, c, 0.4, 0.2);  // min curvature radius b^2/a = 0.1 > 10h
    const Contour before = extract_contour(mesh, ls);
    const Contour after = extract_contour(mesh, reinitialize(mesh, ls));
    const double h = 5e-3;
    CHECK(std::max(contour_gap(before, after), contour_gap(after, before)) < 10 * h * h);
  }
  SUBCASE("minor axis from max phi") {
    const double h = 3e-3;
    const TriMesh fine = generate_rect_mesh(1, 1, h);
    const LevelSet re = reinitialize(fine, init_ellipse(fine, c, 0.4, 0.2));
    CHECK(std::abs(re.phi.maxCoeff() - 0.2) <= 1.5 * h);
  }
  SUBCASE("uniform sign") {
    CHECK_THROWS_AS(reinitialize(mesh, LevelSet{-ScalarField::Ones(mesh.num_nodes()), 1.0}), Error);
  }
}

TEST_CASE("polyline initialisation") {
  const TriMesh mesh = generate_rect_mesh(1, 1, 0.02);
  const std::vector<Eigen::Vector2d> square = read_polyline_csv(std::string(ANISOFLOW_FIXTURES) + "/square_contour.csv");
  REQUIRE(square.size() == 4);
  const LevelSet ls = init_polyline(mesh, square);
  CHECK(ls.phi.maxCoeff() == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(ls.phi.minCoeff() == doctest::Approx(-0.3 * std::sqrt(2.0)).epsilon(1e-12));
  CHECK(extract_contour(mesh, ls).length() == doctest::Approx(1.6).epsilon(1e-9));
}

TEST_CASE("segment distance index") {
  std::vector<std::pair<Eigen::Vector2d, Eigen::Vector2d>> segs;
  for (int k = 0; k < 500; ++k) {
    const double t0 = 2 * kPi * k / 500, t1 = 2 * kPi * (k + 1) / 500;
    segs.emplace_back(Eigen::Vector2d(std::cos(t0), std::sin(t0)), Eigen::Vector2d(std::cos(t1), std::sin(t1)));
  }
  const SegmentDistance index(segs);
  for (const Eigen::Vector2d p : {Eigen::Vector2d(0, 0), Eigen::Vector2d(3, -2), Eigen::Vector2d(0.99, 0.01),
                                  Eigen::Vector2d(-0.2, 0.4)}) {
    double brute = std::numeric_limits<double>::infinity();
    for (const auto& [a, b] : segs) brute = std::min(brute, point_segment_distance(p, a, b));
    CHECK(index(p) == doctest::Approx(brute).epsilon(1e-14));
  }
}

TEST_CASE("normals") {
  SUBCASE("plane") {
    const TriMesh mesh = generate_rect_mesh(1, 1, 0.1);
    const NormalField n = normals(mesh, LevelSet{mesh.nodes.row(1).transpose(), 1.0});
    for (Index i = 0; i < mesh.num_nodes(); ++i) CHECK((n.n[i] - Eigen::Vector2d(0, 1)).norm() < 1e-12);
  }
  SUBCASE("circle points inward") {
    const TriMesh mesh = generate_rect_mesh(1, 1, 5e-3);
    const Eigen::Vector2d c(0.5, 0.5);
    const NormalField n = normals(mesh, init_circle(mesh, c, 0.3));
    double worst = 0.0;
    for (Index i = 0; i < mesh.num_nodes(); ++i) {
      const Eigen::Vector2d r = mesh.node(i) - c;
      if (std::abs(r.norm() - 0.3) > 0.02) continue;
      CHECK(std::abs(n.n[i].norm() - 1.0) < 1e-12);
      worst = std::max(worst, (n.n[i] + r.normalized()).norm());
    }
    CHECK(worst < 1e-2);
  }
  SUBCASE("flat region flagged") {
    const TriMesh mesh = generate_rect_mesh(1, 1, 0.25);
    const NormalField n = normals(mesh, LevelSet{ScalarField::Constant(mesh.num_nodes(), 0.3), 1.0});
    for (Index i = 0; i < mesh.num_nodes(); ++i) {
      CHECK(n.degenerate[i]);
      CHECK(n.n[i] == Eigen::Vector2d(1, 0));
    }
  }
}

TEST_CASE("contour csv") {
  const TriMesh mesh = generate_rect_mesh(1, 1, 0.25);
  LevelSet ls{mesh.nodes.row(0).transpose().array() - 0.4, 1.0};
  std::ostringstream out;
  write_contour_csv(out, extract_contour(mesh, ls));
  const std::string s = out.str();
  CHECK(s.rfind("x,y,segment\n", 0) == 0);
}
