#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "anisoflow/fields.hpp"

namespace anisoflow {

/// Axis-aligned rectangle.
struct Box {
  double xmin = 0.0;
  double ymin = 0.0;
  double xmax = 0.0;
  double ymax = 0.0;

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  bool contains(const Eigen::Vector2d& p, double tol = 0.0) const {
    return p.x() >= xmin - tol && p.x() <= xmax + tol && p.y() >= ymin - tol && p.y() <= ymax + tol;
  }
};

/// Conforming P1 triangulation of a rectangular domain. Triangles are stored
/// counter-clockwise; boundary_edges lists every edge with a single incident
/// triangle.
struct TriMesh {
  Eigen::Matrix2Xd nodes;
  Eigen::Matrix3Xi triangles;
  Eigen::Matrix2Xi boundary_edges;
  double target_size = 0.0;
  Box domain;

  Index num_nodes() const { return nodes.cols(); }
  Index num_triangles() const { return triangles.cols(); }

  Eigen::Vector2d node(Index i) const { return nodes.col(i); }

  double signed_area(Index t) const;
  double longest_edge(Index t) const;

  /// Columns are the constant gradients of the three P1 basis functions.
  Eigen::Matrix<double, 2, 3> basis_gradients(Index t) const;
};

/// Uniform grid over [0,width]x[0,height] with alternating diagonals. The cell
/// count per side is the smallest even integer with spacing <= h, so the
/// domain centre is always a node.
TriMesh generate_rect_mesh(double width, double height, double h);

/// Reads a Gmsh MSH 2.2 ASCII file; only type-2 (3-node triangle) elements are kept.
TriMesh import_gmsh(const std::filesystem::path& path);
TriMesh import_gmsh(std::istream& in);

/// Builds a mesh from raw connectivity: fixes orientation, drops unreferenced
/// nodes, and derives boundary edges and the bounding domain.
TriMesh make_mesh(Eigen::Matrix2Xd nodes, Eigen::Matrix3Xi triangles);

Eigen::Matrix2Xi find_boundary_edges(const Eigen::Matrix3Xi& triangles);

struct MeshAudit {
  bool ok = true;
  std::vector<std::string> issues;
};

/// Checks positivity, conformity, domain containment and boundary consistency.
MeshAudit audit(const TriMesh& mesh);

void require_field_size(const TriMesh& mesh, Index size, const char* what);

/// Exact gradient of the P1 interpolant of `field` on triangle `tri`.
Eigen::Vector2d element_gradient(const TriMesh& mesh, const ScalarField& field, Index tri);

struct PointLocation {
  Index triangle = -1;
  Eigen::Vector3d barycentric = Eigen::Vector3d::Zero();
};

std::optional<PointLocation> locate(const TriMesh& mesh, const Eigen::Vector2d& p);

/// P1 interpolation at an arbitrary point; throws ProbeOutside when p is not covered.
double interpolate(const TriMesh& mesh, const ScalarField& field, const Eigen::Vector2d& p);

}  // namespace anisoflow
