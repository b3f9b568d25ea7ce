#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>

#include "anisoflow/fields.hpp"
#include "anisoflow/mesh.hpp"
#include "anisoflow/recovery.hpp"

namespace anisoflow {

/// Signed distance field, positive inside the closed interface.
struct LevelSet {
  ScalarField phi;
  /// Distance from the zero contour within which |grad phi| = 1 is maintained.
  double band_width = 0.0;
};

struct ContourSegment {
  Eigen::Vector2d start;
  Eigen::Vector2d end;
  Index triangle = -1;

  double length() const { return (end - start).norm(); }
};

/// Zero iso-line of a P1 field. Segments are oriented with the positive side
/// on their left, i.e. counter-clockwise around the positive region.
struct Contour {
  std::vector<ContourSegment> segments;

  double length() const;
};

/// Default band width used by the initializers: six mesh sizes.
double default_band_width(const TriMesh& mesh);

LevelSet init_circle(const TriMesh& mesh, const Eigen::Vector2d& center, double radius);

/// Exact signed distance to the ellipse centre + (a cos t, b sin t).
LevelSet init_ellipse(const TriMesh& mesh, const Eigen::Vector2d& center, double a, double b);

/// Signed distance to a closed polyline (last point joins the first).
LevelSet init_polyline(const TriMesh& mesh, const std::vector<Eigen::Vector2d>& polyline);

/// Distance from p to the ellipse x^2/a^2 + y^2/b^2 = 1 centred at the origin.
double ellipse_distance(const Eigen::Vector2d& p, double a, double b);

/// Marching triangles; node values equal to zero are treated as +1e-14.
Contour extract_contour(const TriMesh& mesh, const LevelSet& ls);

/// Re-seeds phi as the signed exact distance to its own marching-triangles
/// contour. Nodes of cut triangles keep their values times one global factor
/// that makes the mean gradient norm over the cut triangles one, so the
/// contour does not move and a second application is a no-op.
LevelSet reinitialize(const TriMesh& mesh, const LevelSet& ls);

/// Nearest-segment queries accelerated by a uniform bin grid over the segments.
class SegmentDistance {
 public:
  explicit SegmentDistance(std::vector<std::pair<Eigen::Vector2d, Eigen::Vector2d>> segments);

  double operator()(const Eigen::Vector2d& p) const;

 private:
  std::vector<std::pair<Eigen::Vector2d, Eigen::Vector2d>> segments_;
  Eigen::Vector2d origin_;
  double cell_w_ = 1.0;
  double cell_h_ = 1.0;
  Index nx_ = 1;
  Index ny_ = 1;
  std::vector<Index> offsets_;
  std::vector<Index> items_;
};

double point_segment_distance(const Eigen::Vector2d& p, const Eigen::Vector2d& a, const Eigen::Vector2d& b);

struct NormalField {
  VectorField n;
  /// Nodes where |grad phi| < 1e-8; they carry the fallback normal (1, 0).
  std::vector<bool> degenerate;
};

NormalField normals(const GradientRecovery& recovery, const LevelSet& ls);
NormalField normals(const TriMesh& mesh, const LevelSet& ls);

void write_contour_csv(std::ostream& out, const Contour& contour);
void write_contour_csv(const std::filesystem::path& path, const Contour& contour);

/// Reads "x,y" rows (an optional non-numeric header line is skipped).
std::vector<Eigen::Vector2d> read_polyline_csv(const std::filesystem::path& path);

}  // namespace anisoflow
