#include "anisoflow/levelset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "anisoflow/error.hpp"

namespace anisoflow {

namespace {

constexpr double kZeroShift = 1e-14;

double shifted(double v) { return v == 0.0 ? kZeroShift : v; }

double cross(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }

bool inside_polygon(const Eigen::Vector2d& p, const std::vector<Eigen::Vector2d>& poly) {
  bool inside = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const auto& a = poly[i];
    const auto& b = poly[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

}  // namespace

double Contour::length() const {
  double total = 0.0;
  for (const auto& s : segments) total += s.length();
  return total;
}

double default_band_width(const TriMesh& mesh) { return 6.0 * mesh.target_size; }

LevelSet init_circle(const TriMesh& mesh, const Eigen::Vector2d& center, double radius) {
  if (!(radius > 0.0)) throw Error(ErrorKind::InvalidDimension, "circle radius must be positive");
  const Box& d = mesh.domain;
  if (center.x() - radius <= d.xmin || center.x() + radius >= d.xmax || center.y() - radius <= d.ymin ||
      center.y() + radius >= d.ymax) {
    throw Error(ErrorKind::GeometryOutside, "circle does not fit strictly inside the domain");
  }
  LevelSet ls{ScalarField(mesh.num_nodes()), default_band_width(mesh)};
  for (Index i = 0; i < mesh.num_nodes(); ++i) ls.phi[i] = radius - (mesh.node(i) - center).norm();
  return ls;
}

double ellipse_distance(const Eigen::Vector2d& p, double a, double b) {
  // The closest point lies in the same quadrant as p.
  const double px = std::abs(p.x());
  const double py = std::abs(p.y());
  auto dist2 = [&](double t) {
    const double dx = px - a * std::cos(t);
    const double dy = py - b * std::sin(t);
    return dx * dx + dy * dy;
  };
  constexpr int kSamples = 64;
  constexpr double quarter = 0.5 * std::numbers::pi;
  int best = 0;
  double best_val = dist2(0.0);
  for (int k = 1; k <= kSamples; ++k) {
    const double v = dist2(quarter * k / kSamples);
    if (v < best_val) {
      best_val = v;
      best = k;
    }
  }
  double lo = quarter * std::max(best - 1, 0) / kSamples;
  double hi = quarter * std::min(best + 1, kSamples) / kSamples;
  const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = dist2(x1), f2 = dist2(x2);
  while (hi - lo > 1e-9) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = dist2(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = dist2(x2);
    }
  }
  double t = 0.5 * (lo + hi);
  // Newton polish on d/dt of the squared distance.
  for (int it = 0; it < 4; ++it) {
    const double c = std::cos(t), s = std::sin(t);
    const double rx = px - a * c, ry = py - b * s;
    const double g = rx * a * s - ry * b * c;
    const double hgg = a * a * s * s + b * b * c * c + rx * a * c + ry * b * s;
    if (!(hgg > 0.0)) break;
    const double next = std::clamp(t - g / hgg, 0.0, quarter);
    if (dist2(next) > dist2(t)) break;
    t = next;
  }
  return std::sqrt(std::min({dist2(t), dist2(0.0), dist2(quarter)}));
}

LevelSet init_ellipse(const TriMesh& mesh, const Eigen::Vector2d& center, double a, double b) {
  if (!(b > 0.0) || a < b) throw Error(ErrorKind::InvalidDimension, "ellipse needs a >= b > 0");
  const Box& d = mesh.domain;
  if (center.x() - a <= d.xmin || center.x() + a >= d.xmax || center.y() - b <= d.ymin || center.y() + b >= d.ymax) {
    throw Error(ErrorKind::GeometryOutside, "ellipse does not fit strictly inside the domain");
  }
  LevelSet ls{ScalarField(mesh.num_nodes()), default_band_width(mesh)};
  for (Index i = 0; i < mesh.num_nodes(); ++i) {
    const Eigen::Vector2d p = mesh.node(i) - center;
    const double dist = ellipse_distance(p, a, b);
    const double level = (p.x() / a) * (p.x() / a) + (p.y() / b) * (p.y() / b);
    ls.phi[i] = level < 1.0 ? dist : -dist;
  }
  return ls;
}

LevelSet init_polyline(const TriMesh& mesh, const std::vector<Eigen::Vector2d>& polyline) {
  if (polyline.size() < 3) throw Error(ErrorKind::InvalidDimension, "closed polyline needs at least 3 points");
  for (const auto& p : polyline) {
    if (!mesh.domain.contains(p)) throw Error(ErrorKind::GeometryOutside, "polyline point outside domain");
  }
  std::vector<std::pair<Eigen::Vector2d, Eigen::Vector2d>> segs;
  for (std::size_t i = 0; i < polyline.size(); ++i) segs.emplace_back(polyline[i], polyline[(i + 1) % polyline.size()]);
  const SegmentDistance distance(std::move(segs));
  LevelSet ls{ScalarField(mesh.num_nodes()), default_band_width(mesh)};
  for (Index i = 0; i < mesh.num_nodes(); ++i) {
    const double dist = distance(mesh.node(i));
    ls.phi[i] = inside_polygon(mesh.node(i), polyline) ? dist : -dist;
  }
  return ls;
}

Contour extract_contour(const TriMesh& mesh, const LevelSet& ls) {
  require_field_size(mesh, ls.phi.size(), "level set");
  Contour contour;
  for (Index t = 0; t < mesh.num_triangles(); ++t) {
    double v[3];
    for (int k = 0; k < 3; ++k) v[k] = shifted(ls.phi[mesh.triangles(k, t)]);
    const bool pos0 = v[0] > 0, pos1 = v[1] > 0, pos2 = v[2] > 0;
    if (pos0 == pos1 && pos1 == pos2) continue;
    Eigen::Vector2d pts[2];
    int found = 0;
    for (int k = 0; k < 3; ++k) {
      const int j = (k + 1) % 3;
      if ((v[k] > 0) == (v[j] > 0)) continue;
      const double s = v[k] / (v[k] - v[j]);
      pts[found++] = mesh.node(mesh.triangles(k, t)) + s * (mesh.node(mesh.triangles(j, t)) - mesh.node(mesh.triangles(k, t)));
    }
    const Eigen::Vector3d values(v[0], v[1], v[2]);
    const Eigen::Vector2d grad = mesh.basis_gradients(t) * values;
    ContourSegment seg{pts[0], pts[1], t};
    if (cross(seg.end - seg.start, grad) < 0.0) std::swap(seg.start, seg.end);
    contour.segments.push_back(seg);
  }
  if (contour.segments.empty()) throw Error(ErrorKind::UniformSign, "level set has no zero crossing");
  return contour;
}

double point_segment_distance(const Eigen::Vector2d& p, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  const Eigen::Vector2d ab = b - a;
  const double len2 = ab.squaredNorm();
  const double s = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + s * ab)).norm();
}

SegmentDistance::SegmentDistance(std::vector<std::pair<Eigen::Vector2d, Eigen::Vector2d>> segments)
    : segments_(std::move(segments)) {
  if (segments_.empty()) throw Error(ErrorKind::UniformSign, "no segments to measure distance to");
  Eigen::Vector2d lo = segments_.front().first, hi = lo;
  for (const auto& [a, b] : segments_) {
    lo = lo.cwiseMin(a).cwiseMin(b);
    hi = hi.cwiseMax(a).cwiseMax(b);
  }
  const auto bins = static_cast<Index>(std::clamp(std::sqrt(static_cast<double>(segments_.size())), 1.0, 256.0));
  const double extent = std::max((hi - lo).maxCoeff(), 1e-12);
  const Eigen::Vector2d size = (hi - lo).cwiseMax(1e-6 * extent);
  origin_ = lo;
  nx_ = bins;
  ny_ = bins;
  cell_w_ = size.x() / static_cast<double>(nx_);
  cell_h_ = size.y() / static_cast<double>(ny_);

  auto cell_range = [&](double v, double o, double w, Index n) {
    return std::clamp(static_cast<Index>(std::floor((v - o) / w)), Index{0}, n - 1);
  };
  std::vector<std::vector<Index>> buckets(static_cast<std::size_t>(nx_ * ny_));
  for (std::size_t s = 0; s < segments_.size(); ++s) {
    const auto& [a, b] = segments_[s];
    const Index i0 = cell_range(std::min(a.x(), b.x()), origin_.x(), cell_w_, nx_);
    const Index i1 = cell_range(std::max(a.x(), b.x()), origin_.x(), cell_w_, nx_);
    const Index j0 = cell_range(std::min(a.y(), b.y()), origin_.y(), cell_h_, ny_);
    const Index j1 = cell_range(std::max(a.y(), b.y()), origin_.y(), cell_h_, ny_);
    for (Index j = j0; j <= j1; ++j) {
      for (Index i = i0; i <= i1; ++i) buckets[static_cast<std::size_t>(j * nx_ + i)].push_back(static_cast<Index>(s));
    }
  }
  offsets_.assign(buckets.size() + 1, 0);
  for (std::size_t c = 0; c < buckets.size(); ++c) offsets_[c + 1] = offsets_[c] + static_cast<Index>(buckets[c].size());
  items_.reserve(static_cast<std::size_t>(offsets_.back()));
  for (const auto& bucket : buckets) items_.insert(items_.end(), bucket.begin(), bucket.end());
}

double SegmentDistance::operator()(const Eigen::Vector2d& p) const {
  const Index ci = std::clamp(static_cast<Index>(std::floor((p.x() - origin_.x()) / cell_w_)), Index{0}, nx_ - 1);
  const Index cj = std::clamp(static_cast<Index>(std::floor((p.y() - origin_.y()) / cell_h_)), Index{0}, ny_ - 1);
  const double cell_min = std::min(cell_w_, cell_h_);
  double best = std::numeric_limits<double>::infinity();
  auto visit = [&](Index i, Index j) {
    if (i < 0 || j < 0 || i >= nx_ || j >= ny_) return;
    const auto c = static_cast<std::size_t>(j * nx_ + i);
    for (Index k = offsets_[c]; k < offsets_[c + 1]; ++k) {
      const auto& [a, b] = segments_[static_cast<std::size_t>(items_[static_cast<std::size_t>(k)])];
      best = std::min(best, point_segment_distance(p, a, b));
    }
  };
  const Index max_ring = std::max(nx_, ny_);
  for (Index ring = 0; ring <= max_ring; ++ring) {
    if (ring == 0) {
      visit(ci, cj);
    } else {
      for (Index i = ci - ring; i <= ci + ring; ++i) {
        visit(i, cj - ring);
        visit(i, cj + ring);
      }
      for (Index j = cj - ring + 1; j <= cj + ring - 1; ++j) {
        visit(ci - ring, j);
        visit(ci + ring, j);
      }
    }
    if (best <= static_cast<double>(ring) * cell_min) break;
  }
  return best;
}

LevelSet reinitialize(const TriMesh& mesh, const LevelSet& ls) {
  const Contour contour = extract_contour(mesh, ls);
  std::vector<std::pair<Eigen::Vector2d, Eigen::Vector2d>> segs;
  segs.reserve(contour.segments.size());
  for (const auto& s : contour.segments) segs.emplace_back(s.start, s.end);
  const SegmentDistance distance(std::move(segs));

  // Nodes of cut triangles keep their values, rescaled so the mean gradient
  // norm over the cut triangles is one; the contour is then left in place.
  std::vector<bool> cut(static_cast<std::size_t>(mesh.num_nodes()), false);
  double area = 0.0, grad = 0.0;
  for (const auto& s : contour.segments) {
    const Index t = s.triangle;
    const Eigen::Vector3d values(ls.phi[mesh.triangles(0, t)], ls.phi[mesh.triangles(1, t)],
                                 ls.phi[mesh.triangles(2, t)]);
    const double a = mesh.signed_area(t);
    area += a;
    grad += a * (mesh.basis_gradients(t) * values).norm();
    for (int k = 0; k < 3; ++k) cut[static_cast<std::size_t>(mesh.triangles(k, t))] = true;
  }
  const double scale = grad > 0.0 ? area / grad : 1.0;

  LevelSet out{ScalarField(mesh.num_nodes()), ls.band_width};
  for (Index i = 0; i < mesh.num_nodes(); ++i) {
    if (cut[static_cast<std::size_t>(i)]) {
      out.phi[i] = scale * ls.phi[i];
      continue;
    }
    const double d = distance(mesh.node(i));
    out.phi[i] = shifted(ls.phi[i]) > 0.0 ? d : -d;
  }
  return out;
}

NormalField normals(const GradientRecovery& recovery, const LevelSet& ls) {
  const VectorField grad = recovery.gradient(ls.phi);
  NormalField out{VectorField(grad.size()), std::vector<bool>(static_cast<std::size_t>(grad.size()), false)};
  for (Index i = 0; i < grad.size(); ++i) {
    const Eigen::Vector2d g = grad[i];
    const double norm = g.norm();
    if (norm < 1e-8) {
      out.n.set(i, Eigen::Vector2d::UnitX());
      out.degenerate[static_cast<std::size_t>(i)] = true;
    } else {
      out.n.set(i, g / norm);
    }
  }
  return out;
}

NormalField normals(const TriMesh& mesh, const LevelSet& ls) {
  require_field_size(mesh, ls.phi.size(), "level set");
  return normals(GradientRecovery(mesh), ls);
}

void write_contour_csv(std::ostream& out, const Contour& contour) {
  out << "x,y,segment\n";
  out.precision(15);
  for (std::size_t s = 0; s < contour.segments.size(); ++s) {
    const auto& seg = contour.segments[s];
    out << seg.start.x() << ',' << seg.start.y() << ',' << s << '\n';
    out << seg.end.x() << ',' << seg.end.y() << ',' << s << '\n';
  }
}

void write_contour_csv(const std::filesystem::path& path, const Contour& contour) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  write_contour_csv(out, contour);
}

std::vector<Eigen::Vector2d> read_polyline_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::vector<Eigen::Vector2d> points;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double x, y;
    if (!(ss >> x >> y)) {
      if (lineno == 1) continue;
      throw ParseError(lineno, "expected x,y");
    }
    points.emplace_back(x, y);
  }
  if (points.size() > 1 && points.front() == points.back()) points.pop_back();
  return points;
}

}  // namespace anisoflow
