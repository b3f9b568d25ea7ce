#include "anisoflow/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "anisoflow/error.hpp"

namespace anisoflow {

namespace {

double cross(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

Box bounding_box(const Eigen::Matrix2Xd& nodes) {
  Box box;
  if (nodes.cols() == 0) return box;
  box.xmin = nodes.row(0).minCoeff();
  box.xmax = nodes.row(0).maxCoeff();
  box.ymin = nodes.row(1).minCoeff();
  box.ymax = nodes.row(1).maxCoeff();
  return box;
}

double mean_edge_length(const TriMesh& mesh) {
  double sum = 0.0;
  for (Index t = 0; t < mesh.num_triangles(); ++t) {
    for (int k = 0; k < 3; ++k) {
      sum += (mesh.node(mesh.triangles(k, t)) - mesh.node(mesh.triangles((k + 1) % 3, t))).norm();
    }
  }
  return mesh.num_triangles() > 0 ? sum / (3.0 * mesh.num_triangles()) : 0.0;
}

}  // namespace

double TriMesh::signed_area(Index t) const {
  const Eigen::Vector2d p0 = node(triangles(0, t));
  return 0.5 * cross(node(triangles(1, t)) - p0, node(triangles(2, t)) - p0);
}

double TriMesh::longest_edge(Index t) const {
  double longest = 0.0;
  for (int k = 0; k < 3; ++k) {
    longest = std::max(longest, (node(triangles(k, t)) - node(triangles((k + 1) % 3, t))).norm());
  }
  return longest;
}

Eigen::Matrix<double, 2, 3> TriMesh::basis_gradients(Index t) const {
  const Eigen::Vector2d p0 = node(triangles(0, t));
  const Eigen::Vector2d p1 = node(triangles(1, t));
  const Eigen::Vector2d p2 = node(triangles(2, t));
  const double twice_area = cross(p1 - p0, p2 - p0);
  Eigen::Matrix<double, 2, 3> g;
  g.col(0) << p1.y() - p2.y(), p2.x() - p1.x();
  g.col(1) << p2.y() - p0.y(), p0.x() - p2.x();
  g.col(2) << p0.y() - p1.y(), p1.x() - p0.x();
  return g / twice_area;
}

TriMesh generate_rect_mesh(double width, double height, double h) {
  if (!(width > 0.0) || !(height > 0.0) || !(h > 0.0)) {
    throw Error(ErrorKind::InvalidDimension, "width, height and h must be positive");
  }
  if (h > 0.5 * std::min(width, height)) {
    throw Error(ErrorKind::InvalidDimension, "h must not exceed half the shorter side");
  }
  auto cells = [h](double length) {
    auto n = static_cast<Index>(std::ceil(length / h - 1e-9));
    return n + (n % 2);
  };
  const Index nx = cells(width);
  const Index ny = cells(height);
  const double dx = width / static_cast<double>(nx);
  const double dy = height / static_cast<double>(ny);

  TriMesh mesh;
  mesh.nodes.resize(2, (nx + 1) * (ny + 1));
  auto id = [nx](Index i, Index j) { return static_cast<int>(j * (nx + 1) + i); };
  for (Index j = 0; j <= ny; ++j) {
    for (Index i = 0; i <= nx; ++i) {
      // Snap the last row/column onto the boundary exactly.
      mesh.nodes.col(id(i, j)) << (i == nx ? width : i * dx), (j == ny ? height : j * dy);
    }
  }
  mesh.triangles.resize(3, 2 * nx * ny);
  Index t = 0;
  for (Index j = 0; j < ny; ++j) {
    for (Index i = 0; i < nx; ++i) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      if ((i + j) % 2 == 0) {
        mesh.triangles.col(t++) << a, b, c;
        mesh.triangles.col(t++) << a, c, d;
      } else {
        mesh.triangles.col(t++) << a, b, d;
        mesh.triangles.col(t++) << b, c, d;
      }
    }
  }
  mesh.boundary_edges = find_boundary_edges(mesh.triangles);
  mesh.target_size = h;
  mesh.domain = Box{0.0, 0.0, width, height};
  return mesh;
}

Eigen::Matrix2Xi find_boundary_edges(const Eigen::Matrix3Xi& triangles) {
  std::map<std::uint64_t, std::pair<int, std::array<int, 2>>> edges;
  for (Index t = 0; t < triangles.cols(); ++t) {
    for (int k = 0; k < 3; ++k) {
      const int a = triangles(k, t), b = triangles((k + 1) % 3, t);
      auto& entry = edges[edge_key(a, b)];
      entry.first += 1;
      entry.second = {a, b};
    }
  }
  std::vector<std::array<int, 2>> boundary;
  for (const auto& [key, entry] : edges) {
    if (entry.first == 1) boundary.push_back(entry.second);
  }
  Eigen::Matrix2Xi out(2, static_cast<Index>(boundary.size()));
  for (std::size_t e = 0; e < boundary.size(); ++e) out.col(static_cast<Index>(e)) << boundary[e][0], boundary[e][1];
  return out;
}

TriMesh make_mesh(Eigen::Matrix2Xd nodes, Eigen::Matrix3Xi triangles) {
  if (triangles.cols() == 0) throw Error(ErrorKind::EmptyMesh, "no triangles");
  std::vector<int> remap(static_cast<std::size_t>(nodes.cols()), -1);
  int used = 0;
  for (Index t = 0; t < triangles.cols(); ++t) {
    for (int k = 0; k < 3; ++k) {
      const int v = triangles(k, t);
      if (v < 0 || v >= nodes.cols()) throw Error(ErrorKind::Index, "triangle references missing node");
      if (remap[static_cast<std::size_t>(v)] < 0) remap[static_cast<std::size_t>(v)] = 0;
    }
  }
  for (auto& r : remap) {
    if (r == 0) r = used++;
  }
  TriMesh mesh;
  mesh.nodes.resize(2, used);
  for (Index v = 0; v < nodes.cols(); ++v) {
    if (remap[static_cast<std::size_t>(v)] >= 0) mesh.nodes.col(remap[static_cast<std::size_t>(v)]) = nodes.col(v);
  }
  mesh.triangles.resize(3, triangles.cols());
  for (Index t = 0; t < triangles.cols(); ++t) {
    for (int k = 0; k < 3; ++k) mesh.triangles(k, t) = remap[static_cast<std::size_t>(triangles(k, t))];
    if (mesh.signed_area(t) < 0.0) std::swap(mesh.triangles(1, t), mesh.triangles(2, t));
    if (mesh.signed_area(t) == 0.0) throw Error(ErrorKind::InvalidDimension, "degenerate triangle " + std::to_string(t));
  }
  mesh.boundary_edges = find_boundary_edges(mesh.triangles);
  mesh.domain = bounding_box(mesh.nodes);
  mesh.target_size = mean_edge_length(mesh);
  return mesh;
}

TriMesh import_gmsh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  return import_gmsh(in);
}

TriMesh import_gmsh(std::istream& in) {
  std::string line;
  int lineno = 0;
  auto next = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };
  auto expect_line = [&](const char* what) {
    if (!next()) throw ParseError(lineno, std::string("unexpected end of file, expected ") + what);
  };

  bool have_format = false;
  std::unordered_map<long, int> node_index;
  std::vector<Eigen::Vector2d> coords;
  std::vector<std::array<int, 3>> tris;
  std::vector<int> tri_lines;

  while (next()) {
    if (line.empty()) continue;
    if (line == "$MeshFormat") {
      expect_line("format line");
      std::istringstream ss(line);
      std::string version;
      int file_type = -1;
      if (!(ss >> version >> file_type)) throw ParseError(lineno, "malformed $MeshFormat");
      if (version.rfind("2.", 0) != 0 && version != "2") {
        throw Error(ErrorKind::UnsupportedVersion, "MSH version " + version + " (need 2.2)");
      }
      if (file_type != 0) throw Error(ErrorKind::UnsupportedVersion, "binary MSH files are not supported");
      expect_line("$EndMeshFormat");
      if (line != "$EndMeshFormat") throw ParseError(lineno, "expected $EndMeshFormat");
      have_format = true;
    } else if (line == "$Nodes") {
      if (!have_format) throw ParseError(lineno, "$Nodes before $MeshFormat");
      expect_line("node count");
      long count = 0;
      if (!(std::istringstream(line) >> count) || count < 0) throw ParseError(lineno, "bad node count");
      for (long i = 0; i < count; ++i) {
        expect_line("node");
        std::istringstream ss(line);
        long id = 0;
        double x = 0, y = 0, z = 0;
        if (!(ss >> id >> x >> y >> z)) throw ParseError(lineno, "malformed node line");
        node_index[id] = static_cast<int>(coords.size());
        coords.emplace_back(x, y);
      }
      expect_line("$EndNodes");
      if (line != "$EndNodes") throw ParseError(lineno, "expected $EndNodes");
    } else if (line == "$Elements") {
      if (!have_format) throw ParseError(lineno, "$Elements before $MeshFormat");
      expect_line("element count");
      long count = 0;
      if (!(std::istringstream(line) >> count) || count < 0) throw ParseError(lineno, "bad element count");
      for (long i = 0; i < count; ++i) {
        expect_line("element");
        std::istringstream ss(line);
        long id = 0;
        int type = 0, ntags = 0;
        if (!(ss >> id >> type >> ntags) || ntags < 0) throw ParseError(lineno, "malformed element line");
        for (int k = 0; k < ntags; ++k) {
          long tag;
          if (!(ss >> tag)) throw ParseError(lineno, "missing element tag");
        }
        if (type != 2) continue;
        std::array<int, 3> tri{};
        for (auto& v : tri) {
          long node_id;
          if (!(ss >> node_id)) throw ParseError(lineno, "triangle needs 3 nodes");
          auto it = node_index.find(node_id);
          if (it == node_index.end()) throw ParseError(lineno, "unknown node id " + std::to_string(node_id));
          v = it->second;
        }
        tris.push_back(tri);
        tri_lines.push_back(lineno);
      }
      expect_line("$EndElements");
      if (line != "$EndElements") throw ParseError(lineno, "expected $EndElements");
    } else if (line.front() == '$') {
      const std::string end = "$End" + line.substr(1);
      do {
        expect_line(end.c_str());
      } while (line != end);
    } else {
      throw ParseError(lineno, "unexpected content '" + line + "'");
    }
  }
  if (!have_format) throw ParseError(lineno, "missing $MeshFormat");
  if (tris.empty()) throw Error(ErrorKind::EmptyMesh, "no triangle elements");

  Eigen::Matrix2Xd nodes(2, static_cast<Index>(coords.size()));
  for (std::size_t i = 0; i < coords.size(); ++i) nodes.col(static_cast<Index>(i)) = coords[i];
  Eigen::Matrix3Xi triangles(3, static_cast<Index>(tris.size()));
  for (std::size_t t = 0; t < tris.size(); ++t) {
    triangles.col(static_cast<Index>(t)) << tris[t][0], tris[t][1], tris[t][2];
    const Eigen::Vector2d p0 = coords[static_cast<std::size_t>(tris[t][0])];
    if (cross(coords[static_cast<std::size_t>(tris[t][1])] - p0, coords[static_cast<std::size_t>(tris[t][2])] - p0) == 0.0) {
      throw ParseError(tri_lines[t], "degenerate triangle");
    }
  }
  return make_mesh(std::move(nodes), std::move(triangles));
}

MeshAudit audit(const TriMesh& mesh) {
  MeshAudit report;
  auto fail = [&report](std::string msg) {
    report.ok = false;
    report.issues.push_back(std::move(msg));
  };
  if (mesh.num_triangles() == 0) fail("mesh has no triangles");
  const double tol = 1e-12 * std::max(1.0, std::max(mesh.domain.width(), mesh.domain.height()));
  for (Index i = 0; i < mesh.num_nodes(); ++i) {
    if (!mesh.domain.contains(mesh.node(i), tol)) fail("node " + std::to_string(i) + " outside domain");
  }
  std::map<std::uint64_t, int> incidence;
  for (Index t = 0; t < mesh.num_triangles(); ++t) {
    if (!(mesh.signed_area(t) > 0.0)) fail("triangle " + std::to_string(t) + " has non-positive area");
    for (int k = 0; k < 3; ++k) ++incidence[edge_key(mesh.triangles(k, t), mesh.triangles((k + 1) % 3, t))];
  }
  std::size_t single = 0;
  for (const auto& [key, count] : incidence) {
    if (count > 2) fail("edge shared by " + std::to_string(count) + " triangles");
    if (count == 1) ++single;
  }
  if (single != static_cast<std::size_t>(mesh.boundary_edges.cols())) {
    fail("boundary edge list has " + std::to_string(mesh.boundary_edges.cols()) + " entries, expected " +
         std::to_string(single));
  }
  for (Index e = 0; e < mesh.boundary_edges.cols(); ++e) {
    auto it = incidence.find(edge_key(mesh.boundary_edges(0, e), mesh.boundary_edges(1, e)));
    if (it == incidence.end() || it->second != 1) fail("boundary edge " + std::to_string(e) + " is not a boundary edge");
  }
  return report;
}

void require_field_size(const TriMesh& mesh, Index size, const char* what) {
  if (size != mesh.num_nodes()) {
    throw Error(ErrorKind::FieldMismatch, std::string(what) + " has " + std::to_string(size) + " values for " +
                                              std::to_string(mesh.num_nodes()) + " nodes");
  }
}

Eigen::Vector2d element_gradient(const TriMesh& mesh, const ScalarField& field, Index tri) {
  if (tri < 0 || tri >= mesh.num_triangles()) throw Error(ErrorKind::Index, "triangle " + std::to_string(tri));
  require_field_size(mesh, field.size(), "field");
  const Eigen::Vector3d values(field[mesh.triangles(0, tri)], field[mesh.triangles(1, tri)],
                               field[mesh.triangles(2, tri)]);
  return mesh.basis_gradients(tri) * values;
}

std::optional<PointLocation> locate(const TriMesh& mesh, const Eigen::Vector2d& p) {
  constexpr double tol = 1e-12;
  for (Index t = 0; t < mesh.num_triangles(); ++t) {
    const Eigen::Vector2d p0 = mesh.node(mesh.triangles(0, t));
    const Eigen::Vector2d p1 = mesh.node(mesh.triangles(1, t));
    const Eigen::Vector2d p2 = mesh.node(mesh.triangles(2, t));
    const double area2 = cross(p1 - p0, p2 - p0);
    const double l1 = cross(p - p0, p2 - p0) / area2;
    const double l2 = cross(p1 - p0, p - p0) / area2;
    const double l0 = 1.0 - l1 - l2;
    if (l0 >= -tol && l1 >= -tol && l2 >= -tol) return PointLocation{t, Eigen::Vector3d(l0, l1, l2)};
  }
  return std::nullopt;
}

double interpolate(const TriMesh& mesh, const ScalarField& field, const Eigen::Vector2d& p) {
  require_field_size(mesh, field.size(), "field");
  const auto loc = locate(mesh, p);
  if (!loc) throw Error(ErrorKind::ProbeOutside, "point (" + std::to_string(p.x()) + ", " + std::to_string(p.y()) + ")");
  double value = 0.0;
  for (int k = 0; k < 3; ++k) value += loc->barycentric[k] * field[mesh.triangles(k, loc->triangle)];
  return value;
}

}  // namespace anisoflow
