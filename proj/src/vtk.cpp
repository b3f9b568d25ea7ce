#include "anisoflow/vtk.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>

#include "anisoflow/error.hpp"

namespace anisoflow {

VtkWriter& VtkWriter::add(std::string name, const ScalarField& field) {
  require_field_size(*mesh_, field.size(), name.c_str());
  scalars_.emplace_back(std::move(name), field);
  return *this;
}

VtkWriter& VtkWriter::add(std::string name, const VectorField& field) {
  require_field_size(*mesh_, field.size(), name.c_str());
  vectors_.emplace_back(std::move(name), field);
  return *this;
}

VtkWriter& VtkWriter::add(std::string name, const TensorField& field) {
  require_field_size(*mesh_, field.size(), name.c_str());
  tensors_.emplace_back(std::move(name), field);
  return *this;
}

void VtkWriter::write(std::ostream& out, const std::string& title) const {
  const TriMesh& mesh = *mesh_;
  out << std::setprecision(12);
  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.num_nodes() << " double\n";
  for (Index i = 0; i < mesh.num_nodes(); ++i) out << mesh.nodes(0, i) << ' ' << mesh.nodes(1, i) << " 0\n";
  out << "CELLS " << mesh.num_triangles() << ' ' << 4 * mesh.num_triangles() << '\n';
  for (Index t = 0; t < mesh.num_triangles(); ++t) {
    out << "3 " << mesh.triangles(0, t) << ' ' << mesh.triangles(1, t) << ' ' << mesh.triangles(2, t) << '\n';
  }
  out << "CELL_TYPES " << mesh.num_triangles() << '\n';
  for (Index t = 0; t < mesh.num_triangles(); ++t) out << "5\n";
  if (scalars_.empty() && vectors_.empty() && tensors_.empty()) return;

  out << "POINT_DATA " << mesh.num_nodes() << '\n';
  for (const auto& [name, f] : scalars_) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (Index i = 0; i < f.size(); ++i) out << f[i] << '\n';
  }
  for (const auto& [name, f] : vectors_) {
    out << "VECTORS " << name << " double\n";
    for (Index i = 0; i < f.size(); ++i) out << f.x[i] << ' ' << f.y[i] << " 0\n";
  }
  for (const auto& [name, f] : tensors_) {
    out << "TENSORS " << name << " double\n";
    for (Index i = 0; i < f.size(); ++i) {
      out << f.xx[i] << ' ' << f.xy[i] << " 0\n" << f.xy[i] << ' ' << f.yy[i] << " 0\n0 0 0\n\n";
    }
  }
}

void VtkWriter::write(const std::filesystem::path& path, const std::string& title) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  write(out, title);
}

}  // namespace anisoflow
