#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "anisoflow/fields.hpp"
#include "anisoflow/mesh.hpp"

namespace anisoflow {

/// Legacy ASCII VTK (UNSTRUCTURED_GRID) writer with point data.
class VtkWriter {
 public:
  explicit VtkWriter(const TriMesh& mesh) : mesh_(&mesh) {}

  VtkWriter& add(std::string name, const ScalarField& field);
  VtkWriter& add(std::string name, const VectorField& field);
  VtkWriter& add(std::string name, const TensorField& field);

  void write(std::ostream& out, const std::string& title = "anisoflow") const;
  void write(const std::filesystem::path& path, const std::string& title = "anisoflow") const;

 private:
  const TriMesh* mesh_;
  std::vector<std::pair<std::string, ScalarField>> scalars_;
  std::vector<std::pair<std::string, VectorField>> vectors_;
  std::vector<std::pair<std::string, TensorField>> tensors_;
};

}  // namespace anisoflow
