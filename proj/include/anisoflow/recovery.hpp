#pragma once

#include <vector>

#include <Eigen/SparseCore>

#include "anisoflow/fields.hpp"
#include "anisoflow/mesh.hpp"

namespace anisoflow {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Node-to-triangle incidence in compressed form.
struct NodeTriangles {
  std::vector<Index> offsets;
  std::vector<Index> triangles;

  explicit NodeTriangles(const TriMesh& mesh);

  Index count(Index node) const { return offsets[node + 1] - offsets[node]; }
  const Index* begin(Index node) const { return triangles.data() + offsets[node]; }
  const Index* end(Index node) const { return triangles.data() + offsets[node + 1]; }
};

/// Patch-recovery gradient operator. For every node a linear polynomial
/// {1, x, y} is fitted by least squares to the nodal values over the one-ring
/// patch and differentiated; rank-deficient patches fall back to the
/// area-weighted mean of the incident element gradients. The result is linear
/// in the field, so it is stored as two sparse matrices built once per mesh.
class GradientRecovery {
 public:
  explicit GradientRecovery(const TriMesh& mesh);

  VectorField gradient(const ScalarField& field) const;
  VectorField divergence(const TensorField& tensor) const;

  const SparseMatrix& dx() const { return dx_; }
  const SparseMatrix& dy() const { return dy_; }
  Index fallback_count() const { return fallback_count_; }

 private:
  Index num_nodes_ = 0;
  SparseMatrix dx_;
  SparseMatrix dy_;
  Index fallback_count_ = 0;
};

VectorField recover_nodal_gradient(const TriMesh& mesh, const ScalarField& field);

/// Row-wise divergence of a symmetric tensor field, each component recovered
/// with the patch operator: result^a = d_x D^{xa} + d_y D^{ya}.
VectorField divergence_of_tensor(const TriMesh& mesh, const TensorField& tensor);

}  // namespace anisoflow
