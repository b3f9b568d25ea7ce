#include "anisoflow/recovery.hpp"

#include <algorithm>

#include <Eigen/Dense>

#include "anisoflow/error.hpp"

namespace anisoflow {

NodeTriangles::NodeTriangles(const TriMesh& mesh) : offsets(static_cast<std::size_t>(mesh.num_nodes()) + 1, 0) {
  for (Index t = 0; t < mesh.num_triangles(); ++t) {
    for (int k = 0; k < 3; ++k) ++offsets[static_cast<std::size_t>(mesh.triangles(k, t)) + 1];
  }
  for (std::size_t i = 1; i < offsets.size(); ++i) offsets[i] += offsets[i - 1];
  triangles.resize(static_cast<std::size_t>(offsets.back()));
  std::vector<Index> cursor(offsets.begin(), offsets.end() - 1);
  for (Index t = 0; t < mesh.num_triangles(); ++t) {
    for (int k = 0; k < 3; ++k) triangles[static_cast<std::size_t>(cursor[static_cast<std::size_t>(mesh.triangles(k, t))]++)] = t;
  }
}

GradientRecovery::GradientRecovery(const TriMesh& mesh) : num_nodes_(mesh.num_nodes()) {
  const NodeTriangles incidence(mesh);
  std::vector<Eigen::Triplet<double>> tx, ty;
  tx.reserve(static_cast<std::size_t>(num_nodes_) * 7);
  ty.reserve(static_cast<std::size_t>(num_nodes_) * 7);

  std::vector<Index> patch;
  for (Index node = 0; node < num_nodes_; ++node) {
    if (incidence.count(node) == 0) throw Error(ErrorKind::Index, "node " + std::to_string(node) + " has no triangle");
    patch.clear();
    for (auto it = incidence.begin(node); it != incidence.end(node); ++it) {
      for (int k = 0; k < 3; ++k) patch.push_back(mesh.triangles(k, *it));
    }
    std::sort(patch.begin(), patch.end());
    patch.erase(std::unique(patch.begin(), patch.end()), patch.end());

    const Eigen::Vector2d origin = mesh.node(node);
    double scale = 0.0;
    for (Index v : patch) scale = std::max(scale, (mesh.node(v) - origin).norm());

    Eigen::MatrixXd basis(static_cast<Index>(patch.size()), 3);
    for (std::size_t r = 0; r < patch.size(); ++r) {
      const Eigen::Vector2d d = (mesh.node(patch[r]) - origin) / scale;
      basis.row(static_cast<Index>(r)) << 1.0, d.x(), d.y();
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(basis, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sigma = svd.singularValues();
    if (sigma(2) > 1e-10 * sigma(0)) {
      // Rows 1 and 2 of the pseudo-inverse map patch values to the gradient.
      const Eigen::MatrixXd pinv = svd.matrixV() * sigma.cwiseInverse().asDiagonal() * svd.matrixU().transpose();
      for (std::size_t r = 0; r < patch.size(); ++r) {
        tx.emplace_back(node, patch[r], pinv(1, static_cast<Index>(r)) / scale);
        ty.emplace_back(node, patch[r], pinv(2, static_cast<Index>(r)) / scale);
      }
    } else {
      ++fallback_count_;
      double total_area = 0.0;
      for (auto it = incidence.begin(node); it != incidence.end(node); ++it) total_area += mesh.signed_area(*it);
      for (auto it = incidence.begin(node); it != incidence.end(node); ++it) {
        const double w = mesh.signed_area(*it) / total_area;
        const auto grads = mesh.basis_gradients(*it);
        for (int k = 0; k < 3; ++k) {
          tx.emplace_back(node, mesh.triangles(k, *it), w * grads(0, k));
          ty.emplace_back(node, mesh.triangles(k, *it), w * grads(1, k));
        }
      }
    }
  }
  dx_.resize(num_nodes_, num_nodes_);
  dy_.resize(num_nodes_, num_nodes_);
  dx_.setFromTriplets(tx.begin(), tx.end());
  dy_.setFromTriplets(ty.begin(), ty.end());
}

VectorField GradientRecovery::gradient(const ScalarField& field) const {
  if (field.size() != num_nodes_) throw Error(ErrorKind::FieldMismatch, "gradient recovery input size");
  return VectorField(dx_ * field, dy_ * field);
}

VectorField GradientRecovery::divergence(const TensorField& tensor) const {
  if (tensor.size() != num_nodes_) throw Error(ErrorKind::FieldMismatch, "divergence input size");
  return VectorField(dx_ * tensor.xx + dy_ * tensor.xy, dx_ * tensor.xy + dy_ * tensor.yy);
}

VectorField recover_nodal_gradient(const TriMesh& mesh, const ScalarField& field) {
  require_field_size(mesh, field.size(), "field");
  return GradientRecovery(mesh).gradient(field);
}

VectorField divergence_of_tensor(const TriMesh& mesh, const TensorField& tensor) {
  require_field_size(mesh, tensor.size(), "tensor field");
  return GradientRecovery(mesh).divergence(tensor);
}

}  // namespace anisoflow
