#pragma once

#include <Eigen/Core>

namespace anisoflow {

using Index = Eigen::Index;

/// One value per mesh node.
using ScalarField = Eigen::VectorXd;

/// Per-node 2-vectors, stored one flat array per component.
struct VectorField {
  Eigen::VectorXd x;
  Eigen::VectorXd y;

  VectorField() = default;
  explicit VectorField(Index n) : x(Eigen::VectorXd::Zero(n)), y(Eigen::VectorXd::Zero(n)) {}
  VectorField(Eigen::VectorXd xs, Eigen::VectorXd ys) : x(std::move(xs)), y(std::move(ys)) {}

  Index size() const { return x.size(); }
  Eigen::Vector2d operator[](Index i) const { return {x[i], y[i]}; }
  void set(Index i, const Eigen::Vector2d& v) {
    x[i] = v.x();
    y[i] = v.y();
  }
  bool all_finite() const { return x.allFinite() && y.allFinite(); }
};

/// Per-node symmetric 2x2 tensors (xx, yy, xy components).
struct TensorField {
  Eigen::VectorXd xx;
  Eigen::VectorXd yy;
  Eigen::VectorXd xy;

  TensorField() = default;
  explicit TensorField(Index n)
      : xx(Eigen::VectorXd::Zero(n)), yy(Eigen::VectorXd::Zero(n)), xy(Eigen::VectorXd::Zero(n)) {}

  Index size() const { return xx.size(); }
  Eigen::Matrix2d operator[](Index i) const {
    Eigen::Matrix2d m;
    m << xx[i], xy[i], xy[i], yy[i];
    return m;
  }
  bool all_finite() const { return xx.allFinite() && yy.allFinite() && xy.allFinite(); }
};

}  // namespace anisoflow
