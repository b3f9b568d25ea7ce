#pragma once

#include <cmath>
#include <filesystem>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "anisoflow/error.hpp"
#include "anisoflow/fields.hpp"

namespace anisoflow {

/// Symmetric 2x2 tensor stored as (xx, yy, xy).
template <typename Scalar>
struct DTensor {
  Scalar xx{0};
  Scalar yy{0};
  Scalar xy{0};

  static DTensor identity(Scalar s = Scalar(1)) { return {s, s, Scalar(0)}; }

  /// Symmetric part of an arbitrary 2x2 matrix.
  template <typename Derived>
  static DTensor symmetrized(const Eigen::MatrixBase<Derived>& m) {
    return {m(0, 0), m(1, 1), Scalar(0.5) * (m(0, 1) + m(1, 0))};
  }

  Eigen::Matrix<Scalar, 2, 2> matrix() const {
    Eigen::Matrix<Scalar, 2, 2> m;
    m << xx, xy, xy, yy;
    return m;
  }

  /// Closed-form eigenvalues, ascending.
  Eigen::Matrix<Scalar, 2, 1> eigenvalues() const {
    using std::hypot;
    const Scalar mean = Scalar(0.5) * (xx + yy);
    const Scalar radius = hypot(Scalar(0.5) * (xx - yy), xy);
    return {mean - radius, mean + radius};
  }

  bool all_finite() const { return std::isfinite(xx) && std::isfinite(yy) && std::isfinite(xy); }

  friend DTensor operator+(const DTensor& a, const DTensor& b) { return {a.xx + b.xx, a.yy + b.yy, a.xy + b.xy}; }
  friend DTensor operator*(Scalar s, const DTensor& a) { return {s * a.xx, s * a.yy, s * a.xy}; }
};

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;

/// Angle of a unit normal in [0, 2pi).
template <typename Scalar>
Scalar inclination(const Vec2<Scalar>& n) {
  using std::abs;
  using std::atan2;
  if (!(abs(n.norm() - Scalar(1)) <= Scalar(1e-8))) {
    throw Error(ErrorKind::NonUnitVector, "inclination needs a unit normal");
  }
  Scalar lambda = atan2(n.y(), n.x());
  if (lambda < Scalar(0)) lambda += Scalar(2 * std::numbers::pi);
  if (lambda >= Scalar(2 * std::numbers::pi)) lambda -= Scalar(2 * std::numbers::pi);
  return lambda;
}

/// Cartesian Hessian, at |p| = 1, of the degree-0 extension p -> gamma(angle(p)):
/// gamma'' t(x)t - gamma' (t(x)n + n(x)t) with t = (-n_y, n_x).
template <typename Scalar>
DTensor<Scalar> angular_hessian(Scalar dgamma, Scalar d2gamma, const Vec2<Scalar>& n) {
  const Vec2<Scalar> t(-n.y(), n.x());
  return {d2gamma * t.x() * t.x() - Scalar(2) * dgamma * t.x() * n.x(),
          d2gamma * t.y() * t.y() - Scalar(2) * dgamma * t.y() * n.y(),
          d2gamma * t.x() * t.y() - dgamma * (t.x() * n.y() + n.x() * t.y())};
}

/// Positive definiteness through the component conditions: positive diagonal
/// and |D^xy| < sqrt(D^xx D^yy).
template <typename Scalar>
bool satisfies_pd_conditions(const DTensor<Scalar>& d) {
  using std::abs;
  using std::sqrt;
  return d.xx > Scalar(0) && d.yy > Scalar(0) && abs(d.xy) < sqrt(d.xx * d.yy);
}

/// Margin of the off-diagonal bound, sqrt(max(D^xx D^yy, 0)) - |D^xy|.
template <typename Scalar>
Scalar dxy_margin(const DTensor<Scalar>& d) {
  using std::abs;
  using std::max;
  using std::sqrt;
  return sqrt(max(d.xx * d.yy, Scalar(0))) - abs(d.xy);
}

enum class Extension { Angular, PrescribedD };
enum class Variant { Iso, Aniso };

const char* to_string(Variant v);
Variant parse_variant(const std::string& s);

/// Inclination-dependent boundary energy density gamma(lambda) with its first
/// two derivatives. Immutable once built.
struct EnergyModel {
  std::string name;
  std::vector<double> params;
  std::function<double(double)> gamma;
  std::function<double(double)> dgamma;
  std::function<double(double)> d2gamma;
  Extension extension = Extension::Angular;
  /// D = factor * gamma * identity when extension == PrescribedD.
  double prescribed_factor = 1.0;

  double operator()(double lambda) const { return gamma(lambda); }
  double at(const Eigen::Vector2d& n) const { return gamma(inclination(n)); }
};

EnergyModel constant_model(double c);
/// Benchmark ellipse energy b^2 (r^2 sin^2 theta + cos^2 theta) with
/// tan theta = n_y / (r n_x); D is prescribed as 3 gamma m.
EnergyModel ellipse_model(double ratio, double minor_axis);
EnergyModel sixfold377_model();
EnergyModel fourfold_model();
/// Periodic cubic spline through tabulated (lambda, gamma) samples.
EnergyModel tabulated_model(std::vector<double> lambdas, std::vector<double> gammas);
EnergyModel load_tabulated_model(const std::filesystem::path& csv);

struct ModelInfo {
  std::string name;
  std::string params;  // human-readable parameter list
  std::string description;
};

const std::vector<ModelInfo>& builtin_models();

/// Looks a model up by name: constant(c), ellipse(r, b), sixfold377, fourfold,
/// or tabulated with params[0..] unused and the CSV path in `table`.
EnergyModel make_model(const std::string& name, const std::vector<double>& params, const std::string& table = "");

DTensor<double> gamma_hessian(const EnergyModel& model, const Eigen::Vector2d& n);
DTensor<double> d_tensor(const EnergyModel& model, const Eigen::Vector2d& n, Variant variant);

struct PdReport {
  bool admissible = true;
  double worst_angle = 0.0;
  double worst_eigenvalue = 0.0;
  double dxy_margin_min = 0.0;
};

PdReport check_positive_definite(const EnergyModel& model, int samples = 3600);

/// Nodal gamma and D evaluated from a normal field.
struct EnergyFields {
  ScalarField gamma;
  TensorField d;
};

EnergyFields evaluate_energy(const EnergyModel& model, const VectorField& normals, Variant variant);

}  // namespace anisoflow
