#include "anisoflow/energy.hpp"

#include <fstream>
#include <limits>
#include <memory>
#include <sstream>

#include "anisoflow/spline.hpp"

namespace anisoflow {

const char* to_string(Variant v) { return v == Variant::Iso ? "iso" : "aniso"; }

Variant parse_variant(const std::string& s) {
  if (s == "iso") return Variant::Iso;
  if (s == "aniso") return Variant::Aniso;
  throw Error(ErrorKind::Validation, "variant must be iso or aniso, got '" + s + "'");
}

EnergyModel constant_model(double c) {
  if (!(c > 0.0)) throw Error(ErrorKind::Validation, "constant energy must be positive");
  EnergyModel m;
  m.name = "constant";
  m.params = {c};
  m.gamma = [c](double) { return c; };
  m.dgamma = [](double) { return 0.0; };
  m.d2gamma = [](double) { return 0.0; };
  return m;
}

EnergyModel ellipse_model(double ratio, double minor_axis) {
  if (!(ratio >= 1.0) || !(minor_axis > 0.0)) throw Error(ErrorKind::Validation, "ellipse model needs r >= 1, b > 0");
  // With n = (cos l, sin l): gamma = b^2 r^2 / q, q = r^2 cos^2 l + sin^2 l.
  const double scale = minor_axis * minor_axis * ratio * ratio;
  const double r2 = ratio * ratio;
  auto q = [r2](double l) { return r2 * std::cos(l) * std::cos(l) + std::sin(l) * std::sin(l); };
  auto dq = [r2](double l) { return (1.0 - r2) * std::sin(2.0 * l); };
  auto d2q = [r2](double l) { return 2.0 * (1.0 - r2) * std::cos(2.0 * l); };
  EnergyModel m;
  m.name = "ellipse";
  m.params = {ratio, minor_axis};
  m.gamma = [=](double l) { return scale / q(l); };
  m.dgamma = [=](double l) { return -scale * dq(l) / (q(l) * q(l)); };
  m.d2gamma = [=](double l) {
    const double qq = q(l), d1 = dq(l);
    return -scale * (d2q(l) / (qq * qq) - 2.0 * d1 * d1 / (qq * qq * qq));
  };
  m.extension = Extension::PrescribedD;
  m.prescribed_factor = 3.0;
  return m;
}

EnergyModel sixfold377_model() {
  EnergyModel m;
  m.name = "sixfold377";
  m.gamma = [](double l) { return 1.0 + (std::cos(6.0 * l) - 9.0 * std::cos(2.0 * l)) / 377.0; };
  m.dgamma = [](double l) { return (-6.0 * std::sin(6.0 * l) + 18.0 * std::sin(2.0 * l)) / 377.0; };
  m.d2gamma = [](double l) { return (-36.0 * std::cos(6.0 * l) + 36.0 * std::cos(2.0 * l)) / 377.0; };
  return m;
}

EnergyModel fourfold_model() {
  EnergyModel m;
  m.name = "fourfold";
  m.gamma = [](double l) { return 2.0 + std::cos(4.0 * l); };
  m.dgamma = [](double l) { return -4.0 * std::sin(4.0 * l); };
  m.d2gamma = [](double l) { return -16.0 * std::cos(4.0 * l); };
  return m;
}

EnergyModel tabulated_model(std::vector<double> lambdas, std::vector<double> gammas) {
  for (double g : gammas) {
    if (!(g > 0.0)) throw Error(ErrorKind::Validation, "tabulated gamma must be positive");
  }
  auto spline = std::make_shared<const PeriodicCubicSpline>(std::move(lambdas), std::move(gammas),
                                                            2.0 * std::numbers::pi);
  EnergyModel m;
  m.name = "tabulated";
  m.gamma = [spline](double l) { return (*spline)(l); };
  m.dgamma = [spline](double l) { return spline->derivative(l); };
  m.d2gamma = [spline](double l) { return spline->second_derivative(l); };
  return m;
}

EnergyModel load_tabulated_model(const std::filesystem::path& csv) {
  std::ifstream in(csv);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + csv.string());
  std::vector<double> lambdas, gammas;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double l, g;
    if (!(ss >> l >> g)) {
      if (lineno == 1) continue;
      throw ParseError(lineno, "expected lambda,gamma");
    }
    lambdas.push_back(l);
    gammas.push_back(g);
  }
  return tabulated_model(std::move(lambdas), std::move(gammas));
}

const std::vector<ModelInfo>& builtin_models() {
  static const std::vector<ModelInfo> catalog = {
      {"constant", "c", "isotropic gamma = c"},
      {"ellipse", "r, b", "ellipse benchmark energy, D = 3 gamma m"},
      {"sixfold377", "", "1 + (cos 6l - 9 cos 2l) / 377"},
      {"fourfold", "", "2 + cos 4l (not admissible)"},
      {"tabulated", "", "periodic cubic spline through a (lambda, gamma) CSV"},
  };
  return catalog;
}

EnergyModel make_model(const std::string& name, const std::vector<double>& params, const std::string& table) {
  auto need = [&](std::size_t count) {
    if (params.size() != count) {
      throw Error(ErrorKind::Validation,
                  "model '" + name + "' takes " + std::to_string(count) + " parameter(s), got " + std::to_string(params.size()));
    }
  };
  if (name == "constant") {
    if (params.empty()) return constant_model(1.0);
    need(1);
    return constant_model(params[0]);
  }
  if (name == "ellipse") {
    need(2);
    return ellipse_model(params[0], params[1]);
  }
  if (name == "sixfold377") {
    need(0);
    return sixfold377_model();
  }
  if (name == "fourfold") {
    need(0);
    return fourfold_model();
  }
  if (name == "tabulated") {
    if (table.empty()) throw Error(ErrorKind::Validation, "tabulated model needs a table path");
    return load_tabulated_model(table);
  }
  throw Error(ErrorKind::UnknownModel, "'" + name + "'");
}

DTensor<double> gamma_hessian(const EnergyModel& model, const Eigen::Vector2d& n) {
  if (model.extension != Extension::Angular) {
    throw Error(ErrorKind::Mode, "model '" + model.name + "' prescribes D directly; no angular Hessian");
  }
  const double lambda = inclination(n);
  return angular_hessian(model.dgamma(lambda), model.d2gamma(lambda), n);
}

DTensor<double> d_tensor(const EnergyModel& model, const Eigen::Vector2d& n, Variant variant) {
  const double lambda = inclination(n);
  const double g = model.gamma(lambda);
  if (variant == Variant::Iso) return DTensor<double>::identity(g);
  if (model.extension == Extension::PrescribedD) return DTensor<double>::identity(model.prescribed_factor * g);
  return DTensor<double>::identity(g) + angular_hessian(model.dgamma(lambda), model.d2gamma(lambda), n);
}

PdReport check_positive_definite(const EnergyModel& model, int samples) {
  if (samples < 360) throw Error(ErrorKind::Validation, "at least 360 inclination samples are required");
  PdReport report;
  report.worst_eigenvalue = std::numeric_limits<double>::infinity();
  report.dxy_margin_min = std::numeric_limits<double>::infinity();
  for (int k = 0; k < samples; ++k) {
    const double lambda = 2.0 * std::numbers::pi * k / samples;
    const DTensor<double> d = d_tensor(model, Eigen::Vector2d(std::cos(lambda), std::sin(lambda)), Variant::Aniso);
    const double low = d.eigenvalues()(0);
    if (low < report.worst_eigenvalue) {
      report.worst_eigenvalue = low;
      report.worst_angle = lambda;
    }
    report.dxy_margin_min = std::min(report.dxy_margin_min, dxy_margin(d));
    if (!(low > 0.0) || !satisfies_pd_conditions(d)) report.admissible = false;
  }
  return report;
}

EnergyFields evaluate_energy(const EnergyModel& model, const VectorField& normals, Variant variant) {
  EnergyFields out{ScalarField(normals.size()), TensorField(normals.size())};
  for (Index i = 0; i < normals.size(); ++i) {
    const Eigen::Vector2d n = normals[i];
    out.gamma[i] = model.at(n);
    const DTensor<double> d = d_tensor(model, n, variant);
    out.d.xx[i] = d.xx;
    out.d.yy[i] = d.yy;
    out.d.xy[i] = d.xy;
  }
  return out;
}

}  // namespace anisoflow
