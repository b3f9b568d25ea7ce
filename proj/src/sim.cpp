#include "anisoflow/sim.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "anisoflow/error.hpp"
#include "anisoflow/vtk.hpp"

namespace anisoflow {

namespace {

std::string fmt(double v) {
  std::ostringstream ss;
  ss << std::setprecision(17) << v;
  return ss.str();
}

double probe_distance(const SimConfig& config) {
  switch (config.kind) {
    case CaseKind::Ellipse: return config.a0;
    case CaseKind::Circle: return config.radius;
    case CaseKind::Custom: {
      double right = -std::numeric_limits<double>::infinity();
      for (const auto& p : read_polyline_csv(config.contour_file)) right = std::max(right, p.x());
      return right - config.center.x();
    }
  }
  return 0.0;
}

/// Prefixes the step index while keeping the error kind.
[[noreturn]] void rethrow_at_step(const Error& e, long step) {
  std::string detail = e.what();
  const std::string kind = std::string(to_string(e.kind())) + ": ";
  if (detail.rfind(kind, 0) == 0) detail.erase(0, kind.size());
  throw Error(e.kind(), "step " + std::to_string(step) + ": " + detail);
}

void apply_circle_law(RunRecord& record, double r0, double mu, double gamma) {
  const std::size_t n = record.measured().size();
  for (std::size_t i = 0; i < n; ++i) {
    auto& row = record.rows[i];
    const double r2 = r0 * r0 - 2.0 * mu * gamma * row.t;
    if (r2 <= 0.0) continue;
    const double r = std::sqrt(r2);
    const double v = -mu * gamma / r;
    row.err_a = std::abs(r - row.a);
    row.err_b = std::abs(r - row.b);
    row.err_va = std::abs(v - row.va);
    row.err_vb = std::abs(v - row.vb);
  }
}

}  // namespace

const char* to_string(CaseKind kind) {
  switch (kind) {
    case CaseKind::Ellipse: return "ellipse";
    case CaseKind::Circle: return "circle";
    case CaseKind::Custom: return "custom";
  }
  return "?";
}

CaseKind parse_case_kind(const std::string& s) {
  if (s == "ellipse") return CaseKind::Ellipse;
  if (s == "circle") return CaseKind::Circle;
  if (s == "custom") return CaseKind::Custom;
  throw Error(ErrorKind::Validation, "case kind must be ellipse, circle or custom, got '" + s + "'");
}

void SimConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::Validation, msg); };
  if (!(width > 0.0) || !(height > 0.0)) fail("domain width and height must be positive");
  if (!(h > 0.0)) fail("h must be positive");
  if (!(dt > 0.0)) fail("dt must be positive");
  if (!(t_end > 0.0)) fail("t_end must be positive");
  if (snapshot_every < 0) fail("snapshot_every must be >= 0");
  step_params().validate();

  const double margin = 4.0 * h;
  auto fits = [&](double hx, double hy) {
    return center.x() - hx >= margin && center.x() + hx <= width - margin && center.y() - hy >= margin &&
           center.y() + hy <= height - margin;
  };
  switch (kind) {
    case CaseKind::Ellipse:
      if (!(a0 > 0.0) || !(ratio >= 1.0)) fail("ellipse case needs a0 > 0 and r >= 1");
      if (!fits(a0, a0 / ratio)) fail("ellipse does not fit inside the domain with a 4h margin");
      break;
    case CaseKind::Circle:
      if (!(radius > 0.0)) fail("circle case needs radius > 0");
      if (!fits(radius, radius)) fail("circle does not fit inside the domain with a 4h margin");
      break;
    case CaseKind::Custom: {
      if (contour_file.empty()) fail("custom case needs a contour file");
      for (const auto& p : read_polyline_csv(contour_file)) {
        if (p.x() < margin || p.x() > width - margin || p.y() < margin || p.y() > height - margin) {
          fail("custom contour does not fit inside the domain with a 4h margin");
        }
      }
      break;
    }
  }
  if (model == "ellipse" && kind != CaseKind::Ellipse) fail("the ellipse model needs the ellipse case");
  if (model != "ellipse") (void)make_model(model, model_params, model_table);
}

StepParams SimConfig::step_params() const {
  StepParams p;
  p.dt = dt;
  p.mu = mu;
  p.solver_rel_tol = solver_rel_tol;
  p.solver_max_iter = solver_max_iter;
  p.solver_restart = solver_restart;
  p.supg = supg;
  return p;
}

std::vector<std::pair<std::string, std::string>> config_echo(const SimConfig& c) {
  std::ostringstream params;
  for (std::size_t i = 0; i < c.model_params.size(); ++i) params << (i ? ", " : "") << fmt(c.model_params[i]);
  return {
      {"domain.width", fmt(c.width)},
      {"domain.height", fmt(c.height)},
      {"domain.mesh", c.mesh_file},
      {"numerics.h", fmt(c.h)},
      {"numerics.dt", fmt(c.dt)},
      {"numerics.t_end", fmt(c.t_end)},
      {"numerics.mu", fmt(c.mu)},
      {"numerics.solver_rel_tol", fmt(c.solver_rel_tol)},
      {"numerics.supg", c.supg ? "true" : "false"},
      {"case.kind", to_string(c.kind)},
      {"case.center", fmt(c.center.x()) + ", " + fmt(c.center.y())},
      {"case.a0", fmt(c.a0)},
      {"case.r", fmt(c.ratio)},
      {"case.radius", fmt(c.radius)},
      {"case.contour", c.contour_file},
      {"model.name", c.model},
      {"model.params", params.str()},
      {"model.variant", c.variant ? to_string(*c.variant) : ""},
  };
}

TriMesh build_mesh(const SimConfig& config) {
  if (!config.mesh_file.empty()) return import_gmsh(config.mesh_file);
  return generate_rect_mesh(config.width, config.height, config.h);
}

LevelSet initial_level_set(const SimConfig& config, const TriMesh& mesh) {
  switch (config.kind) {
    case CaseKind::Ellipse: return init_ellipse(mesh, config.center, config.a0, config.a0 / config.ratio);
    case CaseKind::Circle: return init_circle(mesh, config.center, config.radius);
    case CaseKind::Custom: return init_polyline(mesh, read_polyline_csv(config.contour_file));
  }
  throw Error(ErrorKind::Validation, "unknown case");
}

EnergyModel model_for_state(const SimConfig& config, const LevelSet& ls) {
  if (config.model == "ellipse") {
    const double ratio = config.model_params.empty() ? config.ratio : config.model_params.front();
    return ellipse_model(ratio, measure_b(ls));
  }
  return make_model(config.model, config.model_params, config.model_table);
}

std::optional<EllipseExact> ellipse_oracle(const SimConfig& config) {
  if (config.kind != CaseKind::Ellipse || config.model != "ellipse" || !(config.mu > 0.0)) return std::nullopt;
  const bool iso = config.variant == Variant::Iso;
  return EllipseExact{config.a0, config.a0 / config.ratio, config.mu * (iso ? 1.0 / 3.0 : 1.0)};
}

RunResult simulate(const SimConfig& config, const TriMesh& mesh, const StepObserver& observer) {
  config.validate();
  const Variant variant = config.variant.value_or(Variant::Aniso);
  const StepParams params = config.step_params();
  const Stepper stepper(mesh);
  const double a0 = probe_distance(config);

  RunResult result;
  result.record.config = config_echo(config);
  LevelSet ls = initial_level_set(config, mesh);
  EnergyModel model = model_for_state(config, ls);
  if (!config.force_inadmissible) require_admissible(model, variant);

  auto record_row = [&](long step, double t) {
    RunRow row;
    row.step = step;
    row.t = t;
    row.b = measure_b(ls);
    row.a = measure_a(mesh, ls, a0, config.center);
    row.ratio = row.a / row.b;
    const ContourEnergy ce = contour_energy(mesh, ls, model);
    row.length = ce.length;
    row.energy = ce.energy;
    row.efficiency = ce.efficiency();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    row.err_a = row.err_b = row.err_va = row.err_vb = nan;
    result.record.rows.push_back(row);
  };

  long step = 0;
  try {
    record_row(0, 0.0);
    InterfaceFields fields = stepper.fields(ls, model, variant);
    if (observer) observer(0, 0.0, ls, fields);

    const auto steps = static_cast<long>(std::ceil(config.t_end / config.dt - 1e-9));
    for (step = 1; step <= steps; ++step) {
      const double t = static_cast<double>(step) * config.dt;
      try {
        ls = stepper.advance(ls, fields, params);
        model = model_for_state(config, ls);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::UniformSign) throw;
        RunRow terminal;
        terminal.step = step;
        terminal.t = t;
        terminal.status = "vanished";
        const double nan = std::numeric_limits<double>::quiet_NaN();
        terminal.a = terminal.b = terminal.ratio = terminal.va = terminal.vb = nan;
        terminal.err_a = terminal.err_b = terminal.err_va = terminal.err_vb = nan;
        terminal.efficiency = terminal.energy = terminal.length = nan;
        result.record.rows.push_back(terminal);
        result.record.status = "vanished";
        break;
      }
      record_row(step, t);
      fields = stepper.fields(ls, model, variant);
      if (observer) observer(step, t, ls, fields);
    }
  } catch (const Error& e) {
    rethrow_at_step(e, step);
  }

  if (result.record.measured().size() >= 2) result.record = series_velocity(std::move(result.record));
  if (const auto ex = ellipse_oracle(config)) {
    result.record = apply_exact(std::move(result.record), *ex);
  } else if (config.kind == CaseKind::Circle && config.model == "constant") {
    apply_circle_law(result.record, config.radius, config.mu, make_model("constant", config.model_params).gamma(0.0));
  }
  result.final_state = ls;
  if (result.record.status != "vanished") result.final_contour = extract_contour(mesh, ls);
  return result;
}

RunRecord run(const SimConfig& config) {
  config.validate();
  const TriMesh mesh = build_mesh(config);
  StepObserver observer;
  if (config.snapshot_every > 0 && !config.output_dir.empty()) {
    std::filesystem::create_directories(config.output_dir);
    observer = [&](long step, double, const LevelSet& ls, const InterfaceFields& f) {
      if (step % config.snapshot_every != 0) return;
      std::ostringstream name;
      name << "snapshot_" << std::setw(5) << std::setfill('0') << step << ".vtk";
      VtkWriter(mesh)
          .add("phi", ls.phi)
          .add("gamma", f.gamma)
          .add("normal", f.normals.n)
          .add("div_D", f.div_d)
          .add("D", f.d)
          .write(std::filesystem::path(config.output_dir) / name.str());
    };
  }
  return simulate(config, mesh, observer).record;
}

CompareResult compare_iso_aniso(const SimConfig& config) {
  config.validate();
  const TriMesh mesh = build_mesh(config);
  SimConfig iso = config, aniso = config;
  iso.variant = Variant::Iso;
  aniso.variant = Variant::Aniso;
  CompareResult out{simulate(iso, mesh), simulate(aniso, mesh), {}};
  const auto ri = out.iso.record.measured();
  const auto ra = out.aniso.record.measured();
  for (std::size_t i = 0; i < std::min(ri.size(), ra.size()); ++i) {
    out.table.push_back({ri[i].t, ri[i].efficiency, ra[i].efficiency});
  }
  return out;
}

void write_compare_csv(std::ostream& out, const CompareResult& result) {
  out << std::setprecision(17) << "t,lambda_iso,lambda_aniso\n";
  for (const auto& row : result.table) out << row.t << ',' << row.lambda_iso << ',' << row.lambda_aniso << '\n';
}

}  // namespace anisoflow
