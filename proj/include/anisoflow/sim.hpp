#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "anisoflow/bench.hpp"
#include "anisoflow/energy.hpp"
#include "anisoflow/fem.hpp"
#include "anisoflow/levelset.hpp"
#include "anisoflow/mesh.hpp"

namespace anisoflow {

enum class CaseKind { Ellipse, Circle, Custom };

const char* to_string(CaseKind kind);
CaseKind parse_case_kind(const std::string& s);

struct SimConfig {
  // [domain]
  double width = 1.0;
  double height = 1.0;
  std::string mesh_file;  // optional MSH 2.2 file replacing the generated grid
  // [numerics]
  double h = 3e-3;
  double dt = 5e-4;
  double t_end = 1e-2;
  double mu = 1.0;
  double solver_rel_tol = 1e-8;
  int solver_max_iter = 2000;
  int solver_restart = 50;
  bool supg = true;
  // [case]
  CaseKind kind = CaseKind::Ellipse;
  Eigen::Vector2d center{0.5, 0.5};
  double a0 = 0.4;
  double ratio = 2.0;
  double radius = 0.4;
  std::string contour_file;
  // [model]
  std::string model = "ellipse";
  std::vector<double> model_params;
  std::string model_table;
  std::optional<Variant> variant = Variant::Aniso;
  bool force_inadmissible = false;
  // [output]
  std::string output_dir;
  int snapshot_every = 0;

  void validate() const;
  StepParams step_params() const;

  bool operator==(const SimConfig&) const = default;
};

/// Ordered key/value echo used in CSV headers.
std::vector<std::pair<std::string, std::string>> config_echo(const SimConfig& config);

TriMesh build_mesh(const SimConfig& config);
LevelSet initial_level_set(const SimConfig& config, const TriMesh& mesh);

/// Energy model for the current state. The ellipse benchmark model tracks the
/// measured minor axis: gamma = b(t)^2 (r^2 sin^2 theta + cos^2 theta).
EnergyModel model_for_state(const SimConfig& config, const LevelSet& ls);

/// Closed-form reference for ellipse runs with the ellipse model; the iso
/// variant moves at a third of the rate.
std::optional<EllipseExact> ellipse_oracle(const SimConfig& config);

struct RunResult {
  RunRecord record;
  LevelSet final_state;
  std::optional<Contour> final_contour;
};

/// Observer invoked after each recorded step with the current state.
using StepObserver = std::function<void(long step, double t, const LevelSet& ls, const InterfaceFields& fields)>;

/// Runs the time loop on an existing mesh: initialize, then per step assemble,
/// solve, advance t, reinitialize, refresh gamma/D/div D and record. Stops with
/// a terminal "vanished" row when the interface disappears.
RunResult simulate(const SimConfig& config, const TriMesh& mesh, const StepObserver& observer = {});

/// Builds the mesh, validates the configuration and runs; writes VTK
/// snapshots to config.output_dir every snapshot_every steps when both are set.
RunRecord run(const SimConfig& config);

struct CompareRow {
  double t = 0.0;
  double lambda_iso = 0.0;
  double lambda_aniso = 0.0;
};

struct CompareResult {
  RunResult iso;
  RunResult aniso;
  std::vector<CompareRow> table;
};

/// Runs both variants from the same mesh and initial field.
CompareResult compare_iso_aniso(const SimConfig& config);

void write_compare_csv(std::ostream& out, const CompareResult& result);

}  // namespace anisoflow
