#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "anisoflow/sim.hpp"

namespace anisoflow {

/// Sectioned key = value text:
///
///   [domain]   width, height, mesh
///   [numerics] h, dt, t_end, mu, solver_rel_tol, solver_max_iter, solver_restart, supg
///   [case]     kind, center, a0, r, radius, contour
///   [model]    name, params, table, variant, force_inadmissible
///   [output]   dir, snapshot_every
///
/// Lists are comma separated, strings may be double-quoted, '#' starts a
/// comment. An empty or "unset" variant leaves it unset.
SimConfig parse_config(const std::string& text);

/// Relative paths inside the file resolve against its directory.
SimConfig load_config(const std::filesystem::path& path);

/// Writes every field; doubles use 17 significant digits so that
/// parse(serialize(c)) == c.
std::string serialize_config(const SimConfig& config);

enum class StudyAxis { MeshSize, TimeStep, Ratio };

const char* to_string(StudyAxis axis);
StudyAxis parse_study_axis(const std::string& s);

/// The [study] section (axis, values, output) on top of a base configuration.
struct StudySpec {
  StudyAxis axis = StudyAxis::MeshSize;
  std::vector<double> values;
  SimConfig base;
  std::string output_dir;

  void validate() const;
  /// Base configuration with the swept parameter set to values[i].
  SimConfig member(std::size_t i) const;
};

StudySpec parse_study(const std::string& text);
StudySpec load_study(const std::filesystem::path& path);

}  // namespace anisoflow
