#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "anisoflow/energy.hpp"
#include "anisoflow/levelset.hpp"
#include "anisoflow/mesh.hpp"

namespace anisoflow {

/// Closed-form homothetic shrinkage of the benchmark ellipse:
/// x(t) = x(0) exp(-3 muG t).
struct EllipseExact {
  double a0 = 0.4;
  double b0 = 0.2;
  double mu_g = 1.0;

  void validate() const;
};

struct EllipseState {
  double a = 0.0;
  double b = 0.0;
  double va = 0.0;  // inward speed of the major-axis tip
  double vb = 0.0;  // inward speed of the minor-axis tip
  double e = 0.0;   // eccentricity
};

EllipseState ellipse_exact_state(const EllipseExact& ex, double t);

/// One measured instant. Errors are NaN when the run has no analytic oracle.
struct RunRow {
  long step = 0;
  double t = 0.0;
  double a = 0.0;
  double b = 0.0;
  double ratio = 0.0;
  double va = 0.0;  // d a / dt
  double vb = 0.0;  // d b / dt
  double err_a = 0.0;
  double err_b = 0.0;
  double err_va = 0.0;
  double err_vb = 0.0;
  double efficiency = 0.0;  // Lambda
  double energy = 0.0;      // contour integral of gamma
  double length = 0.0;      // contour length
  std::string status = "ok";

  double eccentricity() const;
};

struct RunRecord {
  std::vector<RunRow> rows;
  /// Ordered key/value echo of the run configuration.
  std::vector<std::pair<std::string, std::string>> config;
  std::string status = "completed";

  /// Rows before a terminal "vanished" row.
  std::span<const RunRow> measured() const;
};

/// Maximum nodal value of a positive-inside distance field.
double measure_b(const LevelSet& ls);

/// a0 + phi at centre + (a0, 0), P1-interpolated.
double measure_a(const TriMesh& mesh, const LevelSet& ls, double a0, const Eigen::Vector2d& center);

/// Central differences of a(t) and b(t) inside, one-sided at both ends.
RunRecord series_velocity(RunRecord record);

/// Fills err_* columns as absolute differences to the oracle. The oracle
/// velocities are signed (negative while shrinking).
RunRecord apply_exact(RunRecord record, const EllipseExact& ex);

/// Trapezoidal integral of (b(t) - b_measured(t))^2 over the record.
double l2_error(const RunRecord& record, const EllipseExact& ex);

struct ContourEnergy {
  double length = 0.0;
  double energy = 0.0;

  double efficiency() const { return length / energy; }
};

/// Length and gamma-weighted length of the zero contour, gamma evaluated at
/// each segment's normal (the element gradient direction of phi).
ContourEnergy contour_energy(const TriMesh& mesh, const LevelSet& ls, const EnergyModel& model);

/// Lambda = length / integral of gamma over the contour.
double efficiency(const TriMesh& mesh, const LevelSet& ls, const EnergyModel& model);

/// Least-squares slope of ln(error) against ln(discretization).
double fit_convergence(std::span<const std::pair<double, double>> pairs);

void write_record_csv(std::ostream& out, const RunRecord& record);
void write_record_csv(const std::filesystem::path& path, const RunRecord& record);
RunRecord read_record_csv(std::istream& in);

void write_convergence_csv(std::ostream& out, std::span<const std::pair<double, double>> pairs, double slope);

}  // namespace anisoflow
