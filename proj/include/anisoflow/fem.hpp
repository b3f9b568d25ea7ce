#pragma once

#include <Eigen/SparseCore>

#include "anisoflow/energy.hpp"
#include "anisoflow/fields.hpp"
#include "anisoflow/levelset.hpp"
#include "anisoflow/mesh.hpp"
#include "anisoflow/recovery.hpp"

namespace anisoflow {

struct StepParams {
  double dt = 5e-4;
  double mu = 1.0;
  double solver_rel_tol = 1e-8;
  int solver_max_iter = 2000;
  int solver_restart = 50;
  bool supg = true;

  void validate() const;
};

/// Linear system of one backward-Euler step, node-indexed.
struct SparseSystem {
  SparseMatrix matrix;
  Eigen::VectorXd rhs;
  Eigen::VectorXd unknown;
};

/// Weak form, for every P1 test function w:
///   int (phi1 - phi0)/dt w + int mu D grad w . grad phi1 + int mu (div D) . grad phi1 w = 0
/// with the time and convective terms tested against w + tau_e c . grad w,
/// c = mu div D and tau_e from supg_tau. D and div D are frozen at the old
/// step. No boundary integral (natural condition). The unknown is seeded with
/// the old field as the initial guess.
SparseSystem assemble_step(const TriMesh& mesh, const LevelSet& phi, const TensorField& d, const VectorField& div_d,
                           const StepParams& params);

/// Streamline parameter h/(2|c|) (coth Pe - 1/Pe), Pe = |c| h / (2 k), with k
/// the diffusivity along c. Tends to h/(2|c|) as k -> 0 and is used as such
/// when k <= 0. Zero when |c| < 1e-12.
double supg_tau(double h, double c_norm, double diffusivity);

struct SolveStats {
  long iterations = 0;
  double relative_residual = 0.0;
};

/// GMRES(restart) with an ILUT preconditioner; stores the solution in
/// system.unknown. Throws NoConvergenceError when the residual target is missed.
SolveStats solve(SparseSystem& system, const StepParams& params);

/// Nodal fields derived from a reinitialized level set.
struct InterfaceFields {
  NormalField normals;
  ScalarField gamma;
  TensorField d;
  VectorField div_d;
};

/// Owns the per-mesh operators needed by the time loop.
class Stepper {
 public:
  explicit Stepper(const TriMesh& mesh) : mesh_(&mesh), recovery_(mesh) {}

  const TriMesh& mesh() const { return *mesh_; }
  const GradientRecovery& recovery() const { return recovery_; }

  InterfaceFields fields(const LevelSet& ls, const EnergyModel& model, Variant variant) const;

  /// Assemble, solve and reinitialize; `fields` must come from `ls`.
  LevelSet advance(const LevelSet& ls, const InterfaceFields& fields, const StepParams& params,
                   SolveStats* stats = nullptr) const;

 private:
  const TriMesh* mesh_;
  GradientRecovery recovery_;
};

/// One full step: normals -> gamma, D, div D -> assemble -> solve -> reinitialize.
/// Rejects non positive-definite models for the aniso variant unless forced.
LevelSet advance(const TriMesh& mesh, const LevelSet& phi, const EnergyModel& model, Variant variant,
                 const StepParams& params, bool force_inadmissible = false);

void require_admissible(const EnergyModel& model, Variant variant);

}  // namespace anisoflow
