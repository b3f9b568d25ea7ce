#include "anisoflow/fem.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/IterativeLinearSolvers>
#include <unsupported/Eigen/IterativeSolvers>

#include "anisoflow/error.hpp"

namespace anisoflow {

void StepParams::validate() const {
  if (!(dt > 0.0)) throw Error(ErrorKind::Validation, "dt must be positive");
  if (!(mu >= 0.0)) throw Error(ErrorKind::Validation, "mu must be non-negative");
  if (!(solver_rel_tol > 0.0 && solver_rel_tol < 1.0)) throw Error(ErrorKind::Validation, "solver_rel_tol must lie in (0, 1)");
  if (solver_max_iter < 1) throw Error(ErrorKind::Validation, "solver_max_iter must be >= 1");
  if (solver_restart < 1) throw Error(ErrorKind::Validation, "solver_restart must be >= 1");
}

double supg_tau(double h, double c_norm, double diffusivity) {
  if (c_norm < 1e-12) return 0.0;
  const double convective = h / (2.0 * c_norm);
  if (!(diffusivity > 0.0)) return convective;
  const double pe = c_norm * h / (2.0 * diffusivity);
  // coth(x) - 1/x, series below 1e-3 to avoid cancellation
  const double xi = pe < 1e-3 ? pe / 3.0 - pe * pe * pe / 45.0 : 1.0 / std::tanh(pe) - 1.0 / pe;
  return convective * xi;
}

SparseSystem assemble_step(const TriMesh& mesh, const LevelSet& phi, const TensorField& d, const VectorField& div_d,
                           const StepParams& params) {
  params.validate();
  require_field_size(mesh, phi.phi.size(), "level set");
  require_field_size(mesh, d.size(), "D tensor field");
  require_field_size(mesh, div_d.size(), "div D field");

  const Index n = mesh.num_nodes();
  const double inv_dt = 1.0 / params.dt;
  const double mu = params.mu;

  // Mid-edge quadrature: point q sits on edge (q, q+1), weight area/3.
  Eigen::Matrix3d shape;
  shape << 0.5, 0.0, 0.5,
           0.5, 0.5, 0.0,
           0.0, 0.5, 0.5;  // shape(k, q) = N_k at point q

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(mesh.num_triangles()) * 9);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);

  for (Index t = 0; t < mesh.num_triangles(); ++t) {
    const int v[3] = {mesh.triangles(0, t), mesh.triangles(1, t), mesh.triangles(2, t)};
    const double area = mesh.signed_area(t);
    const Eigen::Matrix<double, 2, 3> grads = mesh.basis_gradients(t);

    Eigen::Matrix<double, 2, 3> c_nodes;
    Eigen::Vector3d phi_nodes;
    for (int k = 0; k < 3; ++k) {
      c_nodes.col(k) << mu * div_d.x[v[k]], mu * div_d.y[v[k]];
      phi_nodes[k] = phi.phi[v[k]];
    }
    double tau = 0.0;
    if (params.supg) {
      const Eigen::Vector2d c_mean = c_nodes.rowwise().sum() / 3.0;
      const double c_norm = c_mean.norm();
      if (c_norm >= 1e-12) {
        const Eigen::Matrix2d d_mean = (d[v[0]] + d[v[1]] + d[v[2]]) / 3.0;
        const Eigen::Vector2d dir = c_mean / c_norm;
        tau = supg_tau(mesh.longest_edge(t), c_norm, mu * dir.dot(d_mean * dir));
      }
    }

    Eigen::Matrix3d local = Eigen::Matrix3d::Zero();
    Eigen::Vector3d local_rhs = Eigen::Vector3d::Zero();
    const double w = area / 3.0;
    for (int q = 0; q < 3; ++q) {
      const Eigen::Vector3d nq = shape.col(q);
      Eigen::Matrix2d dq = Eigen::Matrix2d::Zero();
      for (int k = 0; k < 3; ++k) dq += nq[k] * d[v[k]];
      const Eigen::Vector2d cq = c_nodes * nq;
      const Eigen::RowVector3d c_dot_grad = cq.transpose() * grads;  // c . grad N_j
      const Eigen::Vector3d test = nq + tau * c_dot_grad.transpose();  // N_i + tau c . grad N_i
      local += w * (inv_dt * test * nq.transpose() + mu * grads.transpose() * dq * grads + test * c_dot_grad);
      local_rhs += w * inv_dt * nq.dot(phi_nodes) * test;
    }
    for (int i = 0; i < 3; ++i) {
      rhs[v[i]] += local_rhs[i];
      for (int j = 0; j < 3; ++j) triplets.emplace_back(v[i], v[j], local(i, j));
    }
  }

  SparseSystem system;
  system.matrix.resize(n, n);
  system.matrix.setFromTriplets(triplets.begin(), triplets.end());
  system.rhs = std::move(rhs);
  system.unknown = phi.phi;
  return system;
}

SolveStats solve(SparseSystem& system, const StepParams& params) {
  params.validate();
  const Index n = system.matrix.rows();
  if (system.matrix.cols() != n || system.rhs.size() != n) throw Error(ErrorKind::FieldMismatch, "system dimensions");
  if (system.unknown.size() != n || !system.unknown.allFinite()) system.unknown = Eigen::VectorXd::Zero(n);

  SolveStats stats;
  const double rhs_norm = system.rhs.norm();
  if (rhs_norm == 0.0) {
    system.unknown.setZero();
    return stats;
  }
  // Accept the initial guess when it already meets the target.
  const double initial = (system.rhs - system.matrix * system.unknown).norm() / rhs_norm;
  if (initial <= params.solver_rel_tol) {
    stats.relative_residual = initial;
    return stats;
  }

  Eigen::GMRES<SparseMatrix, Eigen::IncompleteLUT<double>> gmres;
  gmres.preconditioner().setDroptol(1e-6);
  gmres.preconditioner().setFillfactor(10);
  gmres.set_restart(params.solver_restart);
  gmres.setMaxIterations(params.solver_max_iter);
  gmres.compute(system.matrix);
  if (gmres.preconditioner().info() != Eigen::Success) throw NoConvergenceError(initial, 0);

  // The Krylov estimate is a preconditioned residual; tighten until the true
  // residual meets the target.
  Eigen::VectorXd x = system.unknown;
  double achieved = initial;
  double inner_tol = params.solver_rel_tol;
  for (int attempt = 0; attempt < 4; ++attempt) {
    gmres.setTolerance(inner_tol);
    x = gmres.solveWithGuess(system.rhs, x);
    stats.iterations += static_cast<long>(gmres.iterations());
    if (!x.allFinite()) throw NoConvergenceError(achieved, stats.iterations);
    achieved = (system.rhs - system.matrix * x).norm() / rhs_norm;
    if (achieved <= params.solver_rel_tol) break;
    if (gmres.info() != Eigen::Success && gmres.info() != Eigen::NoConvergence) break;
    inner_tol *= 0.1;
  }
  stats.relative_residual = achieved;
  if (!(achieved <= params.solver_rel_tol)) throw NoConvergenceError(achieved, stats.iterations);
  system.unknown = std::move(x);
  return stats;
}

InterfaceFields Stepper::fields(const LevelSet& ls, const EnergyModel& model, Variant variant) const {
  require_field_size(*mesh_, ls.phi.size(), "level set");
  InterfaceFields out;
  out.normals = normals(recovery_, ls);
  EnergyFields energy = evaluate_energy(model, out.normals.n, variant);
  out.gamma = std::move(energy.gamma);
  out.d = std::move(energy.d);
  out.div_d = recovery_.divergence(out.d);
  return out;
}

LevelSet Stepper::advance(const LevelSet& ls, const InterfaceFields& fields, const StepParams& params,
                          SolveStats* stats) const {
  SparseSystem system = assemble_step(*mesh_, ls, fields.d, fields.div_d, params);
  const SolveStats s = solve(system, params);
  if (stats) *stats = s;
  LevelSet next = reinitialize(*mesh_, LevelSet{std::move(system.unknown), ls.band_width});
  if (!next.phi.allFinite()) throw Error(ErrorKind::NoConvergence, "non-finite level set after step");
  return next;
}

void require_admissible(const EnergyModel& model, Variant variant) {
  if (variant != Variant::Aniso) return;
  const PdReport report = check_positive_definite(model);
  if (!report.admissible) {
    std::ostringstream msg;
    msg << "model '" << model.name << "' has a non positive-definite D tensor (PD / |Dxy| < sqrt(Dxx Dyy) check): "
        << "worst eigenvalue " << report.worst_eigenvalue << " at lambda = " << report.worst_angle
        << ", min Dxy margin " << report.dxy_margin_min;
    throw Error(ErrorKind::Inadmissible, msg.str());
  }
}

LevelSet advance(const TriMesh& mesh, const LevelSet& phi, const EnergyModel& model, Variant variant,
                 const StepParams& params, bool force_inadmissible) {
  if (!force_inadmissible) require_admissible(model, variant);
  const Stepper stepper(mesh);
  return stepper.advance(phi, stepper.fields(phi, model, variant), params);
}

}  // namespace anisoflow
