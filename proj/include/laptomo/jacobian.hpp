// Copyright (c) the laptomo authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include <Eigen/Dense>

#include "laptomo/assembly.hpp"
#include "laptomo/fields.hpp"
#include "laptomo/forward.hpp"
#include "laptomo/mesh.hpp"
#include "laptomo/shifted_solver.hpp"
#include "laptomo/talbot.hpp"

namespace laptomo {

/// Geometry and acquisition of a transient pumping experiment: sources,
/// receivers and measurement times. Measurements are ordered source-major,
/// then receiver, then time.
struct ThtExperiment {
  const Mesh2D* mesh = nullptr;
  std::vector<Eigen::Vector2d> sources;
  std::vector<double> rates;  // [m^3/s], one per source
  std::vector<Eigen::Vector2d> receivers;
  std::vector<double> times;  // [s]
  int n_quad = 20;
  TalbotParams contour;
  SolverConfig solver;
  bool include_storativity = false;
  bool storativity_z_factor = true;  // keep the z_k factor in the storativity row

  int n_measurements() const {
    return static_cast<int>(sources.size() * receivers.size() * times.size());
  }
  int measurement_index(int source, int receiver, int time) const {
    return (source * static_cast<int>(receivers.size()) + receiver) *
               static_cast<int>(times.size()) +
           time;
  }
};

struct JacobianResult {
  Eigen::MatrixXd jacobian;     // n_measurements x n_parameters
  Eigen::VectorXd predictions;  // h(s) from the same forward solves
};

/// Adjoint fields psi_k solving (K + z_k M) psi_k = -e_m on the retained half
/// contour; the pencil is symmetric, so forward and adjoint share shifts and
/// preconditioner factorizations.
Eigen::MatrixXcd solve_adjoint_fields(const ShiftedPencil& pencil,
                                      const Eigen::VectorXcd& receiver,
                                      const TalbotContour& contour, const SolverConfig& solver);

/// Per-element log-conductivity sensitivities
///   dI/ds_K[e] = 2 Re sum_k w_k kappa_e area_e (grad phi_k . grad psi_k)|_e;
/// P1 gradients are element-constant, so the element integral is exact.
Eigen::VectorXd sensitivity_row_conductivity(const Mesh2D& mesh, const AssembledOperators& ops,
                                             const Eigen::MatrixXcd& forward_fields,
                                             const Eigen::MatrixXcd& adjoint_fields,
                                             const TalbotContour& contour,
                                             const Eigen::VectorXd& kappa);

/// Per-element log-storativity sensitivities
///   dI/ds_S[e] = 2 Re sum_k w_k z_k^p S_e int_e phi_k psi_k,
/// with p = 1 when include_z_factor (the consistent discrete adjoint) and
/// p = 0 otherwise; the element product integral is the exact P1 value.
Eigen::VectorXd sensitivity_row_storativity(const Mesh2D& mesh, const AssembledOperators& ops,
                                            const Eigen::MatrixXcd& forward_fields,
                                            const Eigen::MatrixXcd& adjoint_fields,
                                            const TalbotContour& contour,
                                            const Eigen::VectorXd& storativity,
                                            bool include_z_factor);

/// Ties the experiment geometry to log fields: predictions h(s) and the
/// measurement Jacobian, with forward solves shared per (source, time) and
/// adjoint solves per (receiver, time). No time history is ever stored.
class ThtForwardModel {
 public:
  ThtForwardModel(ThtExperiment experiment, Eigen::VectorXd log_storativity);

  const ThtExperiment& experiment() const { return experiment_; }
  int n_measurements() const { return experiment_.n_measurements(); }
  int n_parameters() const;

  Eigen::VectorXd predict(const Eigen::VectorXd& log_kappa) const;
  Eigen::VectorXd predict_with(const Eigen::VectorXd& log_kappa,
                               const Eigen::VectorXd& log_storativity) const;
  JacobianResult jacobian(const Eigen::VectorXd& log_kappa) const;

 private:
  ThtExperiment experiment_;
  Eigen::VectorXd log_storativity_;
  std::vector<Eigen::VectorXd> source_weights_;    // full-node vectors
  std::vector<Eigen::VectorXd> receiver_weights_;  // full-node vectors
};

JacobianResult assemble_jacobian(const ThtExperiment& experiment,
                                 const Eigen::VectorXd& log_kappa,
                                 const Eigen::VectorXd& log_storativity);

}  // namespace laptomo
