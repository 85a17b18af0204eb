// Copyright (c) the laptomo authors.
// SPDX-License-Identifier: Apache-2.0

#include "laptomo/jacobian.hpp"

#include <sstream>
#include <stdexcept>

#include "laptomo/errors.hpp"

namespace laptomo {

namespace {

std::vector<Complex> contour_shifts(const TalbotContour& contour) {
  return {contour.nodes.data(), contour.nodes.data() + contour.n_half()};
}

Eigen::MatrixXcd solve_family_or_throw(const ShiftedPencil& pencil, const Eigen::VectorXcd& rhs,
                                       const std::vector<Complex>& shifts,
                                       const SolverConfig& solver, const char* what) {
  if (solver.kind == SolverKind::Direct) {
    return solve_shifted_direct(pencil, rhs, shifts);
  }
  ShiftedSolveOptions options;
  options.variant = solver.variant;
  options.tol = solver.tol;
  options.maxit = solver.maxit;
  options.record_history = false;
  ShiftedSolveResult result =
      solver.kind == SolverKind::Single
          ? solve_shifted_single(pencil, rhs, shifts, select_preconditioner_shifts(shifts).taus[0],
                                 options)
          : solve_shifted_flexible(pencil, rhs, shifts, select_preconditioner_shifts(shifts),
                                   options);
  if (!result.all_converged) {
    std::ostringstream msg;
    msg << what << ": " << result.unconverged().size() << " of " << shifts.size()
        << " shifts unconverged after " << result.iterations << " iterations";
    throw ConvergenceError(msg.str(), result.unconverged());
  }
  return std::move(result.solutions);
}

}  // namespace

Eigen::MatrixXcd solve_adjoint_fields(const ShiftedPencil& pencil,
                                      const Eigen::VectorXcd& receiver,
                                      const TalbotContour& contour, const SolverConfig& solver) {
  const Eigen::VectorXcd rhs = -receiver;
  if (rhs.norm() == 0.0) {
    return Eigen::MatrixXcd::Zero(pencil.rows(), contour.n_half());
  }
  return solve_family_or_throw(pencil, rhs, contour_shifts(contour), solver, "adjoint solve");
}

Eigen::VectorXd sensitivity_row_conductivity(const Mesh2D& mesh, const AssembledOperators& ops,
                                             const Eigen::MatrixXcd& forward_fields,
                                             const Eigen::MatrixXcd& adjoint_fields,
                                             const TalbotContour& contour,
                                             const Eigen::VectorXd& kappa) {
  if (forward_fields.cols() != contour.n_half() || adjoint_fields.cols() != contour.n_half()) {
    throw std::invalid_argument("sensitivity_row: fields do not match the contour");
  }
  const int n_half = contour.n_half();
  Eigen::VectorXd row(mesh.n_elements());
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto& el = mesh.elements[static_cast<std::size_t>(e)];
    const auto grads = element_basis_gradients(mesh, e);
    const double area = element_area(mesh, e);
    Complex accum = 0.0;
    for (int k = 0; k < n_half; ++k) {
      Complex gpx = 0.0, gpy = 0.0, gqx = 0.0, gqy = 0.0;
      for (int i = 0; i < 3; ++i) {
        const int dof = ops.node_to_free[static_cast<std::size_t>(el[i])];
        if (dof < 0) continue;  // Dirichlet value is zero
        gpx += forward_fields(dof, k) * grads[i].x();
        gpy += forward_fields(dof, k) * grads[i].y();
        gqx += adjoint_fields(dof, k) * grads[i].x();
        gqy += adjoint_fields(dof, k) * grads[i].y();
      }
      accum += contour.weights[k] * (gpx * gqx + gpy * gqy);
    }
    row[e] = 2.0 * accum.real() * kappa[e] * area;
  }
  return row;
}

Eigen::VectorXd sensitivity_row_storativity(const Mesh2D& mesh, const AssembledOperators& ops,
                                            const Eigen::MatrixXcd& forward_fields,
                                            const Eigen::MatrixXcd& adjoint_fields,
                                            const TalbotContour& contour,
                                            const Eigen::VectorXd& storativity,
                                            bool include_z_factor) {
  if (forward_fields.cols() != contour.n_half() || adjoint_fields.cols() != contour.n_half()) {
    throw std::invalid_argument("sensitivity_row: fields do not match the contour");
  }
  const int n_half = contour.n_half();
  Eigen::VectorXd row(mesh.n_elements());
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto& el = mesh.elements[static_cast<std::size_t>(e)];
    const double area = element_area(mesh, e);
    Complex accum = 0.0;
    for (int k = 0; k < n_half; ++k) {
      Complex phi[3], psi[3];
      for (int i = 0; i < 3; ++i) {
        const int dof = ops.node_to_free[static_cast<std::size_t>(el[i])];
        phi[i] = dof < 0 ? Complex(0.0) : forward_fields(dof, k);
        psi[i] = dof < 0 ? Complex(0.0) : adjoint_fields(dof, k);
      }
      // Exact P1 product integral: area/12 sum_ij (1 + delta_ij) phi_i psi_j.
      Complex integral = 0.0;
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          integral += (i == j ? 2.0 : 1.0) * phi[i] * psi[j];
        }
      }
      integral *= area / 12.0;
      const Complex z_factor = include_z_factor ? contour.nodes[k] : Complex(1.0);
      accum += contour.weights[k] * z_factor * integral;
    }
    row[e] = 2.0 * accum.real() * storativity[e];
  }
  return row;
}

ThtForwardModel::ThtForwardModel(ThtExperiment experiment, Eigen::VectorXd log_storativity)
    : experiment_(std::move(experiment)), log_storativity_(std::move(log_storativity)) {
  if (experiment_.mesh == nullptr) {
    throw std::invalid_argument("ThtForwardModel: missing mesh");
  }
  if (experiment_.sources.empty() || experiment_.receivers.empty() || experiment_.times.empty()) {
    throw std::invalid_argument("ThtForwardModel: experiment must be nonempty");
  }
  if (experiment_.rates.size() != experiment_.sources.size()) {
    throw std::invalid_argument("ThtForwardModel: one rate per source required");
  }
  if (log_storativity_.size() != experiment_.mesh->n_elements()) {
    throw std::invalid_argument("ThtForwardModel: one storativity value per element required");
  }
  for (const auto& p : experiment_.sources) {
    source_weights_.push_back(point_source(*experiment_.mesh, p.x(), p.y()));
  }
  for (const auto& p : experiment_.receivers) {
    receiver_weights_.push_back(point_source(*experiment_.mesh, p.x(), p.y()));
  }
}

int ThtForwardModel::n_parameters() const {
  const int n = experiment_.mesh->n_elements();
  return experiment_.include_storativity ? 2 * n : n;
}

Eigen::VectorXd ThtForwardModel::predict(const Eigen::VectorXd& log_kappa) const {
  return predict_with(log_kappa, log_storativity_);
}

Eigen::VectorXd ThtForwardModel::predict_with(const Eigen::VectorXd& log_kappa,
                                              const Eigen::VectorXd& log_storativity) const {
  const Mesh2D& mesh = *experiment_.mesh;
  const AssembledOperators ops = assemble(mesh, log_kappa.array().exp().matrix(),
                                          log_storativity.array().exp().matrix());
  ShiftedPencil pencil(ops.stiffness, ops.mass);

  const int n_rec = static_cast<int>(experiment_.receivers.size());
  const int n_times = static_cast<int>(experiment_.times.size());
  Eigen::VectorXd predictions(n_measurements());

  for (int s = 0; s < static_cast<int>(experiment_.sources.size()); ++s) {
    ForwardProblem problem;
    problem.ops = &ops;
    problem.source = ops.restrict_to_free(source_weights_[static_cast<std::size_t>(s)]);
    problem.rate = experiment_.rates[static_cast<std::size_t>(s)];
    problem.times = experiment_.times;
    problem.n_quad = experiment_.n_quad;
    problem.contour = experiment_.contour;
    const HeadSolution heads = solve_forward(pencil, problem, experiment_.solver);
    for (int r = 0; r < n_rec; ++r) {
      const Eigen::VectorXd e_r =
          ops.restrict_to_free(receiver_weights_[static_cast<std::size_t>(r)]);
      for (int t = 0; t < n_times; ++t) {
        predictions[experiment_.measurement_index(s, r, t)] = e_r.dot(heads.heads.col(t));
      }
    }
  }
  return predictions;
}

JacobianResult ThtForwardModel::jacobian(const Eigen::VectorXd& log_kappa) const {
  const Mesh2D& mesh = *experiment_.mesh;
  const Eigen::VectorXd kappa = log_kappa.array().exp().matrix();
  const Eigen::VectorXd storativity = log_storativity_.array().exp().matrix();
  const AssembledOperators ops = assemble(mesh, kappa, storativity);
  ShiftedPencil pencil(ops.stiffness, ops.mass);

  const int n_src = static_cast<int>(experiment_.sources.size());
  const int n_rec = static_cast<int>(experiment_.receivers.size());
  const int n_times = static_cast<int>(experiment_.times.size());
  const int n_elem = mesh.n_elements();

  JacobianResult out;
  out.jacobian.resize(n_measurements(), n_parameters());
  out.predictions.resize(n_measurements());

  for (int t = 0; t < n_times; ++t) {
    const TalbotContour contour =
        build_contour(experiment_.n_quad, experiment_.times[static_cast<std::size_t>(t)],
                      experiment_.contour);
    const std::vector<Complex> shifts = contour_shifts(contour);

    // Forward fields phi_k (with the source transform applied) per source.
    std::vector<Eigen::MatrixXcd> forward_fields;
    forward_fields.reserve(static_cast<std::size_t>(n_src));
    for (int s = 0; s < n_src; ++s) {
      const Eigen::VectorXcd b =
          ops.restrict_to_free(source_weights_[static_cast<std::size_t>(s)]).cast<Complex>();
      Eigen::MatrixXcd fields =
          solve_family_or_throw(pencil, b, shifts, experiment_.solver, "forward solve");
      for (int k = 0; k < contour.n_half(); ++k) {
        fields.col(k) *= qhat_step(experiment_.rates[static_cast<std::size_t>(s)], contour.nodes[k]);
      }
      forward_fields.push_back(std::move(fields));
    }

    for (int r = 0; r < n_rec; ++r) {
      const Eigen::VectorXcd e_r =
          ops.restrict_to_free(receiver_weights_[static_cast<std::size_t>(r)]).cast<Complex>();
      const Eigen::MatrixXcd adjoint_fields =
          solve_adjoint_fields(pencil, e_r, contour, experiment_.solver);

      for (int s = 0; s < n_src; ++s) {
        const int row = experiment_.measurement_index(s, r, t);
        out.jacobian.row(row).head(n_elem) =
            sensitivity_row_conductivity(mesh, ops, forward_fields[static_cast<std::size_t>(s)],
                                         adjoint_fields, contour, kappa);
        if (experiment_.include_storativity) {
          out.jacobian.row(row).tail(n_elem) = sensitivity_row_storativity(
              mesh, ops, forward_fields[static_cast<std::size_t>(s)], adjoint_fields, contour,
              storativity, experiment_.storativity_z_factor);
        }
        Eigen::VectorXcd at_receiver = forward_fields[static_cast<std::size_t>(s)].transpose() * e_r;
        out.predictions[row] = inverse_laplace_sum(contour, at_receiver);
      }
    }
  }
  return out;
}

JacobianResult assemble_jacobian(const ThtExperiment& experiment,
                                 const Eigen::VectorXd& log_kappa,
                                 const Eigen::VectorXd& log_storativity) {
  ThtForwardModel model(experiment, log_storativity);
  return model.jacobian(log_kappa);
}

}  // namespace laptomo
