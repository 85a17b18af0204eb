// Copyright (c) the laptomo authors.
// SPDX-License-Identifier: Apache-2.0

#include "laptomo/forward.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/SparseCholesky>

#include "laptomo/errors.hpp"

namespace laptomo {

namespace {

void check_problem(const ForwardProblem& problem) {
  if (problem.ops == nullptr) {
    throw std::invalid_argument("solve_forward: missing operators");
  }
  if (problem.times.empty()) {
    throw std::invalid_argument("solve_forward: no target times");
  }
  double previous = 0.0;
  for (double t : problem.times) {
    if (!(t > 0.0)) throw std::invalid_argument("solve_forward: times must be positive");
    if (t < previous) throw std::invalid_argument("solve_forward: times must be ascending");
    previous = t;
  }
}

std::vector<Complex> contour_shifts(const TalbotContour& contour) {
  return {contour.nodes.data(), contour.nodes.data() + contour.n_half()};
}

/// Solves one family (K + z_k M) x = rhs with the configured solver and
/// returns the solutions; reports convergence into diag.
Eigen::MatrixXcd solve_family(const ShiftedPencil& pencil, const Eigen::VectorXcd& rhs,
                              const std::vector<Complex>& shifts, const SolverConfig& solver,
                              TimeDiagnostics* diag) {
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
  if (diag != nullptr) {
    diag->iterations = std::max(diag->iterations, result.iterations);
    diag->all_converged = diag->all_converged && result.all_converged;
    for (const auto& st : result.shifts) {
      diag->shift_residuals.push_back(st.true_residual);
    }
  }
  if (!result.all_converged) {
    std::ostringstream msg;
    msg << "shifted solve: " << result.unconverged().size() << " of " << shifts.size()
        << " shifts unconverged after " << result.iterations << " iterations";
    throw ConvergenceError(msg.str(), result.unconverged());
  }
  return std::move(result.solutions);
}

}  // namespace

HeadSolution solve_forward(const ForwardProblem& problem, const SolverConfig& solver) {
  check_problem(problem);
  ShiftedPencil pencil(problem.ops->stiffness, problem.ops->mass);
  return solve_forward(pencil, problem, solver);
}

HeadSolution solve_forward(const ShiftedPencil& pencil, const ForwardProblem& problem,
                           const SolverConfig& solver) {
  check_problem(problem);
  const int n_times = static_cast<int>(problem.times.size());
  const bool with_initial = problem.initial_head.size() > 0 &&
                            problem.initial_head.cwiseAbs().maxCoeff() > 0.0;

  HeadSolution out;
  out.heads.resize(pencil.rows(), n_times);
  out.diagnostics.resize(static_cast<std::size_t>(n_times));

  const Eigen::VectorXcd rhs_source = problem.source.cast<Complex>();
  Eigen::VectorXcd rhs_initial;
  if (with_initial) {
    rhs_initial = pencil.apply_mass(problem.initial_head.cast<Complex>());
  }

  for (int it = 0; it < n_times; ++it) {
    const TalbotContour contour = build_contour(problem.n_quad, problem.times[static_cast<std::size_t>(it)], problem.contour);
    const std::vector<Complex> shifts = contour_shifts(contour);
    auto& diag = out.diagnostics[static_cast<std::size_t>(it)];

    Eigen::MatrixXcd values(pencil.rows(), contour.n_half());
    if (problem.rate != 0.0) {
      const Eigen::MatrixXcd x_source = solve_family(pencil, rhs_source, shifts, solver, &diag);
      for (int k = 0; k < contour.n_half(); ++k) {
        values.col(k) = qhat_step(problem.rate, contour.nodes[k]) * x_source.col(k);
      }
    } else {
      values.setZero();
    }
    if (with_initial) {
      values += solve_family(pencil, rhs_initial, shifts, solver, &diag);
    }
    out.heads.col(it) = inverse_laplace_sum(contour, values);
  }
  return out;
}

HeadSolution solve_forward_batch(const ForwardProblem& problem, const SolverConfig& solver) {
  check_problem(problem);
  ShiftedPencil pencil(problem.ops->stiffness, problem.ops->mass);
  return solve_forward_batch(pencil, problem, solver);
}

HeadSolution solve_forward_batch(const ShiftedPencil& pencil, const ForwardProblem& problem,
                                 const SolverConfig& solver) {
  check_problem(problem);
  const int n_times = static_cast<int>(problem.times.size());
  const bool with_initial = problem.initial_head.size() > 0 &&
                            problem.initial_head.cwiseAbs().maxCoeff() > 0.0;

  std::vector<TalbotContour> contours;
  contours.reserve(static_cast<std::size_t>(n_times));
  std::vector<Complex> pooled;
  for (int it = 0; it < n_times; ++it) {
    contours.push_back(build_contour(problem.n_quad, problem.times[static_cast<std::size_t>(it)], problem.contour));
    const auto shifts = contour_shifts(contours.back());
    pooled.insert(pooled.end(), shifts.begin(), shifts.end());
  }

  const PreconditionerSchedule schedule = select_preconditioner_shifts(pooled);
  TimeDiagnostics pooled_diag;

  HeadSolution out;
  out.heads.resize(pencil.rows(), n_times);

  auto solve_pooled = [&](const Eigen::VectorXcd& rhs) {
    ShiftedSolveOptions options;
    options.variant = solver.variant;
    options.tol = solver.tol;
    options.maxit = solver.maxit;
    options.record_history = false;
    if (solver.kind == SolverKind::Direct) {
      return solve_shifted_direct(pencil, rhs, pooled);
    }
    ShiftedSolveResult result = solve_shifted_flexible(pencil, rhs, pooled, schedule, options);
    pooled_diag.iterations = std::max(pooled_diag.iterations, result.iterations);
    pooled_diag.all_converged = pooled_diag.all_converged && result.all_converged;
    for (const auto& st : result.shifts) {
      pooled_diag.shift_residuals.push_back(st.true_residual);
    }
    if (!result.all_converged) {
      std::ostringstream msg;
      msg << "batch solve: " << result.unconverged().size() << " of " << pooled.size()
          << " pooled shifts unconverged after " << result.iterations << " iterations";
      throw ConvergenceError(msg.str(), result.unconverged());
    }
    return std::move(result.solutions);
  };

  const Eigen::MatrixXcd x_source = problem.rate != 0.0
                                        ? solve_pooled(problem.source.cast<Complex>())
                                        : Eigen::MatrixXcd();
  Eigen::MatrixXcd x_initial;
  if (with_initial) {
    x_initial = solve_pooled(pencil.apply_mass(problem.initial_head.cast<Complex>()));
  }

  int offset = 0;
  for (int it = 0; it < n_times; ++it) {
    const TalbotContour& contour = contours[static_cast<std::size_t>(it)];
    Eigen::MatrixXcd values = Eigen::MatrixXcd::Zero(pencil.rows(), contour.n_half());
    for (int k = 0; k < contour.n_half(); ++k) {
      if (problem.rate != 0.0) {
        values.col(k) = qhat_step(problem.rate, contour.nodes[k]) * x_source.col(offset + k);
      }
      if (with_initial) {
        values.col(k) += x_initial.col(offset + k);
      }
    }
    out.heads.col(it) = inverse_laplace_sum(contour, values);
    offset += contour.n_half();
  }

  out.diagnostics.assign(static_cast<std::size_t>(n_times), pooled_diag);
  return out;
}

Eigen::MatrixXd crank_nicolson(const AssembledOperators& ops, const Eigen::VectorXd& source,
                               double rate, const Eigen::VectorXd& initial_head, double dt,
                               const std::vector<double>& sample_times, int* steps_out) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("crank_nicolson: dt must be positive");
  }
  if (sample_times.empty()) {
    throw std::invalid_argument("crank_nicolson: no sample times");
  }
  const double t_end = *std::max_element(sample_times.begin(), sample_times.end());

  const SparseReal lhs = ops.mass + (0.5 * dt) * ops.stiffness;
  Eigen::SimplicialLDLT<SparseReal> solver(lhs);
  if (solver.info() != Eigen::Success) {
    throw FactorizationError("crank_nicolson: factorization of M + dt/2 K failed");
  }
  const SparseReal rhs_op = ops.mass - (0.5 * dt) * ops.stiffness;
  const Eigen::VectorXd forcing = dt * rate * source;

  Eigen::VectorXd head = initial_head.size() > 0
                             ? initial_head
                             : Eigen::VectorXd::Zero(ops.n_free());

  Eigen::MatrixXd samples(ops.n_free(), static_cast<Eigen::Index>(sample_times.size()));
  std::vector<bool> filled(sample_times.size(), false);

  auto record = [&](double t_prev, const Eigen::VectorXd& head_prev, double t_now,
                    const Eigen::VectorXd& head_now) {
    for (std::size_t s = 0; s < sample_times.size(); ++s) {
      if (filled[s]) continue;
      const double target = sample_times[s];
      if (target <= t_now + 1e-9 * dt) {
        if (std::abs(target - t_now) <= 1e-9 * dt || t_now == t_prev) {
          samples.col(static_cast<Eigen::Index>(s)) = head_now;
        } else {
          const double w = (target - t_prev) / (t_now - t_prev);
          samples.col(static_cast<Eigen::Index>(s)) = (1.0 - w) * head_prev + w * head_now;
        }
        filled[s] = true;
      }
    }
  };

  record(0.0, head, 0.0, head);

  int steps = 0;
  double t = 0.0;
  Eigen::VectorXd head_prev = head;
  while (t < t_end - 1e-9 * dt) {
    head_prev = head;
    head = solver.solve(rhs_op * head + forcing);
    const double t_prev = t;
    t += dt;
    ++steps;
    record(t_prev, head_prev, t, head);
  }
  if (steps_out != nullptr) *steps_out = steps;
  return samples;
}

}  // namespace laptomo
