// Copyright (c) the laptomo authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include <Eigen/Dense>

#include "laptomo/assembly.hpp"
#include "laptomo/shifted_solver.hpp"
#include "laptomo/talbot.hpp"

namespace laptomo {

enum class SolverKind { Single, Flexible, Direct };

struct SolverConfig {
  SolverKind kind = SolverKind::Flexible;
  KrylovVariant variant = KrylovVariant::Gmres;
  double tol = 1e-10;
  int maxit = 0;  // 0: solver default
};

/// One pumping source on an assembled pencil, evaluated at a set of target
/// times via contour quadrature over shifted solves.
struct ForwardProblem {
  const AssembledOperators* ops = nullptr;
  Eigen::VectorXd source;        // free-dof interpolation weights of the source
  double rate = 0.0;             // q0 [m^3/s]
  Eigen::VectorXd initial_head;  // free dofs; empty means zero
  std::vector<double> times;     // [s], strictly positive and ascending
  int n_quad = 40;
  TalbotParams contour;
};

struct TimeDiagnostics {
  int iterations = 0;
  bool all_converged = true;
  std::vector<double> shift_residuals;  // verified relative residual per shift
};

struct HeadSolution {
  Eigen::MatrixXd heads;  // n_free x n_times
  std::vector<TimeDiagnostics> diagnostics;
};

/// Per-time contour quadrature: solves (K + z_k M) X = [b, M phi0] on the
/// retained half contour and reconstructs 2 Re sum_k w_k F(z_k). The second
/// family is skipped when the initial head is zero. Throws ConvergenceError
/// when shifts fail to converge.
HeadSolution solve_forward(const ForwardProblem& problem, const SolverConfig& solver = {});
HeadSolution solve_forward(const ShiftedPencil& pencil, const ForwardProblem& problem,
                           const SolverConfig& solver = {});

/// Pools the contour shifts of every target time into one flexible solve
/// with two preconditioners chosen over the pooled set, then applies each
/// time's quadrature weights to its own shifts' solutions.
HeadSolution solve_forward_batch(const ForwardProblem& problem, const SolverConfig& solver = {});
HeadSolution solve_forward_batch(const ShiftedPencil& pencil, const ForwardProblem& problem,
                                 const SolverConfig& solver = {});

/// Crank-Nicolson reference integrator with a constant-rate source switched
/// on at t = 0; one factorization of M + dt/2 K is reused for every step.
/// Returns the head at each requested sample time (n_free x n_samples).
Eigen::MatrixXd crank_nicolson(const AssembledOperators& ops, const Eigen::VectorXd& source,
                               double rate, const Eigen::VectorXd& initial_head, double dt,
                               const std::vector<double>& sample_times, int* steps_out = nullptr);

}  // namespace laptomo
