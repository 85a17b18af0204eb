// Copyright (c) the laptomo authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace laptomo {

/// Quasi-linear geostatistical MAP problem: measurements y = h(s) + eps with
/// eps ~ N(0, R) and prior s ~ N(X beta, Q). The forward handles supply h(s)
/// and the Jacobian; jacobian_and_predict shares solves between the two.
struct InversionProblem {
  Eigen::VectorXd y;
  Eigen::VectorXd r_diag;  // diagonal of R, entries > 0
  Eigen::MatrixXd drift;   // X, n_s x p, full column rank
  Eigen::MatrixXd prior;   // Q, symmetric positive semidefinite

  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> predict;
  std::function<std::pair<Eigen::MatrixXd, Eigen::VectorXd>(const Eigen::VectorXd&)>
      jacobian_and_predict;
};

struct GnOptions {
  int max_gn = 15;
  double rtol = 1e-3;    // on relative step norm and relative objective decrease
  bool damping = true;   // halve the step (up to max_halvings) on objective increase
  int max_halvings = 5;
};

struct GnIterate {
  Eigen::VectorXd s;
  Eigen::VectorXd beta;
  Eigen::VectorXd xi;
  double objective = 0.0;
  double misfit = 0.0;  // data term
  double prior = 0.0;   // prior term
  double step_norm = 0.0;
  double alpha = 1.0;             // accepted damping factor
  double saddle_residual = 0.0;   // relative residual of the saddle solve
  double drift_violation = 0.0;   // ||(J X)^T xi|| / ||xi||
};

struct InversionResult {
  Eigen::VectorXd s_hat;
  Eigen::VectorXd beta_hat;
  std::vector<GnIterate> history;
  bool converged = false;
  std::string stop_reason;
};

/// Holds the factorized prior so repeated objective evaluations and
/// Gauss-Newton steps reuse one Cholesky of Q.
class GaussNewtonSolver {
 public:
  explicit GaussNewtonSolver(InversionProblem problem);

  const InversionProblem& problem() const { return problem_; }

  double objective(const Eigen::VectorXd& s, const Eigen::VectorXd& beta) const;
  double misfit(const Eigen::VectorXd& predictions) const;
  double prior_term(const Eigen::VectorXd& s, const Eigen::VectorXd& beta) const;

  /// One Gauss-Newton step from (s, beta): solves the saddle system
  ///   [J Q J^T + R, J X; (J X)^T, 0] [xi; beta+] = [y - h(s) + J s; 0],
  /// forms s+ = X beta+ + Q J^T xi and applies step halving until the
  /// objective does not increase. alpha = 0 marks a stalled step.
  GnIterate step(const Eigen::VectorXd& s, const Eigen::VectorXd& beta,
                 const GnOptions& options = {}) const;

  InversionResult invert(const Eigen::VectorXd& s0, const Eigen::VectorXd& beta0,
                         const GnOptions& options = {}) const;

 private:
  InversionProblem problem_;
  Eigen::MatrixXd prior_chol_;  // lower factor of the jittered Q
};

double objective(const InversionProblem& problem, const Eigen::VectorXd& s,
                 const Eigen::VectorXd& beta);
GnIterate gauss_newton_step(const InversionProblem& problem, const Eigen::VectorXd& s,
                            const Eigen::VectorXd& beta, const GnOptions& options = {});
InversionResult invert(const InversionProblem& problem, const Eigen::VectorXd& s0,
                       const Eigen::VectorXd& beta0, int max_gn, double rtol);

}  // namespace laptomo
