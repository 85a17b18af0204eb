// Copyright (c) the laptomo authors.
// SPDX-License-Identifier: Apache-2.0

#include "laptomo/inversion.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "laptomo/errors.hpp"

namespace laptomo {

namespace {

Eigen::MatrixXd jittered_cholesky(const Eigen::MatrixXd& q) {
  const double scale = q.diagonal().maxCoeff();
  double jitter = 1e-10 * scale;
  for (int attempt = 0; attempt <= 6; ++attempt) {
    Eigen::MatrixXd work = q;
    if (attempt > 0) {
      work.diagonal().array() += jitter;
      jitter *= 2.0;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(work);
    if (llt.info() == Eigen::Success) {
      return llt.matrixL();
    }
  }
  throw FactorizationError("GaussNewtonSolver: prior Cholesky failed after max jitter");
}

void check_problem(const InversionProblem& problem) {
  const Eigen::Index n_s = problem.prior.rows();
  if (problem.prior.cols() != n_s || problem.drift.rows() != n_s) {
    throw std::invalid_argument("InversionProblem: Q and X dimensions disagree");
  }
  if ((problem.r_diag.array() <= 0.0).any()) {
    throw std::invalid_argument("InversionProblem: R diagonal must be positive");
  }
  if (problem.r_diag.size() != problem.y.size()) {
    throw std::invalid_argument("InversionProblem: R and y dimensions disagree");
  }
}

}  // namespace

GaussNewtonSolver::GaussNewtonSolver(InversionProblem problem) : problem_(std::move(problem)) {
  check_problem(problem_);
  prior_chol_ = jittered_cholesky(problem_.prior);
}

double GaussNewtonSolver::misfit(const Eigen::VectorXd& predictions) const {
  const Eigen::VectorXd residual = problem_.y - predictions;
  return 0.5 * (residual.array().square() / problem_.r_diag.array()).sum();
}

double GaussNewtonSolver::prior_term(const Eigen::VectorXd& s, const Eigen::VectorXd& beta) const {
  const Eigen::VectorXd anomaly = s - problem_.drift * beta;
  // Whitened via the Cholesky factor: ||L^-1 anomaly||^2 = anomaly^T Q^-1 anomaly.
  const Eigen::VectorXd white =
      prior_chol_.triangularView<Eigen::Lower>().solve(anomaly);
  return 0.5 * white.squaredNorm();
}

double GaussNewtonSolver::objective(const Eigen::VectorXd& s, const Eigen::VectorXd& beta) const {
  return misfit(problem_.predict(s)) + prior_term(s, beta);
}

GnIterate GaussNewtonSolver::step(const Eigen::VectorXd& s, const Eigen::VectorXd& beta,
                                  const GnOptions& options) const {
  const auto [jacobian, predictions] = problem_.jacobian_and_predict(s);
  const Eigen::Index n_y = problem_.y.size();
  const Eigen::Index p = problem_.drift.cols();

  const Eigen::MatrixXd jq = jacobian * problem_.prior;            // n_y x n_s
  const Eigen::MatrixXd jx = jacobian * problem_.drift;            // n_y x p
  Eigen::MatrixXd saddle = Eigen::MatrixXd::Zero(n_y + p, n_y + p);
  saddle.topLeftCorner(n_y, n_y) = jq * jacobian.transpose();
  saddle.topLeftCorner(n_y, n_y).diagonal() += problem_.r_diag;
  saddle.topRightCorner(n_y, p) = jx;
  saddle.bottomLeftCorner(p, n_y) = jx.transpose();

  Eigen::VectorXd rhs(n_y + p);
  rhs.head(n_y) = problem_.y - predictions + jacobian * s;
  rhs.tail(p).setZero();

  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(saddle);
  const Eigen::VectorXd solution = lu.solve(rhs);
  if (!solution.allFinite()) {
    throw FactorizationError(
        "gauss_newton_step: saddle system solve failed (rank-deficient J Q J^T + R or J X block)");
  }

  GnIterate iterate;
  iterate.xi = solution.head(n_y);
  iterate.beta = solution.tail(p);
  iterate.saddle_residual = (saddle * solution - rhs).norm() / rhs.norm();
  iterate.drift_violation =
      p > 0 && iterate.xi.norm() > 0.0 ? (jx.transpose() * iterate.xi).norm() / iterate.xi.norm()
                                       : 0.0;

  const Eigen::VectorXd s_full = problem_.drift * iterate.beta + jq.transpose() * iterate.xi;
  const double objective_old = misfit(predictions) + prior_term(s, beta);

  double alpha = 1.0;
  bool accepted = false;
  for (int halving = 0; halving <= (options.damping ? options.max_halvings : 0); ++halving) {
    const Eigen::VectorXd s_trial = s + alpha * (s_full - s);
    const Eigen::VectorXd beta_trial = beta + alpha * (iterate.beta - beta);
    const double objective_trial = objective(s_trial, beta_trial);
    if (objective_trial <= objective_old || !options.damping) {
      iterate.s = s_trial;
      iterate.beta = beta_trial;
      iterate.objective = objective_trial;
      iterate.misfit = misfit(problem_.predict(s_trial));
      iterate.prior = iterate.objective - iterate.misfit;
      iterate.alpha = alpha;
      accepted = true;
      break;
    }
    alpha *= 0.5;
  }
  if (!accepted) {
    // Step stalled: stay put and report alpha = 0 so the outer loop stops.
    iterate.s = s;
    iterate.beta = beta;
    iterate.objective = objective_old;
    iterate.misfit = misfit(predictions);
    iterate.prior = objective_old - iterate.misfit;
    iterate.alpha = 0.0;
  }
  iterate.step_norm = (iterate.s - s).norm();
  return iterate;
}

InversionResult GaussNewtonSolver::invert(const Eigen::VectorXd& s0, const Eigen::VectorXd& beta0,
                                          const GnOptions& options) const {
  if (options.max_gn < 1) {
    throw std::invalid_argument("invert: max_gn must be at least 1");
  }
  InversionResult result;
  Eigen::VectorXd s = s0;
  Eigen::VectorXd beta = beta0;
  double objective_prev = objective(s, beta);

  for (int k = 0; k < options.max_gn; ++k) {
    GnIterate iterate = step(s, beta, options);
    s = iterate.s;
    beta = iterate.beta;
    result.history.push_back(std::move(iterate));
    const GnIterate& latest = result.history.back();

    if (latest.alpha == 0.0) {
      result.converged = false;
      result.stop_reason = "step stalled: damping could not decrease the objective";
      break;
    }
    const double rel_step = latest.step_norm / std::max(s.norm(), 1e-300);
    const double rel_decrease =
        (objective_prev - latest.objective) / std::max(std::abs(objective_prev), 1e-300);
    objective_prev = latest.objective;
    if (rel_step <= options.rtol) {
      result.converged = true;
      result.stop_reason = "relative step norm below rtol";
      break;
    }
    if (rel_decrease >= 0.0 && rel_decrease <= options.rtol) {
      result.converged = true;
      result.stop_reason = "relative objective decrease below rtol";
      break;
    }
  }
  if (result.stop_reason.empty()) {
    result.stop_reason = "max_gn reached";
  }
  result.s_hat = s;
  result.beta_hat = beta;
  return result;
}

double objective(const InversionProblem& problem, const Eigen::VectorXd& s,
                 const Eigen::VectorXd& beta) {
  return GaussNewtonSolver(problem).objective(s, beta);
}

GnIterate gauss_newton_step(const InversionProblem& problem, const Eigen::VectorXd& s,
                            const Eigen::VectorXd& beta, const GnOptions& options) {
  return GaussNewtonSolver(problem).step(s, beta, options);
}

InversionResult invert(const InversionProblem& problem, const Eigen::VectorXd& s0,
                       const Eigen::VectorXd& beta0, int max_gn, double rtol) {
  GnOptions options;
  options.max_gn = max_gn;
  options.rtol = rtol;
  return GaussNewtonSolver(problem).invert(s0, beta0, options);
}

}  // namespace laptomo
