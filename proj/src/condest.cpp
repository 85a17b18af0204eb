// Copyright (c) the laptomo authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <stdexcept>

#include "laptomo/shifted_solver.hpp"

namespace laptomo {

double estimate_norm_1(Eigen::Index n, const VectorAction& apply,
                       const VectorAction& apply_adjoint) {
  if (n < 1) {
    throw std::invalid_argument("estimate_norm_1: dimension must be positive");
  }
  // Hager's iteration. Every candidate is ||A x||_1 with ||x||_1 = 1, so the
  // returned value never exceeds ||A||_1.
  Eigen::VectorXcd x = Eigen::VectorXcd::Constant(n, Complex(1.0 / double(n), 0.0));
  double best = 0.0;
  Eigen::Index previous_pivot = -1;
  for (int iteration = 0; iteration < 6; ++iteration) {
    const Eigen::VectorXcd y = apply(x);
    const double estimate = y.lpNorm<1>();
    if (iteration > 0 && estimate <= best) break;
    best = std::max(best, estimate);

    Eigen::VectorXcd xi(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double a = std::abs(y[i]);
      xi[i] = a == 0.0 ? Complex(1.0, 0.0) : y[i] / a;
    }
    const Eigen::VectorXcd z = apply_adjoint(xi);
    Eigen::Index pivot = 0;
    z.cwiseAbs().maxCoeff(&pivot);
    if (pivot == previous_pivot) break;
    x.setZero();
    x[pivot] = 1.0;
    previous_pivot = pivot;
  }
  return best;
}

double estimate_condition_1norm(Eigen::Index n, const VectorAction& apply,
                                const VectorAction& apply_adjoint, const VectorAction& solve,
                                const VectorAction& solve_adjoint) {
  const double norm_a = estimate_norm_1(n, apply, apply_adjoint);
  const double norm_inv = estimate_norm_1(n, solve, solve_adjoint);
  return norm_a * norm_inv;
}

}  // namespace laptomo
