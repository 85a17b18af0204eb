// Copyright (c) the laptomo authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <memory>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace laptomo {

using SparseComplex = Eigen::SparseMatrix<std::complex<double>>;

/// Reusable complex sparse direct factorization: one symbolic + numeric
/// factorization, many solves. Instances are immutable after construction
/// and safe to share read-only.
class SparseComplexFactorization {
 public:
  virtual ~SparseComplexFactorization() = default;

  virtual Eigen::Index rows() const = 0;
  virtual Eigen::VectorXcd solve(const Eigen::VectorXcd& rhs) const = 0;
  /// Solves A^H x = rhs.
  virtual Eigen::VectorXcd solve_adjoint(const Eigen::VectorXcd& rhs) const = 0;
};

/// Factorizes a general complex sparse matrix; throws FactorizationError on
/// a singular or numerically unusable matrix.
std::unique_ptr<SparseComplexFactorization> factorize_sparse(const SparseComplex& matrix);

}  // namespace laptomo
