// Copyright (c) the laptomo authors.
// SPDX-License-Identifier: Apache-2.0

#include "laptomo/factorization.hpp"

#include <Eigen/SparseLU>

#include "laptomo/errors.hpp"

namespace laptomo {

namespace {

class EigenSparseLu final : public SparseComplexFactorization {
 public:
  explicit EigenSparseLu(const SparseComplex& matrix) {
    lu_.compute(matrix);
    if (lu_.info() != Eigen::Success) {
      throw FactorizationError("sparse LU factorization failed");
    }
  }

  Eigen::Index rows() const override { return lu_.rows(); }

  Eigen::VectorXcd solve(const Eigen::VectorXcd& rhs) const override { return lu_.solve(rhs); }

  Eigen::VectorXcd solve_adjoint(const Eigen::VectorXcd& rhs) const override {
    return lu_.adjoint().solve(rhs);
  }

 private:
  Eigen::SparseLU<SparseComplex, Eigen::COLAMDOrdering<int>> lu_;
};

}  // namespace

std::unique_ptr<SparseComplexFactorization> factorize_sparse(const SparseComplex& matrix) {
  return std::make_unique<EigenSparseLu>(matrix);
}

}  // namespace laptomo
