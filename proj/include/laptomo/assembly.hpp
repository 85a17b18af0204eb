// Copyright (c) the laptomo authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "laptomo/mesh.hpp"

namespace laptomo {

using SparseReal = Eigen::SparseMatrix<double>;

/// Sparse pencil (K, M) of the groundwater flow problem restricted to the
/// free (non-Dirichlet) degrees of freedom. K carries the transmissivity
/// weight, M the storativity weight; both are real symmetric and K + z M is
/// nonsingular for contour shifts z.
struct AssembledOperators {
  SparseReal stiffness;            // K on free dofs
  SparseReal mass;                 // M on free dofs
  std::vector<int> free_nodes;     // free dof -> mesh node
  std::vector<int> node_to_free;   // mesh node -> free dof, -1 on the boundary

  int n_free() const { return static_cast<int>(free_nodes.size()); }

  Eigen::VectorXd restrict_to_free(const Eigen::VectorXd& full) const;
  Eigen::VectorXd prolong_to_full(const Eigen::VectorXd& free) const;
  Eigen::VectorXcd prolong_to_full(const Eigen::VectorXcd& free) const;
};

/// Assembles K and M from per-element transmissivity and storativity values
/// using exact P1 integrals, then eliminates Dirichlet rows and columns
/// symmetrically.
AssembledOperators assemble(const Mesh2D& mesh, const Eigen::VectorXd& kappa,
                            const Eigen::VectorXd& storativity);

/// Full-mesh operators without boundary elimination (diagnostics, tests).
std::pair<SparseReal, SparseReal> assemble_full(const Mesh2D& mesh,
                                                const Eigen::VectorXd& kappa,
                                                const Eigen::VectorXd& storativity);

}  // namespace laptomo
