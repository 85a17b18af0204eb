// Copyright (c) the laptomo authors.
// SPDX-License-Identifier: Apache-2.0

#include "laptomo/assembly.hpp"

#include <stdexcept>

namespace laptomo {

namespace {

using Triplet = Eigen::Triplet<double>;

void check_fields(const Mesh2D& mesh, const Eigen::VectorXd& kappa,
                  const Eigen::VectorXd& storativity) {
  if (kappa.size() != mesh.n_elements() || storativity.size() != mesh.n_elements()) {
    throw std::invalid_argument("assemble: one kappa and one storativity value per element");
  }
  if ((kappa.array() <= 0.0).any() || (storativity.array() <= 0.0).any()) {
    throw std::invalid_argument("assemble: kappa and storativity must be positive");
  }
}

void element_triplets(const Mesh2D& mesh, const Eigen::VectorXd& kappa,
                      const Eigen::VectorXd& storativity, std::vector<Triplet>& k_trip,
                      std::vector<Triplet>& m_trip) {
  // Consistent P1 element mass: A/12 * (1 + delta_ij).
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto& el = mesh.elements[static_cast<std::size_t>(e)];
    const double area = element_area(mesh, e);
    const auto grads = element_basis_gradients(mesh, e);
    const double k_e = kappa[e];
    const double s_e = storativity[e];
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        k_trip.emplace_back(el[i], el[j], k_e * area * grads[i].dot(grads[j]));
        m_trip.emplace_back(el[i], el[j], s_e * area * (i == j ? 2.0 : 1.0) / 12.0);
      }
    }
  }
}

}  // namespace

Eigen::VectorXd AssembledOperators::restrict_to_free(const Eigen::VectorXd& full) const {
  Eigen::VectorXd out(n_free());
  for (int i = 0; i < n_free(); ++i) {
    out[i] = full[free_nodes[static_cast<std::size_t>(i)]];
  }
  return out;
}

Eigen::VectorXd AssembledOperators::prolong_to_full(const Eigen::VectorXd& free) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(node_to_free.size());
  for (int i = 0; i < n_free(); ++i) {
    out[free_nodes[static_cast<std::size_t>(i)]] = free[i];
  }
  return out;
}

Eigen::VectorXcd AssembledOperators::prolong_to_full(const Eigen::VectorXcd& free) const {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(node_to_free.size());
  for (int i = 0; i < n_free(); ++i) {
    out[free_nodes[static_cast<std::size_t>(i)]] = free[i];
  }
  return out;
}

AssembledOperators assemble(const Mesh2D& mesh, const Eigen::VectorXd& kappa,
                            const Eigen::VectorXd& storativity) {
  check_fields(mesh, kappa, storativity);

  AssembledOperators ops;
  ops.node_to_free.assign(static_cast<std::size_t>(mesh.n_nodes()), -1);
  std::vector<bool> on_boundary(static_cast<std::size_t>(mesh.n_nodes()), false);
  for (int node : mesh.dirichlet_nodes) {
    on_boundary[static_cast<std::size_t>(node)] = true;
  }
  for (int node = 0; node < mesh.n_nodes(); ++node) {
    if (!on_boundary[static_cast<std::size_t>(node)]) {
      ops.node_to_free[static_cast<std::size_t>(node)] = static_cast<int>(ops.free_nodes.size());
      ops.free_nodes.push_back(node);
    }
  }

  std::vector<Triplet> k_trip, m_trip;
  k_trip.reserve(static_cast<std::size_t>(9) * mesh.n_elements());
  m_trip.reserve(static_cast<std::size_t>(9) * mesh.n_elements());
  element_triplets(mesh, kappa, storativity, k_trip, m_trip);

  std::vector<Triplet> k_free, m_free;
  k_free.reserve(k_trip.size());
  m_free.reserve(m_trip.size());
  for (const auto& t : k_trip) {
    const int r = ops.node_to_free[static_cast<std::size_t>(t.row())];
    const int c = ops.node_to_free[static_cast<std::size_t>(t.col())];
    if (r >= 0 && c >= 0) k_free.emplace_back(r, c, t.value());
  }
  for (const auto& t : m_trip) {
    const int r = ops.node_to_free[static_cast<std::size_t>(t.row())];
    const int c = ops.node_to_free[static_cast<std::size_t>(t.col())];
    if (r >= 0 && c >= 0) m_free.emplace_back(r, c, t.value());
  }

  const int nf = ops.n_free();
  ops.stiffness.resize(nf, nf);
  ops.mass.resize(nf, nf);
  ops.stiffness.setFromTriplets(k_free.begin(), k_free.end());
  ops.mass.setFromTriplets(m_free.begin(), m_free.end());
  ops.stiffness.makeCompressed();
  ops.mass.makeCompressed();
  return ops;
}

std::pair<SparseReal, SparseReal> assemble_full(const Mesh2D& mesh, const Eigen::VectorXd& kappa,
                                                const Eigen::VectorXd& storativity) {
  check_fields(mesh, kappa, storativity);
  std::vector<Triplet> k_trip, m_trip;
  element_triplets(mesh, kappa, storativity, k_trip, m_trip);
  const int n = mesh.n_nodes();
  SparseReal k_full(n, n), m_full(n, n);
  k_full.setFromTriplets(k_trip.begin(), k_trip.end());
  m_full.setFromTriplets(m_trip.begin(), m_trip.end());
  k_full.makeCompressed();
  m_full.makeCompressed();
  return {std::move(k_full), std::move(m_full)};
}

}  // namespace laptomo
