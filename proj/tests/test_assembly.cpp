// Copyright (c) the laptomo authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "laptomo/assembly.hpp"
#include "laptomo/mesh.hpp"

using namespace laptomo;

namespace {

// Independent element-integration oracle: evaluates the P1 basis through
// barycentric coordinates, takes gradients by central differences, and
// integrates with a midpoint rule over a uniform sub-triangulation.
double basis_value(const Eigen::Vector2d& p0, const Eigen::Vector2d& p1,
                   const Eigen::Vector2d& p2, int which, const Eigen::Vector2d& x) {
  Eigen::Matrix2d a;
  a.col(0) = p1 - p0;
  a.col(1) = p2 - p0;
  const Eigen::Vector2d lambda12 = a.inverse() * (x - p0);
  const double lambda[3] = {1.0 - lambda12[0] - lambda12[1], lambda12[0], lambda12[1]};
  return lambda[which];
}

double stiffness_entry_oracle(const Mesh2D& mesh, int node_i, int node_j) {
  double total = 0.0;
  const int subdivisions = 4;
  const double fd_step = 1e-6 * mesh.side_length;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto& el = mesh.elements[static_cast<std::size_t>(e)];
    int local_i = -1, local_j = -1;
    for (int v = 0; v < 3; ++v) {
      if (el[v] == node_i) local_i = v;
      if (el[v] == node_j) local_j = v;
    }
    if (local_i < 0 || local_j < 0) continue;

    const Eigen::Vector2d p0 = mesh.nodes.row(el[0]);
    const Eigen::Vector2d p1 = mesh.nodes.row(el[1]);
    const Eigen::Vector2d p2 = mesh.nodes.row(el[2]);
    const double area = element_area(mesh, e);
    const double cell_weight = area / (subdivisions * subdivisions);

    auto accumulate_at = [&](double b1, double b2) {
      const Eigen::Vector2d x = p0 + b1 * (p1 - p0) + b2 * (p2 - p0);
      auto grad = [&](int which) {
        Eigen::Vector2d g;
        for (int d = 0; d < 2; ++d) {
          Eigen::Vector2d plus = x, minus = x;
          plus[d] += fd_step;
          minus[d] -= fd_step;
          g[d] = (basis_value(p0, p1, p2, which, plus) - basis_value(p0, p1, p2, which, minus)) /
                 (2.0 * fd_step);
        }
        return g;
      };
      total += cell_weight * grad(local_i).dot(grad(local_j));
    };

    // Centroids of the uniform refinement in barycentric coordinates:
    // upward cells at ((3i+1)/3s, (3j+1)/3s), downward at ((3i+2)/3s, (3j+2)/3s).
    const double s3 = 3.0 * subdivisions;
    for (int i = 0; i < subdivisions; ++i) {
      for (int j = 0; j < subdivisions - i; ++j) {
        accumulate_at((3 * i + 1) / s3, (3 * j + 1) / s3);
        if (i + j <= subdivisions - 2) {
          accumulate_at((3 * i + 2) / s3, (3 * j + 2) / s3);
        }
      }
    }
  }
  return total;
}

}  // namespace

TEST_CASE("constant-kappa stiffness has zero row sums before elimination") {
  const Mesh2D mesh = build_mesh(6, 2.5);
  const Eigen::VectorXd kappa = Eigen::VectorXd::Ones(mesh.n_elements());
  const Eigen::VectorXd storativity = Eigen::VectorXd::Constant(mesh.n_elements(), 1e-5);
  const auto [k_full, m_full] = assemble_full(mesh, kappa, storativity);
  const Eigen::VectorXd row_sums = Eigen::MatrixXd(k_full).rowwise().sum();
  CHECK(row_sums.cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("mass matrix conserves the total storativity") {
  const Mesh2D mesh = build_mesh(5, 3.0);
  const double s_s = 2.5e-4;
  const Eigen::VectorXd kappa = Eigen::VectorXd::Ones(mesh.n_elements());
  const Eigen::VectorXd storativity = Eigen::VectorXd::Constant(mesh.n_elements(), s_s);
  const auto [k_full, m_full] = assemble_full(mesh, kappa, storativity);
  CHECK(Eigen::MatrixXd(m_full).sum() == doctest::Approx(s_s * 9.0).epsilon(1e-12));
}

TEST_CASE("stiffness entries match the dense-quadrature oracle") {
  const Mesh2D mesh = build_mesh(2, 1.0);  // two triangles on the unit square
  const Eigen::VectorXd kappa = Eigen::VectorXd::Ones(2);
  const Eigen::VectorXd storativity = Eigen::VectorXd::Ones(2);
  const auto [k_full, m_full] = assemble_full(mesh, kappa, storativity);
  const Eigen::MatrixXd k_dense(k_full);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      CHECK(k_dense(i, j) == doctest::Approx(stiffness_entry_oracle(mesh, i, j)).epsilon(1e-10));
    }
  }
}

TEST_CASE("assembled operators are symmetric and definite") {
  const Mesh2D mesh = build_mesh(7, 4.0);
  Eigen::VectorXd kappa(mesh.n_elements());
  Eigen::VectorXd storativity(mesh.n_elements());
  for (int e = 0; e < mesh.n_elements(); ++e) {
    kappa[e] = 1e-4 * std::exp(std::sin(0.7 * e));
    storativity[e] = 1e-5 * (1.0 + 0.3 * std::cos(1.3 * e));
  }
  const AssembledOperators ops = assemble(mesh, kappa, storativity);

  const Eigen::MatrixXd k_dense(ops.stiffness);
  const Eigen::MatrixXd m_dense(ops.mass);
  CHECK((k_dense - k_dense.transpose()).cwiseAbs().maxCoeff() <=
        1e-12 * k_dense.cwiseAbs().maxCoeff());
  CHECK((m_dense - m_dense.transpose()).cwiseAbs().maxCoeff() <=
        1e-12 * m_dense.cwiseAbs().maxCoeff());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> k_eig(k_dense);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> m_eig(m_dense);
  CHECK(k_eig.eigenvalues().minCoeff() > 0.0);
  CHECK(m_eig.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("patch test: constants lie in the stiffness kernel") {
  const Mesh2D mesh = build_mesh(9, 5.0);
  const Eigen::VectorXd kappa = Eigen::VectorXd::Constant(mesh.n_elements(), 3.7);
  const Eigen::VectorXd storativity = Eigen::VectorXd::Ones(mesh.n_elements());
  const auto [k_full, m_full] = assemble_full(mesh, kappa, storativity);
  const Eigen::VectorXd kv = k_full * Eigen::VectorXd::Ones(mesh.n_nodes());
  CHECK(kv.cwiseAbs().maxCoeff() <= 1e-12 * Eigen::MatrixXd(k_full).cwiseAbs().maxCoeff());
}

TEST_CASE("field size and positivity preconditions") {
  const Mesh2D mesh = build_mesh(3, 1.0);
  Eigen::VectorXd kappa = Eigen::VectorXd::Ones(mesh.n_elements());
  Eigen::VectorXd storativity = Eigen::VectorXd::Ones(mesh.n_elements());
  CHECK_THROWS_AS(assemble(mesh, kappa.head(3), storativity), std::invalid_argument);
  kappa[2] = 0.0;
  CHECK_THROWS_AS(assemble(mesh, kappa, storativity), std::invalid_argument);
}

TEST_CASE("manufactured steady solution converges at second order") {
  const double pi = std::numbers::pi;
  auto solve_error = [&](int n) {
    const Mesh2D mesh = build_mesh(n, 1.0);
    const Eigen::VectorXd kappa = Eigen::VectorXd::Ones(mesh.n_elements());
    const Eigen::VectorXd storativity = Eigen::VectorXd::Ones(mesh.n_elements());
    const AssembledOperators ops = assemble(mesh, kappa, storativity);

    // -laplace(phi) = f with phi = sin(pi x) sin(pi y); centroid-rule load.
    Eigen::VectorXd load = Eigen::VectorXd::Zero(mesh.n_nodes());
    for (int e = 0; e < mesh.n_elements(); ++e) {
      const Eigen::Vector2d c = element_centroid(mesh, e);
      const double f = 2.0 * pi * pi * std::sin(pi * c.x()) * std::sin(pi * c.y());
      const double share = f * element_area(mesh, e) / 3.0;
      for (int v : mesh.elements[static_cast<std::size_t>(e)]) {
        load[v] += share;
      }
    }
    Eigen::SimplicialLDLT<SparseReal> chol(ops.stiffness);
    REQUIRE(chol.info() == Eigen::Success);
    const Eigen::VectorXd phi_h = chol.solve(ops.restrict_to_free(load));

    Eigen::VectorXd error(ops.n_free());
    for (int i = 0; i < ops.n_free(); ++i) {
      const int node = ops.free_nodes[static_cast<std::size_t>(i)];
      error[i] = phi_h[i] - std::sin(pi * mesh.nodes(node, 0)) * std::sin(pi * mesh.nodes(node, 1));
    }
    return std::sqrt(error.dot(ops.mass * error));
  };

  const double e21 = solve_error(21);
  const double e41 = solve_error(41);
  const double e81 = solve_error(81);
  const double order1 = std::log2(e21 / e41);
  const double order2 = std::log2(e41 / e81);
  CHECK(order1 >= 1.8);
  CHECK(order2 >= 1.8);
}
