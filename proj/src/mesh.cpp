// Copyright (c) the laptomo authors.
// SPDX-License-Identifier: Apache-2.0

#include "laptomo/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "laptomo/csv.hpp"

namespace laptomo {

Mesh2D build_mesh(int n_per_side, double side_length) {
  if (n_per_side < 2) {
    throw std::invalid_argument("build_mesh: n_per_side must be at least 2");
  }
  if (!(side_length > 0.0)) {
    throw std::invalid_argument("build_mesh: side length must be positive");
  }

  Mesh2D mesh;
  mesh.n_per_side = n_per_side;
  mesh.side_length = side_length;

  const int n = n_per_side;
  const double h = side_length / (n - 1);
  mesh.nodes.resize(static_cast<Eigen::Index>(n) * n, 2);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int node = j * n + i;
      mesh.nodes(node, 0) = i * h;
      mesh.nodes(node, 1) = j * h;
      if (i == 0 || i == n - 1 || j == 0 || j == n - 1) {
        mesh.dirichlet_nodes.push_back(node);
      }
    }
  }

  mesh.elements.reserve(static_cast<std::size_t>(2) * (n - 1) * (n - 1));
  for (int j = 0; j + 1 < n; ++j) {
    for (int i = 0; i + 1 < n; ++i) {
      const int a = j * n + i;
      const int b = j * n + i + 1;
      const int c = (j + 1) * n + i + 1;
      const int d = (j + 1) * n + i;
      mesh.elements.push_back({a, b, c});
      mesh.elements.push_back({a, c, d});
    }
  }
  return mesh;
}

double element_area(const Mesh2D& mesh, int element) {
  const auto& e = mesh.elements[static_cast<std::size_t>(element)];
  const Eigen::Vector2d p0 = mesh.nodes.row(e[0]);
  const Eigen::Vector2d p1 = mesh.nodes.row(e[1]);
  const Eigen::Vector2d p2 = mesh.nodes.row(e[2]);
  const Eigen::Vector2d u = p1 - p0;
  const Eigen::Vector2d v = p2 - p0;
  return 0.5 * (u.x() * v.y() - u.y() * v.x());
}

Eigen::Vector2d element_centroid(const Mesh2D& mesh, int element) {
  const auto& e = mesh.elements[static_cast<std::size_t>(element)];
  return (mesh.nodes.row(e[0]) + mesh.nodes.row(e[1]) + mesh.nodes.row(e[2])) / 3.0;
}

Eigen::Matrix<double, Eigen::Dynamic, 2> element_centroids(const Mesh2D& mesh) {
  Eigen::Matrix<double, Eigen::Dynamic, 2> centroids(mesh.n_elements(), 2);
  for (int e = 0; e < mesh.n_elements(); ++e) {
    centroids.row(e) = element_centroid(mesh, e).transpose();
  }
  return centroids;
}

std::array<Eigen::Vector2d, 3> element_basis_gradients(const Mesh2D& mesh, int element) {
  const auto& e = mesh.elements[static_cast<std::size_t>(element)];
  const Eigen::Vector2d p0 = mesh.nodes.row(e[0]);
  const Eigen::Vector2d p1 = mesh.nodes.row(e[1]);
  const Eigen::Vector2d p2 = mesh.nodes.row(e[2]);
  const double two_area = 2.0 * element_area(mesh, element);
  // grad(lambda_i) is the inward-scaled normal of the opposite edge.
  std::array<Eigen::Vector2d, 3> grads;
  grads[0] = Eigen::Vector2d(p1.y() - p2.y(), p2.x() - p1.x()) / two_area;
  grads[1] = Eigen::Vector2d(p2.y() - p0.y(), p0.x() - p2.x()) / two_area;
  grads[2] = Eigen::Vector2d(p0.y() - p1.y(), p1.x() - p0.x()) / two_area;
  return grads;
}

Eigen::VectorXd point_source(const Mesh2D& mesh, double x, double y) {
  const double L = mesh.side_length;
  const double tol = 1e-12 * L;
  if (x < -tol || x > L + tol || y < -tol || y > L + tol) {
    throw std::invalid_argument("point_source: point lies outside the domain");
  }
  x = std::clamp(x, 0.0, L);
  y = std::clamp(y, 0.0, L);

  const int n = mesh.n_per_side;
  const double h = mesh.spacing();
  const int ci = std::min(static_cast<int>(std::floor(x / h)), n - 2);
  const int cj = std::min(static_cast<int>(std::floor(y / h)), n - 2);
  const double xi = x / h - ci;
  const double eta = y / h - cj;

  const int a = cj * n + ci;
  const int b = cj * n + ci + 1;
  const int c = (cj + 1) * n + ci + 1;
  const int d = (cj + 1) * n + ci;

  Eigen::VectorXd weights = Eigen::VectorXd::Zero(mesh.n_nodes());
  if (xi >= eta) {
    // lower triangle (a, b, c)
    weights[a] = 1.0 - xi;
    weights[b] = xi - eta;
    weights[c] = eta;
  } else {
    // upper triangle (a, c, d)
    weights[a] = 1.0 - eta;
    weights[c] = xi;
    weights[d] = eta - xi;
  }
  return weights;
}

void write_mesh_csv(const Mesh2D& mesh, const std::string& node_path,
                    const std::string& element_path) {
  CsvWriter nodes(node_path, {"node", "x", "y", "dirichlet"});
  std::vector<bool> on_boundary(static_cast<std::size_t>(mesh.n_nodes()), false);
  for (int node : mesh.dirichlet_nodes) {
    on_boundary[static_cast<std::size_t>(node)] = true;
  }
  for (int i = 0; i < mesh.n_nodes(); ++i) {
    nodes.row(i, mesh.nodes(i, 0), mesh.nodes(i, 1), on_boundary[static_cast<std::size_t>(i)] ? 1 : 0);
  }

  CsvWriter elements(element_path, {"element", "n0", "n1", "n2"});
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto& el = mesh.elements[static_cast<std::size_t>(e)];
    elements.row(e, el[0], el[1], el[2]);
  }
}

}  // namespace laptomo
