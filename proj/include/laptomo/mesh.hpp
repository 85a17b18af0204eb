// Copyright (c) the laptomo authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace laptomo {

/// Structured triangulation of the square [0, L]^2 on an n x n node grid.
/// Every grid cell is split into two triangles by its lower-left to
/// upper-right diagonal, so the element count is 2 (n-1)^2 and orientation
/// is deterministic.
struct Mesh2D {
  int n_per_side = 0;
  double side_length = 0.0;  // L [m]
  Eigen::Matrix<double, Eigen::Dynamic, 2> nodes;  // node -> (x, y)
  std::vector<std::array<int, 3>> elements;        // CCW vertex indices
  std::vector<int> dirichlet_nodes;                // boundary nodes, ascending

  int n_nodes() const { return static_cast<int>(nodes.rows()); }
  int n_elements() const { return static_cast<int>(elements.size()); }
  double spacing() const { return side_length / (n_per_side - 1); }
};

Mesh2D build_mesh(int n_per_side, double side_length);

double element_area(const Mesh2D& mesh, int element);
Eigen::Vector2d element_centroid(const Mesh2D& mesh, int element);

/// Centroids of all elements as an n_elements x 2 matrix.
Eigen::Matrix<double, Eigen::Dynamic, 2> element_centroids(const Mesh2D& mesh);

/// Constant gradients of the three P1 vertex basis functions on an element.
std::array<Eigen::Vector2d, 3> element_basis_gradients(const Mesh2D& mesh, int element);

/// P1 interpolation weights of a point: at most three nonzero entries on the
/// vertices of the containing triangle, summing to one. The same routine
/// serves pumping sources and point measurements.
Eigen::VectorXd point_source(const Mesh2D& mesh, double x, double y);

void write_mesh_csv(const Mesh2D& mesh, const std::string& node_path,
                    const std::string& element_path);

}  // namespace laptomo
