// Copyright (c) the laptomo authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <set>

#include "laptomo/mesh.hpp"

using namespace laptomo;

TEST_CASE("smallest structured grid") {
  const Mesh2D mesh = build_mesh(2, 1.0);
  CHECK(mesh.n_nodes() == 4);
  CHECK(mesh.n_elements() == 2);
  CHECK(mesh.dirichlet_nodes.size() == 4);
}

TEST_CASE("grid of the reference benchmark size") {
  const Mesh2D mesh = build_mesh(101, 100.0);
  CHECK(mesh.n_nodes() == 10201);
  CHECK(mesh.n_elements() == 20000);
  CHECK(static_cast<int>(mesh.dirichlet_nodes.size()) == 4 * 101 - 4);
}

TEST_CASE("element areas are positive and tessellate the domain") {
  const Mesh2D mesh = build_mesh(3, 1.0);
  double total = 0.0;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const double area = element_area(mesh, e);
    CHECK(area > 0.0);
    total += area;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("dirichlet nodes are exactly the boundary nodes") {
  const Mesh2D mesh = build_mesh(5, 2.0);
  std::set<int> boundary(mesh.dirichlet_nodes.begin(), mesh.dirichlet_nodes.end());
  for (int i = 0; i < mesh.n_nodes(); ++i) {
    const double x = mesh.nodes(i, 0);
    const double y = mesh.nodes(i, 1);
    const bool on_boundary = x == 0.0 || y == 0.0 || x == 2.0 || y == 2.0;
    CHECK(boundary.count(i) == (on_boundary ? 1u : 0u));
  }
}

TEST_CASE("invalid mesh arguments") {
  CHECK_THROWS_AS(build_mesh(1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(build_mesh(3, 0.0), std::invalid_argument);
}

TEST_CASE("point source on a node is a unit vector") {
  const Mesh2D mesh = build_mesh(5, 4.0);
  const Eigen::VectorXd w = point_source(mesh, 2.0, 3.0);  // node (2, 3) of the unit grid
  int nonzeros = 0;
  for (int i = 0; i < w.size(); ++i) {
    if (w[i] != 0.0) {
      ++nonzeros;
      CHECK(mesh.nodes(i, 0) == doctest::Approx(2.0));
      CHECK(mesh.nodes(i, 1) == doctest::Approx(3.0));
      CHECK(w[i] == doctest::Approx(1.0));
    }
  }
  CHECK(nonzeros == 1);
}

TEST_CASE("point source at a centroid has equal weights") {
  const Mesh2D mesh = build_mesh(4, 3.0);
  const Eigen::Vector2d c = element_centroid(mesh, 5);
  const Eigen::VectorXd w = point_source(mesh, c.x(), c.y());
  int nonzeros = 0;
  for (int i = 0; i < w.size(); ++i) {
    if (w[i] != 0.0) {
      ++nonzeros;
      CHECK(w[i] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    }
  }
  CHECK(nonzeros == 3);
  CHECK(w.sum() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("point source weights are a partition of unity") {
  const Mesh2D mesh = build_mesh(7, 10.0);
  for (double x : {0.37, 5.0, 9.99}) {
    for (double y : {0.01, 4.2, 8.88}) {
      const Eigen::VectorXd w = point_source(mesh, x, y);
      CHECK(w.minCoeff() >= 0.0);
      CHECK(w.sum() == doctest::Approx(1.0).epsilon(1e-13));
      CHECK((w.array() != 0.0).count() <= 3);
      // Weights reproduce the point itself (linear completeness).
      double px = 0.0, py = 0.0;
      for (int i = 0; i < w.size(); ++i) {
        px += w[i] * mesh.nodes(i, 0);
        py += w[i] * mesh.nodes(i, 1);
      }
      CHECK(px == doctest::Approx(x).epsilon(1e-12));
      CHECK(py == doctest::Approx(y).epsilon(1e-12));
    }
  }
}

TEST_CASE("pumping source at the domain center hits the center node") {
  const Mesh2D mesh = build_mesh(101, 100.0);
  const Eigen::VectorXd w = point_source(mesh, 50.0, 50.0);
  CHECK((w.array() != 0.0).count() == 1);
  const int center = 50 * 101 + 50;
  CHECK(w[center] == doctest::Approx(1.0));
}

TEST_CASE("point outside the domain is rejected") {
  const Mesh2D mesh = build_mesh(4, 1.0);
  CHECK_THROWS_AS(point_source(mesh, -0.1, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(point_source(mesh, 0.5, 1.2), std::invalid_argument);
}
