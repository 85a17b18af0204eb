// Copyright (c) the laptomo authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "laptomo/fields.hpp"
#include "laptomo/mesh.hpp"

using namespace laptomo;

namespace {

Eigen::Matrix<double, Eigen::Dynamic, 2> grid_points(int n, double length) {
  Eigen::Matrix<double, Eigen::Dynamic, 2> points(n * n, 2);
  const double h = length / (n - 1);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      points(j * n + i, 0) = i * h;
      points(j * n + i, 1) = j * h;
    }
  }
  return points;
}

}  // namespace

TEST_CASE("covariance of a single point") {
  Eigen::Matrix<double, Eigen::Dynamic, 2> points(1, 2);
  points << 0.3, 0.7;
  const Eigen::MatrixXd q = covariance_matrix(points, {2.5, 1.0});
  CHECK(q.rows() == 1);
  CHECK(q(0, 0) == doctest::Approx(2.5));
}

TEST_CASE("coincident points give the rank-one matrix") {
  Eigen::Matrix<double, Eigen::Dynamic, 2> points(2, 2);
  points << 1.0, 2.0, 1.0, 2.0;
  const Eigen::MatrixXd q = covariance_matrix(points, {1.3, 5.0});
  CHECK(q(0, 0) == doctest::Approx(1.3));
  CHECK(q(0, 1) == doctest::Approx(1.3));
  CHECK(q(1, 0) == doctest::Approx(1.3));
  CHECK(q(1, 1) == doctest::Approx(1.3));
}

TEST_CASE("covariance entries match the kernel oracle") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> uniform(0.0, 10.0);
  Eigen::Matrix<double, Eigen::Dynamic, 2> points(10, 2);
  for (int i = 0; i < 10; ++i) {
    points(i, 0) = uniform(rng);
    points(i, 1) = uniform(rng);
  }
  const CovarianceModel model{1.6, 3.0};
  const Eigen::MatrixXd q = covariance_matrix(points, model);
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      const double r = (points.row(i) - points.row(j)).norm() / model.corr_length;
      CHECK(std::abs(q(i, j) - model.theta * std::exp(-r)) <= 1e-14);
    }
  }
}

TEST_CASE("covariance matrices are positive semidefinite") {
  for (int n : {20, 40}) {
    const CovarianceModel model{1.6, 100.0};
    const Eigen::MatrixXd q = covariance_matrix(grid_points(n, 100.0), model);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(q, Eigen::EigenvaluesOnly);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-10 * model.theta);
  }
}

TEST_CASE("zero covariance collapses to the mean") {
  const Eigen::MatrixXd q = Eigen::MatrixXd::Zero(6, 6);
  const FieldRealization field = sample_field(q, -9.2, 7);
  CHECK((field.log_values.array() == -9.2).all());
}

TEST_CASE("sampling is deterministic per seed") {
  const Eigen::MatrixXd q = covariance_matrix(grid_points(5, 10.0), {1.0, 10.0});
  const FieldRealization a = sample_field(q, 0.0, 1234);
  const FieldRealization b = sample_field(q, 0.0, 1234);
  const FieldRealization c = sample_field(q, 0.0, 1235);
  CHECK((a.log_values - b.log_values).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.log_values - c.log_values).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("empirical marginal variance matches theta") {
  Eigen::Matrix<double, Eigen::Dynamic, 2> points(5, 2);
  points << 0, 0, 1, 0, 0, 1, 1, 1, 0.5, 0.5;
  const CovarianceModel model{1.6, 2.0};
  const Eigen::MatrixXd q = covariance_matrix(points, model);
  const int n_samples = 10000;
  Eigen::VectorXd draws(n_samples);
  for (int s = 0; s < n_samples; ++s) {
    draws[s] = sample_field(q, 0.0, 1000 + static_cast<std::uint64_t>(s)).log_values[4];
  }
  const double mean = draws.mean();
  const double variance = (draws.array() - mean).square().sum() / (n_samples - 1);
  CHECK(variance == doctest::Approx(model.theta).epsilon(0.05));
}

TEST_CASE("sampled correlation decays with the exponential kernel") {
  Eigen::Matrix<double, Eigen::Dynamic, 2> points(3, 2);
  const double corr_length = 5.0;
  points << 0, 0, 2.5, 0, 7.5, 0;  // distances 2.5 and 7.5 from the first point
  const Eigen::MatrixXd q = covariance_matrix(points, {1.0, corr_length});
  const int n_samples = 4000;
  Eigen::MatrixXd draws(n_samples, 3);
  for (int s = 0; s < n_samples; ++s) {
    draws.row(s) = sample_field(q, 0.0, 50000 + static_cast<std::uint64_t>(s)).log_values;
  }
  const Eigen::RowVectorXd means = draws.colwise().mean();
  auto correlation = [&](int a, int b) {
    const Eigen::VectorXd da = draws.col(a).array() - means[a];
    const Eigen::VectorXd db = draws.col(b).array() - means[b];
    return da.dot(db) / std::sqrt(da.squaredNorm() * db.squaredNorm());
  };
  CHECK(correlation(0, 1) == doctest::Approx(std::exp(-2.5 / corr_length)).epsilon(0.2));
  CHECK(correlation(0, 2) == doctest::Approx(std::exp(-7.5 / corr_length)).epsilon(0.2));
}

TEST_CASE("interpolated large-mesh sampling stays close to the model") {
  const Mesh2D mesh = build_mesh(41, 100.0);
  const CovarianceModel model{1.6, 100.0};
  const FieldRealization exact = sample_field_on_mesh(mesh, model, -9.2, 3, 1 << 20);
  const FieldRealization coarse = sample_field_on_mesh(mesh, model, -9.2, 3, 900);
  CHECK(exact.log_values.size() == mesh.n_elements());
  CHECK(coarse.log_values.size() == mesh.n_elements());
  // Same seed, different path; both should carry the configured scale.
  const auto variance = [](const Eigen::VectorXd& v) {
    return (v.array() - v.mean()).square().mean();
  };
  CHECK(variance(coarse.log_values) > 0.2 * model.theta);
  CHECK(variance(coarse.log_values) < 3.0 * model.theta);
}

TEST_CASE("franke field hits the requested variance exactly") {
  const Mesh2D mesh = build_mesh(31, 100.0);
  const FieldRealization field = franke_field(mesh, 1.6, -9.2);
  const double mean = field.log_values.mean();
  const double variance = (field.log_values.array() - mean).square().mean();
  CHECK(std::abs(variance - 1.6) <= 1e-10);
  CHECK(mean == doctest::Approx(-9.2).epsilon(1e-12));
}

TEST_CASE("vanishing variance flattens the franke field") {
  const Mesh2D mesh = build_mesh(11, 1.0);
  const FieldRealization field = franke_field(mesh, 1e-12, 2.0);
  CHECK((field.log_values.array() - 2.0).abs().maxCoeff() <= 1e-5);
}

TEST_CASE("rescaling preserves the franke argmax") {
  const Mesh2D mesh = build_mesh(25, 1.0);
  Eigen::VectorXd raw(mesh.n_elements());
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const Eigen::Vector2d c = element_centroid(mesh, e);
    raw[e] = franke_function(c.x(), c.y());
  }
  const FieldRealization field = franke_field(mesh, 0.9, 0.0);
  Eigen::Index argmax_raw, argmax_field;
  raw.maxCoeff(&argmax_raw);
  field.log_values.maxCoeff(&argmax_field);
  CHECK(argmax_raw == argmax_field);
}
