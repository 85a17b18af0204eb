// Copyright (c) the laptomo authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "laptomo/mesh.hpp"

namespace laptomo {

/// Exponential covariance kernel theta * exp(-||x - y|| / corr_length).
struct CovarianceModel {
  double theta = 1.0;        // variance of the log field
  double corr_length = 1.0;  // [m]
};

/// Per-element log transmissivity (or log storativity) values.
struct FieldRealization {
  Eigen::VectorXd log_values;
  double mean_log = 0.0;
};

/// Dense covariance matrix Q_ij = theta * exp(-||x_i - x_j|| / corr_length).
Eigen::MatrixXd covariance_matrix(const Eigen::Matrix<double, Eigen::Dynamic, 2>& points,
                                  const CovarianceModel& model);

/// Draws mean_log + C zeta with C C^T = Q (Cholesky, jittered on failure) and
/// zeta standard normal from the seeded generator. Deterministic per seed.
FieldRealization sample_field(const Eigen::MatrixXd& covariance, double mean_log,
                              std::uint64_t seed);

/// Samples an exponential-covariance field at the element centroids of a
/// mesh. Up to max_exact_points centroids the draw is exact; beyond that the
/// field is sampled exactly on a coarser point grid and interpolated
/// bilinearly, which preserves the large-scale structure that dominates when
/// corr_length is comparable to the domain size.
FieldRealization sample_field_on_mesh(const Mesh2D& mesh, const CovarianceModel& model,
                                      double mean_log, std::uint64_t seed,
                                      int max_exact_points = 4096);

/// Franke's four-exponential test surface evaluated on element centroids
/// (mapped to the unit square) and affinely rescaled so the element-wise
/// variance equals target_variance and the mean equals mean_log.
FieldRealization franke_field(const Mesh2D& mesh, double target_variance, double mean_log);

/// Canonical Franke function on the unit square.
double franke_function(double x, double y);

void write_field_csv(const FieldRealization& field, const Mesh2D& mesh, const std::string& path);
FieldRealization read_field_csv(const std::string& path, int expected_elements);

}  // namespace laptomo
