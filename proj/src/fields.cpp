// Copyright (c) the laptomo authors.
// SPDX-License-Identifier: Apache-2.0

#include "laptomo/fields.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/Cholesky>

#include "laptomo/csv.hpp"
#include "laptomo/errors.hpp"

namespace laptomo {

Eigen::MatrixXd covariance_matrix(const Eigen::Matrix<double, Eigen::Dynamic, 2>& points,
                                  const CovarianceModel& model) {
  if (points.rows() == 0) {
    throw std::invalid_argument("covariance_matrix: no points");
  }
  if (!(model.theta > 0.0) || !(model.corr_length > 0.0)) {
    throw std::invalid_argument("covariance_matrix: theta and corr_length must be positive");
  }
  const Eigen::Index n = points.rows();
  Eigen::MatrixXd q(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    q(i, i) = model.theta;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double r = (points.row(i) - points.row(j)).norm() / model.corr_length;
      const double v = model.theta * std::exp(-r);
      q(i, j) = v;
      q(j, i) = v;
    }
  }
  return q;
}

namespace {

/// Cholesky with escalating diagonal jitter: 1e-10 * max diag, doubled up to
/// six times. Exponential kernels on dense grids are numerically
/// rank-deficient, so the bare factorization routinely fails.
Eigen::MatrixXd jittered_cholesky(const Eigen::MatrixXd& q) {
  const double scale = q.diagonal().maxCoeff();
  double jitter = 1e-10 * scale;
  for (int attempt = 0; attempt <= 6; ++attempt) {
    Eigen::MatrixXd work = q;
    if (attempt > 0) {
      work.diagonal().array() += jitter;
      jitter *= 2.0;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(work);
    if (llt.info() == Eigen::Success) {
      return llt.matrixL();
    }
  }
  throw FactorizationError("sample_field: covariance Cholesky failed after max jitter");
}

}  // namespace

FieldRealization sample_field(const Eigen::MatrixXd& covariance, double mean_log,
                              std::uint64_t seed) {
  const Eigen::Index n = covariance.rows();
  FieldRealization field;
  field.mean_log = mean_log;
  if (covariance.cwiseAbs().maxCoeff() == 0.0) {
    field.log_values = Eigen::VectorXd::Constant(n, mean_log);
    return field;
  }
  const Eigen::MatrixXd chol = jittered_cholesky(covariance);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd zeta(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    zeta[i] = normal(rng);
  }
  field.log_values = (chol * zeta).array() + mean_log;
  return field;
}

FieldRealization sample_field_on_mesh(const Mesh2D& mesh, const CovarianceModel& model,
                                      double mean_log, std::uint64_t seed,
                                      int max_exact_points) {
  const auto centroids = element_centroids(mesh);
  if (centroids.rows() <= max_exact_points) {
    return sample_field(covariance_matrix(centroids, model), mean_log, seed);
  }

  // Exact draw on a coarse point grid, bilinear interpolation to centroids.
  const int ng = std::max(2, static_cast<int>(std::floor(std::sqrt(double(max_exact_points)))));
  const double L = mesh.side_length;
  const double hg = L / (ng - 1);
  Eigen::Matrix<double, Eigen::Dynamic, 2> grid(static_cast<Eigen::Index>(ng) * ng, 2);
  for (int j = 0; j < ng; ++j) {
    for (int i = 0; i < ng; ++i) {
      grid(static_cast<Eigen::Index>(j) * ng + i, 0) = i * hg;
      grid(static_cast<Eigen::Index>(j) * ng + i, 1) = j * hg;
    }
  }
  const FieldRealization coarse = sample_field(covariance_matrix(grid, model), 0.0, seed);

  FieldRealization field;
  field.mean_log = mean_log;
  field.log_values.resize(centroids.rows());
  for (Eigen::Index e = 0; e < centroids.rows(); ++e) {
    const double x = std::clamp(centroids(e, 0), 0.0, L);
    const double y = std::clamp(centroids(e, 1), 0.0, L);
    const int ci = std::min(static_cast<int>(std::floor(x / hg)), ng - 2);
    const int cj = std::min(static_cast<int>(std::floor(y / hg)), ng - 2);
    const double xi = x / hg - ci;
    const double eta = y / hg - cj;
    const double v00 = coarse.log_values[static_cast<Eigen::Index>(cj) * ng + ci];
    const double v10 = coarse.log_values[static_cast<Eigen::Index>(cj) * ng + ci + 1];
    const double v01 = coarse.log_values[static_cast<Eigen::Index>(cj + 1) * ng + ci];
    const double v11 = coarse.log_values[static_cast<Eigen::Index>(cj + 1) * ng + ci + 1];
    field.log_values[e] = mean_log + (1 - xi) * (1 - eta) * v00 + xi * (1 - eta) * v10 +
                          (1 - xi) * eta * v01 + xi * eta * v11;
  }
  return field;
}

double franke_function(double x, double y) {
  const double t1 = 0.75 * std::exp(-(std::pow(9 * x - 2, 2) + std::pow(9 * y - 2, 2)) / 4.0);
  const double t2 = 0.75 * std::exp(-std::pow(9 * x + 1, 2) / 49.0 - (9 * y + 1) / 10.0);
  const double t3 = 0.5 * std::exp(-(std::pow(9 * x - 7, 2) + std::pow(9 * y - 3, 2)) / 4.0);
  const double t4 = -0.2 * std::exp(-std::pow(9 * x - 4, 2) - std::pow(9 * y - 7, 2));
  return t1 + t2 + t3 + t4;
}

FieldRealization franke_field(const Mesh2D& mesh, double target_variance, double mean_log) {
  if (!(target_variance > 0.0)) {
    throw std::invalid_argument("franke_field: target variance must be positive");
  }
  const Eigen::Index n = mesh.n_elements();
  Eigen::VectorXd raw(n);
  for (Eigen::Index e = 0; e < n; ++e) {
    const Eigen::Vector2d c = element_centroid(mesh, static_cast<int>(e));
    raw[e] = franke_function(c.x() / mesh.side_length, c.y() / mesh.side_length);
  }
  const double mean = raw.mean();
  const double var = (raw.array() - mean).square().mean();
  const double scale = std::sqrt(target_variance / var);

  FieldRealization field;
  field.mean_log = mean_log;
  field.log_values = mean_log + scale * (raw.array() - mean);
  return field;
}

void write_field_csv(const FieldRealization& field, const Mesh2D& mesh, const std::string& path) {
  CsvWriter csv(path, {"element", "centroid_x", "centroid_y", "log_value"});
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const Eigen::Vector2d c = element_centroid(mesh, e);
    csv.row(e, c.x(), c.y(), field.log_values[e]);
  }
}

FieldRealization read_field_csv(const std::string& path, int expected_elements) {
  const CsvTable table = read_csv(path);
  const int col = table.column("log_value");
  if (col < 0) {
    throw std::runtime_error("read_field_csv: missing log_value column in " + path);
  }
  if (static_cast<int>(table.rows.size()) != expected_elements) {
    throw std::runtime_error("read_field_csv: element count mismatch in " + path);
  }
  FieldRealization field;
  field.log_values.resize(expected_elements);
  for (int i = 0; i < expected_elements; ++i) {
    field.log_values[i] = std::stod(table.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(col)]);
  }
  field.mean_log = field.log_values.mean();
  return field;
}

}  // namespace laptomo
