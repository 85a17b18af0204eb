// Copyright (c) the laptomo authors.
// SPDX-License-Identifier: Apache-2.0

#include "laptomo/talbot.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace laptomo {

namespace {

void check_contour_args(int n_quad, double time) {
  if (n_quad < 4 || n_quad % 2 != 0) {
    throw std::invalid_argument("build_contour: n_quad must be even and at least 4");
  }
  if (!(time > 0.0)) {
    throw std::invalid_argument("build_contour: time must be positive");
  }
}

}  // namespace

Complex contour_point(const TalbotParams& params, int n_quad, double time, double theta) {
  const double scale = n_quad / time;
  const double sigma = params.sigma0 * scale;
  const double mu = params.mu0 * scale;
  const double a = params.alpha;
  // theta * cot(alpha theta) -> 1 / alpha as theta -> 0.
  const double cot_term = theta == 0.0 ? 1.0 / a : theta * std::cos(a * theta) / std::sin(a * theta);
  return {sigma + mu * cot_term, mu * params.nu * theta};
}

Complex contour_derivative(const TalbotParams& params, int n_quad, double time, double theta) {
  const double scale = n_quad / time;
  const double mu = params.mu0 * scale;
  const double a = params.alpha;
  double dcot;
  if (theta == 0.0) {
    dcot = 0.0;
  } else {
    const double s = std::sin(a * theta);
    dcot = std::cos(a * theta) / s - a * theta / (s * s);
  }
  return {mu * dcot, mu * params.nu};
}

TalbotContour build_contour(int n_quad, double time, const TalbotParams& params) {
  check_contour_args(n_quad, time);

  TalbotContour contour;
  contour.n_quad = n_quad;
  contour.time = time;
  const double scale = n_quad / time;
  contour.sigma = params.sigma0 * scale;
  contour.mu = params.mu0 * scale;
  contour.nu = params.nu;
  contour.alpha = params.alpha;

  const int n_half = n_quad / 2;
  contour.thetas.resize(n_half);
  contour.nodes.resize(n_half);
  contour.dnodes.resize(n_half);
  contour.weights.resize(n_half);
  const double pi = std::numbers::pi;
  const double spacing = 2.0 * pi / n_quad;
  for (int k = 0; k < n_half; ++k) {
    // Midpoints of the upper half of [-pi, pi]; endpoints are singular for
    // alpha = 1 and are never sampled.
    const double theta = (k + 0.5) * spacing;
    const Complex z = contour_point(params, n_quad, time, theta);
    const Complex dz = contour_derivative(params, n_quad, time, theta);
    contour.thetas[k] = theta;
    contour.nodes[k] = z;
    contour.dnodes[k] = dz;
    contour.weights[k] = -Complex(0.0, 1.0) / double(n_quad) * std::exp(z * time) * dz;
  }
  return contour;
}

double inverse_laplace_sum(const TalbotContour& contour, const Eigen::VectorXcd& values) {
  if (values.size() != contour.n_half()) {
    throw std::invalid_argument("inverse_laplace_sum: one value per retained node required");
  }
  return 2.0 * (contour.weights.array() * values.array()).sum().real();
}

Eigen::VectorXd inverse_laplace_sum(const TalbotContour& contour, const Eigen::MatrixXcd& values) {
  if (values.cols() != contour.n_half()) {
    throw std::invalid_argument("inverse_laplace_sum: one column per retained node required");
  }
  return 2.0 * (values * contour.weights).real();
}

Complex qhat_step(double q0, Complex z) {
  if (z == Complex(0.0, 0.0)) {
    throw std::invalid_argument("qhat_step: z must be nonzero");
  }
  return q0 / z;
}

}  // namespace laptomo
