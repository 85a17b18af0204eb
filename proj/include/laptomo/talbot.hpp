// Copyright (c) the laptomo authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>

#include <Eigen/Dense>

namespace laptomo {

using Complex = std::complex<double>;

/// Dimensionless constants of the cotangent contour
///
///   z(theta) = sigma + mu * (theta * cot(alpha * theta) + i * nu * theta),
///   sigma = sigma0 * n_quad / t,  mu = mu0 * n_quad / t,
///
/// traversed for theta in [-pi, pi]. The defaults are the optimized values
/// for which the midpoint quadrature error decays geometrically in n_quad
/// (about 3.89^-n_quad). alpha = 1 recovers the classical parametrization,
/// whose theta -> 0 limit is sigma + mu.
struct TalbotParams {
  double sigma0 = -0.6122;
  double mu0 = 0.5017;
  double nu = 0.2645 / 0.5017;
  double alpha = 0.6407;
};

/// Quadrature data of the inverse Laplace transform for one target time.
/// Only the n_quad/2 nodes with positive imaginary part are stored; the
/// conjugate half is folded into the doubled real part of the reconstruction.
struct TalbotContour {
  int n_quad = 0;     // N_z, full-contour node count (even)
  double time = 0.0;  // t [s]
  double sigma = 0.0, mu = 0.0, nu = 0.0, alpha = 0.0;
  Eigen::VectorXd thetas;    // retained angles, ascending in (0, pi)
  Eigen::VectorXcd nodes;    // z(theta_k)
  Eigen::VectorXcd dnodes;   // z'(theta_k)
  Eigen::VectorXcd weights;  // -(i / N_z) e^{z t} z'(theta_k)

  int n_half() const { return static_cast<int>(nodes.size()); }
};

/// z(theta) of the contour for the given node count and time.
Complex contour_point(const TalbotParams& params, int n_quad, double time, double theta);

/// z'(theta) of the contour.
Complex contour_derivative(const TalbotParams& params, int n_quad, double time, double theta);

/// Midpoint-rule contour for a target time: angles at the midpoints of a
/// uniform partition of [-pi, pi] with spacing 2 pi / n_quad, upper half
/// retained.
TalbotContour build_contour(int n_quad, double time, const TalbotParams& params = {});

/// Reconstruction 2 Re sum_k w_k F(z_k) for scalar transform values.
double inverse_laplace_sum(const TalbotContour& contour, const Eigen::VectorXcd& values);

/// Reconstruction for vector-valued transforms; one column per retained node.
Eigen::VectorXd inverse_laplace_sum(const TalbotContour& contour, const Eigen::MatrixXcd& values);

/// Laplace transform q0 / z of constant-rate pumping switched on at t = 0.
Complex qhat_step(double q0, Complex z);

}  // namespace laptomo
