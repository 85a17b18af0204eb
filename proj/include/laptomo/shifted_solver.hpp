// Copyright (c) the laptomo authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "laptomo/assembly.hpp"
#include "laptomo/factorization.hpp"
#include "laptomo/talbot.hpp"

namespace laptomo {

enum class KrylovVariant { Fom, Gmres };

/// Preconditioner shifts available as factorizations plus the cyclic pattern
/// assigning a shift to each Arnoldi iteration.
struct PreconditionerSchedule {
  std::vector<Complex> taus;  // distinct shifts, one factorization each
  std::vector<int> pattern;   // cyclic indices into taus

  Complex tau_at(int iteration) const {  // 0-based
    return taus[static_cast<std::size_t>(
        pattern[static_cast<std::size_t>(iteration) % pattern.size()])];
  }
};

PreconditionerSchedule single_tau_schedule(Complex tau);

/// Heuristic from the contour geometry: tau_1 is the shift with the smallest
/// real part, tau_2 the one with the largest, applied as the repeating block
/// [tau_1, tau_1, tau_1, tau_2, tau_2]. Ties on the real part are broken by
/// smaller imaginary part, then by index. A single shift degenerates to the
/// single-preconditioner method.
PreconditionerSchedule select_preconditioner_shifts(const std::vector<Complex>& shifts);

struct ShiftedSolveOptions {
  KrylovVariant variant = KrylovVariant::Gmres;
  double tol = 1e-10;  // relative residual tolerance against ||b||
  int maxit = 0;       // 0: min(n, 10 * n_shifts)
  bool keep_basis = false;
  bool record_history = true;
};

struct ShiftStatus {
  bool converged = false;
  int iteration = 0;  // Arnoldi step at which the shift froze (1-based)
  double estimate = std::numeric_limits<double>::infinity();  // relative
  double true_residual = std::numeric_limits<double>::quiet_NaN();  // relative, checked at freeze
  std::vector<double> history;  // relative residual estimate per iteration
};

/// Arnoldi data of the flexible iteration after m steps:
///   (K + z M) U_m = V_{m+1} Hbar_m(z; T_m),
///   Hbar_m(z; T_m) = [I; 0] + Hbar_m (z I - T_m).
struct FlexibleBasisState {
  Eigen::MatrixXcd V;     // n x (m+1), orthonormal
  Eigen::MatrixXcd U;     // n x m, preconditioned basis
  Eigen::MatrixXcd Hbar;  // (m+1) x m
  Eigen::VectorXcd taus;  // applied tau_j, j = 1..m
  double beta = 0.0;      // ||b||

  int steps() const { return static_cast<int>(Hbar.cols()); }
  /// Hbar_m(z; T_m) for a probe shift.
  Eigen::MatrixXcd shifted_hessenberg(Complex z) const;
};

struct ShiftedSolveResult {
  Eigen::MatrixXcd solutions;  // n x n_shifts
  int iterations = 0;          // Arnoldi steps performed
  bool all_converged = false;
  std::vector<ShiftStatus> shifts;
  std::optional<FlexibleBasisState> basis;

  std::vector<int> unconverged() const;
};

/// The pencil (K, M) with a cache of shift-and-invert factorizations of
/// K + tau M. Factorizations are built on first use and shared across
/// forward and adjoint solves.
class ShiftedPencil {
 public:
  ShiftedPencil(const SparseReal& stiffness, const SparseReal& mass);

  Eigen::Index rows() const { return stiffness_.rows(); }
  Eigen::VectorXcd apply(Complex z, const Eigen::VectorXcd& x) const;          // (K + z M) x
  Eigen::VectorXcd apply_adjoint(Complex z, const Eigen::VectorXcd& x) const;  // (K + z M)^H x
  Eigen::VectorXcd apply_mass(const Eigen::VectorXcd& x) const;                // M x

  const SparseComplexFactorization& factorization(Complex tau) const;
  int factorization_count() const { return static_cast<int>(cache_.size()); }

 private:
  SparseComplex stiffness_;
  SparseComplex mass_;
  mutable std::vector<std::pair<Complex, std::unique_ptr<SparseComplexFactorization>>> cache_;
};

/// Flexible FOM/GMRES for the family (K + z_k M) x_k = b with a per-iteration
/// preconditioner K + tau_j M. Converged shifts freeze: the solution is
/// stored, its true residual verified, and the shift drops out of the small
/// per-iteration solves.
ShiftedSolveResult solve_shifted_flexible(const ShiftedPencil& pencil, const Eigen::VectorXcd& b,
                                          const std::vector<Complex>& shifts,
                                          const PreconditionerSchedule& schedule,
                                          const ShiftedSolveOptions& options = {});
ShiftedSolveResult solve_shifted_flexible(const SparseReal& stiffness, const SparseReal& mass,
                                          const Eigen::VectorXcd& b,
                                          const std::vector<Complex>& shifts,
                                          const PreconditionerSchedule& schedule,
                                          const ShiftedSolveOptions& options = {});

/// Single shift-and-invert preconditioner K + tau M for all shifts; the
/// constant schedule collapses the flexible relation to the classical one.
ShiftedSolveResult solve_shifted_single(const ShiftedPencil& pencil, const Eigen::VectorXcd& b,
                                        const std::vector<Complex>& shifts, Complex tau,
                                        const ShiftedSolveOptions& options = {});
ShiftedSolveResult solve_shifted_single(const SparseReal& stiffness, const SparseReal& mass,
                                        const Eigen::VectorXcd& b,
                                        const std::vector<Complex>& shifts, Complex tau,
                                        const ShiftedSolveOptions& options = {});

/// One sparse factorization per shift; oracle path for tests and small runs.
Eigen::MatrixXcd solve_shifted_direct(const ShiftedPencil& pencil, const Eigen::VectorXcd& b,
                                      const std::vector<Complex>& shifts);

/// A posteriori FOM residual estimate
///   eta_k = h_{m+1,m} (z_k - tau_m) e_m^* H_m^{-1}(z_k; T_m) beta e_1;
/// the FOM residual is -eta_k v_{m+1}, so its norm equals |eta_k|.
double residual_estimate(const FlexibleBasisState& state, Complex z,
                         const Eigen::VectorXcd& y_fom);

using VectorAction = std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>;

/// Hager-style lower bound of ||A||_1 from forward and adjoint actions.
double estimate_norm_1(Eigen::Index n, const VectorAction& apply,
                       const VectorAction& apply_adjoint);

/// Lower bound of the 1-norm condition number: the product of 1-norm
/// estimates of A and A^{-1}. Never exceeds the true kappa_1(A).
double estimate_condition_1norm(Eigen::Index n, const VectorAction& apply,
                                const VectorAction& apply_adjoint, const VectorAction& solve,
                                const VectorAction& solve_adjoint);

}  // namespace laptomo
