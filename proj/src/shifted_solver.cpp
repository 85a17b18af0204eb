// Copyright (c) the laptomo authors.
// SPDX-License-Identifier: Apache-2.0

#include "laptomo/shifted_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/QR>

namespace laptomo {

namespace {

constexpr double kBreakdownTol = 1e-14;

struct SmallSolve {
  Eigen::VectorXcd y;
  double estimate = std::numeric_limits<double>::infinity();  // absolute residual norm
  bool valid = false;
};

/// Hbar_m(z; T_m) = [I; 0] + Hbar_m (z I - T_m).
Eigen::MatrixXcd shifted_hessenberg(const Eigen::MatrixXcd& hbar, const Eigen::VectorXcd& taus,
                                    int m, Complex z) {
  Eigen::MatrixXcd hz = hbar.topLeftCorner(m + 1, m);
  for (int l = 0; l < m; ++l) {
    hz.col(l) *= (z - taus[l]);
    hz(l, l) += 1.0;
  }
  return hz;
}

SmallSolve small_solve_fom(const Eigen::MatrixXcd& hz, double beta) {
  SmallSolve out;
  const int m = static_cast<int>(hz.cols());
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(m);
  rhs[0] = beta;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(hz.topRows(m));
  out.y = lu.solve(rhs);
  if (!out.y.allFinite()) {
    return out;
  }
  // FOM residual is collinear with v_{m+1}; hz(m, m-1) already carries the
  // h_{m+1,m} (z - tau_m) factor from the column scaling.
  out.estimate = std::abs(hz(m, m - 1) * out.y[m - 1]);
  out.valid = true;
  return out;
}

SmallSolve small_solve_gmres(const Eigen::MatrixXcd& hz, double beta) {
  SmallSolve out;
  const int m = static_cast<int>(hz.cols());
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(m + 1);
  rhs[0] = beta;
  out.y = hz.householderQr().solve(rhs);
  if (!out.y.allFinite()) {
    return out;
  }
  out.estimate = (rhs - hz * out.y).norm();
  out.valid = true;
  return out;
}

}  // namespace

Eigen::MatrixXcd FlexibleBasisState::shifted_hessenberg(Complex z) const {
  return laptomo::shifted_hessenberg(Hbar, taus, steps(), z);
}

std::vector<int> ShiftedSolveResult::unconverged() const {
  std::vector<int> out;
  for (int k = 0; k < static_cast<int>(shifts.size()); ++k) {
    if (!shifts[static_cast<std::size_t>(k)].converged) out.push_back(k);
  }
  return out;
}

PreconditionerSchedule single_tau_schedule(Complex tau) {
  return {{tau}, {0}};
}

PreconditionerSchedule select_preconditioner_shifts(const std::vector<Complex>& shifts) {
  if (shifts.empty()) {
    throw std::invalid_argument("select_preconditioner_shifts: empty shift list");
  }
  auto less = [](const Complex& a, const Complex& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  };
  std::size_t i_min = 0, i_max = 0;
  for (std::size_t i = 1; i < shifts.size(); ++i) {
    if (less(shifts[i], shifts[i_min])) i_min = i;
    if (less(shifts[i_max], shifts[i])) i_max = i;
  }
  const Complex tau1 = shifts[i_min];
  const Complex tau2 = shifts[i_max];
  if (tau1 == tau2) {
    return single_tau_schedule(tau1);
  }
  return {{tau1, tau2}, {0, 0, 0, 1, 1}};
}

ShiftedPencil::ShiftedPencil(const SparseReal& stiffness, const SparseReal& mass)
    : stiffness_(stiffness.cast<Complex>()), mass_(mass.cast<Complex>()) {}

Eigen::VectorXcd ShiftedPencil::apply(Complex z, const Eigen::VectorXcd& x) const {
  return stiffness_ * x + z * (mass_ * x);
}

Eigen::VectorXcd ShiftedPencil::apply_adjoint(Complex z, const Eigen::VectorXcd& x) const {
  // K and M are real symmetric, so (K + z M)^H = K + conj(z) M.
  return stiffness_ * x + std::conj(z) * (mass_ * x);
}

Eigen::VectorXcd ShiftedPencil::apply_mass(const Eigen::VectorXcd& x) const { return mass_ * x; }

const SparseComplexFactorization& ShiftedPencil::factorization(Complex tau) const {
  for (const auto& [cached_tau, fact] : cache_) {
    if (cached_tau == tau) return *fact;
  }
  SparseComplex shifted = stiffness_ + tau * mass_;
  shifted.makeCompressed();
  cache_.emplace_back(tau, factorize_sparse(shifted));
  return *cache_.back().second;
}

namespace {

ShiftedSolveResult run_flexible(const ShiftedPencil& pencil, const Eigen::VectorXcd& b,
                                const std::vector<Complex>& shifts,
                                const PreconditionerSchedule& schedule,
                                const ShiftedSolveOptions& options) {
  const Eigen::Index n = pencil.rows();
  const int n_shifts = static_cast<int>(shifts.size());

  ShiftedSolveResult result;
  result.solutions = Eigen::MatrixXcd::Zero(n, n_shifts);
  result.shifts.assign(static_cast<std::size_t>(n_shifts), ShiftStatus{});
  if (n_shifts == 0) {
    result.all_converged = true;
    return result;
  }

  const double beta = b.norm();
  if (beta == 0.0) {
    for (auto& st : result.shifts) {
      st.converged = true;
      st.estimate = 0.0;
      st.true_residual = 0.0;
    }
    result.all_converged = true;
    return result;
  }

  const int maxit = options.maxit > 0
                        ? std::min<int>(static_cast<int>(n), options.maxit)
                        : std::min<int>(static_cast<int>(n), 10 * n_shifts);

  int capacity = std::min(maxit, 64);
  Eigen::MatrixXcd v_basis(n, capacity + 1);
  Eigen::MatrixXcd u_basis(n, capacity);
  Eigen::MatrixXcd hbar = Eigen::MatrixXcd::Zero(capacity + 1, capacity);
  Eigen::VectorXcd taus(capacity);

  v_basis.col(0) = b / beta;

  // Per-shift threshold at which a true-residual verification is attempted;
  // backed off when a verification fails so SpMVs stay rare.
  std::vector<double> verify_at(static_cast<std::size_t>(n_shifts), options.tol);

  int n_converged = 0;
  int m = 0;
  bool breakdown = false;

  for (int j = 0; j < maxit && n_converged < n_shifts; ++j) {
    if (j >= capacity) {
      const int new_capacity = std::min(maxit, 2 * capacity);
      v_basis.conservativeResize(Eigen::NoChange, new_capacity + 1);
      u_basis.conservativeResize(Eigen::NoChange, new_capacity);
      Eigen::MatrixXcd grown = Eigen::MatrixXcd::Zero(new_capacity + 1, new_capacity);
      grown.topLeftCorner(capacity + 1, capacity) = hbar;
      hbar.swap(grown);
      taus.conservativeResize(new_capacity);
      capacity = new_capacity;
    }

    const Complex tau = schedule.tau_at(j);
    taus[j] = tau;
    const auto& factorization = pencil.factorization(tau);
    u_basis.col(j) = factorization.solve(v_basis.col(j));
    Eigen::VectorXcd s = pencil.apply_mass(u_basis.col(j));

    // Modified Gram-Schmidt with one re-orthogonalization pass when the norm
    // drops by more than 1/sqrt(2).
    const double norm_before = s.norm();
    for (int i = 0; i <= j; ++i) {
      const Complex hij = v_basis.col(i).dot(s);
      hbar(i, j) = hij;
      s -= hij * v_basis.col(i);
    }
    if (s.norm() < norm_before / std::numbers::sqrt2) {
      for (int i = 0; i <= j; ++i) {
        const Complex correction = v_basis.col(i).dot(s);
        hbar(i, j) += correction;
        s -= correction * v_basis.col(i);
      }
    }
    const double h_next = s.norm();
    hbar(j + 1, j) = h_next;
    m = j + 1;

    breakdown = h_next <= kBreakdownTol * norm_before;
    if (!breakdown) {
      v_basis.col(j + 1) = s / h_next;
    }

    for (int k = 0; k < n_shifts; ++k) {
      auto& status = result.shifts[static_cast<std::size_t>(k)];
      if (status.converged) continue;

      const Eigen::MatrixXcd hz = shifted_hessenberg(hbar, taus, m, shifts[static_cast<std::size_t>(k)]);
      const SmallSolve small = options.variant == KrylovVariant::Fom
                                   ? small_solve_fom(hz, beta)
                                   : small_solve_gmres(hz, beta);
      if (!small.valid) {
        if (options.record_history) status.history.push_back(status.estimate);
        continue;
      }
      status.estimate = small.estimate / beta;
      if (options.record_history) status.history.push_back(status.estimate);

      if (status.estimate <= verify_at[static_cast<std::size_t>(k)] || breakdown) {
        Eigen::VectorXcd x = u_basis.leftCols(m) * small.y;
        const double true_rel =
            (b - pencil.apply(shifts[static_cast<std::size_t>(k)], x)).norm() / beta;
        if (true_rel <= options.tol || breakdown) {
          status.converged = true;
          status.iteration = m;
          status.true_residual = true_rel;
          result.solutions.col(k) = std::move(x);
          ++n_converged;
        } else {
          // The estimate was optimistic; retry once it improves noticeably.
          verify_at[static_cast<std::size_t>(k)] = status.estimate / 2.0;
        }
      }
    }

    if (breakdown) break;
  }

  result.iterations = m;
  result.all_converged = n_converged == n_shifts;

  if (options.keep_basis) {
    FlexibleBasisState basis;
    basis.V = v_basis.leftCols(m + 1);
    if (breakdown) basis.V.col(m).setZero();
    basis.U = u_basis.leftCols(m);
    basis.Hbar = hbar.topLeftCorner(m + 1, m);
    basis.taus = taus.head(m);
    basis.beta = beta;
    result.basis = std::move(basis);
  }

  // Store best-effort iterates for unconverged shifts so callers can report.
  if (!result.all_converged && m > 0) {
    for (int k = 0; k < n_shifts; ++k) {
      auto& status = result.shifts[static_cast<std::size_t>(k)];
      if (status.converged) continue;
      const Eigen::MatrixXcd hz = shifted_hessenberg(hbar, taus, m, shifts[static_cast<std::size_t>(k)]);
      const SmallSolve small = options.variant == KrylovVariant::Fom
                                   ? small_solve_fom(hz, beta)
                                   : small_solve_gmres(hz, beta);
      if (small.valid) {
        Eigen::VectorXcd x = u_basis.leftCols(m) * small.y;
        status.true_residual =
            (b - pencil.apply(shifts[static_cast<std::size_t>(k)], x)).norm() / beta;
        result.solutions.col(k) = std::move(x);
      }
    }
  }
  return result;
}

}  // namespace

ShiftedSolveResult solve_shifted_flexible(const ShiftedPencil& pencil, const Eigen::VectorXcd& b,
                                          const std::vector<Complex>& shifts,
                                          const PreconditionerSchedule& schedule,
                                          const ShiftedSolveOptions& options) {
  if (schedule.taus.empty() || schedule.pattern.empty()) {
    throw std::invalid_argument("solve_shifted_flexible: empty preconditioner schedule");
  }
  return run_flexible(pencil, b, shifts, schedule, options);
}

ShiftedSolveResult solve_shifted_flexible(const SparseReal& stiffness, const SparseReal& mass,
                                          const Eigen::VectorXcd& b,
                                          const std::vector<Complex>& shifts,
                                          const PreconditionerSchedule& schedule,
                                          const ShiftedSolveOptions& options) {
  ShiftedPencil pencil(stiffness, mass);
  return solve_shifted_flexible(pencil, b, shifts, schedule, options);
}

ShiftedSolveResult solve_shifted_single(const ShiftedPencil& pencil, const Eigen::VectorXcd& b,
                                        const std::vector<Complex>& shifts, Complex tau,
                                        const ShiftedSolveOptions& options) {
  return run_flexible(pencil, b, shifts, single_tau_schedule(tau), options);
}

ShiftedSolveResult solve_shifted_single(const SparseReal& stiffness, const SparseReal& mass,
                                        const Eigen::VectorXcd& b,
                                        const std::vector<Complex>& shifts, Complex tau,
                                        const ShiftedSolveOptions& options) {
  ShiftedPencil pencil(stiffness, mass);
  return solve_shifted_single(pencil, b, shifts, tau, options);
}

Eigen::MatrixXcd solve_shifted_direct(const ShiftedPencil& pencil, const Eigen::VectorXcd& b,
                                      const std::vector<Complex>& shifts) {
  Eigen::MatrixXcd solutions(pencil.rows(), static_cast<Eigen::Index>(shifts.size()));
  for (std::size_t k = 0; k < shifts.size(); ++k) {
    const auto& factorization = pencil.factorization(shifts[k]);
    solutions.col(static_cast<Eigen::Index>(k)) = factorization.solve(b);
  }
  return solutions;
}

double residual_estimate(const FlexibleBasisState& state, Complex z,
                         const Eigen::VectorXcd& y_fom) {
  const int m = state.steps();
  if (m < 1 || y_fom.size() != m) {
    throw std::invalid_argument("residual_estimate: FOM coefficients of length m required");
  }
  const Complex h_next = state.Hbar(m, m - 1);
  const Complex tau_m = state.taus[m - 1];
  return std::abs(h_next * (z - tau_m) * y_fom[m - 1]);
}

}  // namespace laptomo
