#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "hqmm/linalg.hpp"
#include "hqmm/models.hpp"

namespace hqmm {

struct SolverSettings {
  double tol = 1e-12;
  std::size_t max_iter = 100000;
};

/// Outcome of a fixed-point search. `residual` is the one-step defect of the
/// returned state (1-norm for distributions, Frobenius norm for density
/// matrices); convergence guarantees residual <= 10 * tol.
template <class StateT>
struct FixedPointReport {
  StateT state;
  std::size_t iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

/// Closed-form stationary distribution of the two-state chain:
/// ((1-q)/(2-p-q), (1-p)/(2-p-q)).
inline ProbVector mm_stationary(const MarkovModel& mm) {
  const double denom = 2.0 - mm.p() - mm.q();
  return ProbVector({(1.0 - mm.q()) / denom, (1.0 - mm.p()) / denom});
}

// Both fixed-point searches iterate the averaged map x <- (x + Tx)/2 rather
// than the plain power map. Averaging sends every peripheral eigenvalue
// (|z| = 1, z != 1) strictly inside the unit disc ((1+z)/2) while leaving
// fixed points untouched, so oscillatory machines (period-2 chains, unitary
// channels at rational angles) still converge geometrically. Full-history
// Cesaro averaging would converge only like 1/n and could never meet the
// residual target within the iteration budget.
//
// Stopping rule: a bare successive-difference test leaves the distance to
// the limit at roughly diff * rho / (1 - rho) for contraction rate rho, which
// for slowly mixing machines is orders of magnitude above tol. Convergence
// therefore additionally requires the geometric error estimate (with rho
// taken from the ratio of successive differences) to fall below tol.

namespace detail {

inline bool fixed_point_converged(double diff, double prev_diff, double tol) {
  if (diff > tol) return false;
  if (diff <= 1e-3 * tol) return true;  // far below target; rate estimate moot
  if (!(prev_diff > 0.0)) return false;
  const double rate = diff / prev_diff;
  if (rate >= 1.0) return false;
  return diff * rate / (1.0 - rate) <= tol;
}

}  // namespace detail

/// Stationary distribution by averaged power iteration from the uniform
/// start. On convergence the one-step residual ||Tx - x||_1 is at most
/// 2 * tol and the distance to the limit is of order tol.
inline FixedPointReport<ProbVector> hmm_stationary(const HiddenMarkovModel& hmm,
                                                   double tol = 1e-12,
                                                   std::size_t max_iter = 100000) {
  if (!(tol > 0.0)) throw ContractError("tolerance must be positive");
  const Matrix t = hmm.transition();
  const std::size_t n = hmm.n_states();

  std::vector<double> x(n, 1.0 / static_cast<double>(n));
  std::vector<double> tx(n);
  std::size_t iterations = 0;
  bool converged = false;
  double prev_diff = -1.0;
  for (std::size_t k = 1; k <= max_iter; ++k) {
    matvec(t, x, tx);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double v = 0.5 * (x[i] + tx[i]);
      if (v < 0.0) v = 0.0;  // clip float noise from barely-valid user input
      tx[i] = v;
      total += v;
    }
    double diff = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      tx[i] /= total;
      diff += std::abs(tx[i] - x[i]);
    }
    x.swap(tx);
    iterations = k;
    if (detail::fixed_point_converged(diff, prev_diff, tol)) {
      converged = true;
      break;
    }
    prev_diff = diff;
  }

  matvec(t, x, tx);
  const double residual = one_norm_diff(tx, x);
  return {ProbVector(std::move(x), kUserTol), iterations, residual, converged};
}

/// Linear representation of the measurement-averaged channel on row-vectorized
/// 2x2 matrices: M = K_A (x) conj(K_A) + K_B (x) conj(K_B), so that
/// unvec(M vec(rho)) equals channel_apply(rho).
using SuperoperatorMatrix = Mat4;

inline SuperoperatorMatrix superoperator_matrix(const HqmmModel& machine) {
  return kron(machine.k_a(), conj(machine.k_a())) + kron(machine.k_b(), conj(machine.k_b()));
}

/// Stationary density matrix by averaged power iteration of the
/// superoperator matrix from the maximally mixed start. Each iterate is
/// re-Hermitized and trace-renormalized.
inline FixedPointReport<DensityMatrix> hqmm_stationary(const HqmmModel& machine,
                                                       double tol = 1e-12,
                                                       std::size_t max_iter = 100000) {
  if (!(tol > 0.0)) throw ContractError("tolerance must be positive");
  const SuperoperatorMatrix m = superoperator_matrix(machine);

  Mat2 rho = Mat2::diagonal(0.5, 0.5);
  std::size_t iterations = 0;
  bool converged = false;
  double prev_diff = -1.0;
  for (std::size_t k = 1; k <= max_iter; ++k) {
    const Mat2 mapped = unvec_row(m * vec_row(rho));
    Mat2 next = 0.5 * (rho + mapped);
    next = 0.5 * (next + next.adjoint());
    next = (1.0 / next.trace().real()) * next;
    const double diff = (next - rho).frobenius_norm();
    rho = next;
    iterations = k;
    if (detail::fixed_point_converged(diff, prev_diff, tol)) {
      converged = true;
      break;
    }
    prev_diff = diff;
  }

  const double residual = (unvec_row(m * vec_row(rho)) - rho).frobenius_norm();
  return {DensityMatrix(rho, kUserTol), iterations, residual, converged};
}

}  // namespace hqmm
