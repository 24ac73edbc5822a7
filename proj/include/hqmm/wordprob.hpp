#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "hqmm/linalg.hpp"
#include "hqmm/models.hpp"

namespace hqmm {

/// Window pattern "A, then g unconstrained symbols, then A".
struct GapSpec {
  std::size_t g = 0;
};

namespace detail {

/// Clamps float noise at the edges of [0,1]; anything beyond 1e-12 outside
/// the interval is a consistency failure, not noise.
inline double finalize_probability(double value, const char* context) {
  constexpr double slack = 1e-12;
  if (value < -slack || value > 1.0 + slack)
    throw InternalError(std::string(context) + ": probability " + num_str(value) +
                        " escaped [0,1] by more than 1e-12");
  return std::clamp(value, 0.0, 1.0);
}

inline void require_matching_dims(const HiddenMarkovModel& hmm, const ProbVector& p_ss,
                                  const char* context) {
  if (p_ss.size() != hmm.n_states())
    throw ContractError(std::string(context) + ": stationary vector has dimension " +
                        std::to_string(p_ss.size()) + " but the machine has " +
                        std::to_string(hmm.n_states()) + " states");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Classical machines. All probabilities are evaluated from the stationary
// state: P(w) = eta T_{w_L} ... T_{w_1} p_ss with eta the all-ones row.
// ---------------------------------------------------------------------------

inline double hmm_word_prob(const HiddenMarkovModel& hmm, const ProbVector& p_ss,
                            const Word& word) {
  detail::require_matching_dims(hmm, p_ss, "hmm_word_prob");
  std::vector<double> v = p_ss.probs();
  std::vector<double> next;
  for (Symbol m : word.symbols) {
    matvec(hmm.sub(m), v, next);
    v.swap(next);
  }
  return detail::finalize_probability(sum(v), "hmm_word_prob");
}

/// Probability of the explicit word A B...B A with g middle B's:
/// eta T_A T_B^g T_A p_ss.
inline double hmm_block_prob(const HiddenMarkovModel& hmm, const ProbVector& p_ss,
                             std::size_t g) {
  detail::require_matching_dims(hmm, p_ss, "hmm_block_prob");
  std::vector<double> v;
  std::vector<double> next;
  matvec(hmm.t_a(), p_ss.probs(), v);
  for (std::size_t k = 0; k < g; ++k) {
    matvec(hmm.t_b(), v, next);
    v.swap(next);
  }
  matvec(hmm.t_a(), v, next);
  return detail::finalize_probability(sum(next), "hmm_block_prob");
}

/// Probability of "A, g ignored symbols, A": eta T_A T^g T_A p_ss with
/// T = T_A + T_B marginalizing the ignored outputs.
inline double hmm_gap_prob(const HiddenMarkovModel& hmm, const ProbVector& p_ss, GapSpec gap) {
  detail::require_matching_dims(hmm, p_ss, "hmm_gap_prob");
  const Matrix t = hmm.transition();
  std::vector<double> v;
  std::vector<double> next;
  matvec(hmm.t_a(), p_ss.probs(), v);
  for (std::size_t k = 0; k < gap.g; ++k) {
    matvec(t, v, next);
    v.swap(next);
  }
  matvec(hmm.t_a(), v, next);
  return detail::finalize_probability(sum(next), "hmm_gap_prob");
}

/// Closed form for the word A B^m A on a two-state chain:
/// (1-p)(1-q)^2 / (2-p-q) * q^(m-1), defined for m >= 1.
inline double mm_block_prob_closed(const MarkovModel& mm, std::size_t m) {
  if (m == 0) throw ContractError("mm_block_prob_closed requires m >= 1");
  const double p = mm.p();
  const double q = mm.q();
  const double prefactor = (1.0 - p) * (1.0 - q) * (1.0 - q) / (2.0 - p - q);
  return detail::finalize_probability(prefactor * std::pow(q, static_cast<double>(m - 1)),
                                      "mm_block_prob_closed");
}

/// Verbatim gap formula for the two-state chain:
/// p_1 * (1,0) T^(m-1) (1,0)^t, defined for m >= 1.
///
/// Its indexing differs from the block convention above: for m >= 2 it
/// equals hmm_gap_prob on the embedded chain with g = m - 2 ignored symbols,
/// and m = 1 collapses to the single-symbol probability p_1. The
/// self-consistent g-based convention is the canonical API; this form is
/// kept for comparison.
inline double mm_gap_prob_paper(const MarkovModel& mm, std::size_t m) {
  if (m == 0) throw ContractError("mm_gap_prob_paper requires m >= 1");
  const Matrix t = mm.transition();
  const double p1 = (1.0 - mm.q()) / (2.0 - mm.p() - mm.q());
  double x0 = 1.0;
  double x1 = 0.0;
  for (std::size_t k = 1; k < m; ++k) {
    const double y0 = t(0, 0) * x0 + t(0, 1) * x1;
    const double y1 = t(1, 0) * x0 + t(1, 1) * x1;
    x0 = y0;
    x1 = y1;
  }
  return detail::finalize_probability(p1 * x0, "mm_gap_prob_paper");
}

// ---------------------------------------------------------------------------
// Quantum machine. The unnormalized conditional matrix is propagated through
// the Kraus conjugations; its trace is the accumulated joint probability.
// ---------------------------------------------------------------------------

inline double hqmm_word_prob(const HqmmModel& machine, const DensityMatrix& rho_ss,
                             const Word& word) {
  Mat2 sigma = rho_ss.matrix();
  for (Symbol m : word.symbols) {
    const Mat2& k = machine.kraus(m);
    sigma = k * sigma * k.adjoint();
  }
  return detail::finalize_probability(sigma.trace().real(), "hqmm_word_prob");
}

/// Tr(K_A K_B^g K_A rho K_A' K_B'^g K_A').
inline double hqmm_block_prob(const HqmmModel& machine, const DensityMatrix& rho_ss,
                              std::size_t g) {
  const Mat2& ka = machine.k_a();
  const Mat2& kb = machine.k_b();
  Mat2 sigma = ka * rho_ss.matrix() * ka.adjoint();
  for (std::size_t k = 0; k < g; ++k) sigma = kb * sigma * kb.adjoint();
  sigma = ka * sigma * ka.adjoint();
  return detail::finalize_probability(sigma.trace().real(), "hqmm_block_prob");
}

/// Tr(K_A C^g(K_A rho K_A') K_A') where C is the measurement-averaged
/// channel applied g times to the unnormalized conditional matrix.
inline double hqmm_gap_prob(const HqmmModel& machine, const DensityMatrix& rho_ss, GapSpec gap) {
  const Mat2& ka = machine.k_a();
  Mat2 sigma = ka * rho_ss.matrix() * ka.adjoint();
  for (std::size_t k = 0; k < gap.g; ++k) sigma = channel_apply(machine, sigma);
  sigma = ka * sigma * ka.adjoint();
  return detail::finalize_probability(sigma.trace().real(), "hqmm_gap_prob");
}

}  // namespace hqmm
