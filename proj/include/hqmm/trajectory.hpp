#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hqmm/models.hpp"
#include "hqmm/rng.hpp"

namespace hqmm {

/// Any of the three machine classes.
using Machine = std::variant<MarkovModel, HiddenMarkovModel, HqmmModel>;

struct TrajectoryRecord {
  Word symbols;
  std::variant<ProbVector, PureState> final_state;
  std::size_t steps = 0;
};

/// Sliding-window frequency estimate with the binomial standard error.
/// Overlapping windows are autocorrelated, so comparisons against analytic
/// values should use a generous multiple of std_error.
struct EmpiricalEstimate {
  double estimate = 0.0;
  std::size_t count = 0;
  std::size_t windows = 0;
  double std_error = 0.0;
};

namespace detail {

/// Draws the next output with probabilities (eta T_A x, eta T_B x) and
/// writes the normalized posterior of the drawn branch into `next`.
/// `branch_a` and `branch_b` are caller-owned scratch buffers.
inline Symbol classical_step(const HiddenMarkovModel& hmm, const std::vector<double>& state,
                             std::vector<double>& branch_a, std::vector<double>& branch_b,
                             std::vector<double>& next, Pcg32& rng) {
  matvec(hmm.t_a(), state, branch_a);
  matvec(hmm.t_b(), state, branch_b);
  const double pr_a = sum(branch_a);
  const double pr_b = sum(branch_b);
  if (pr_a + pr_b <= 0.0)
    throw InternalError("classical step: both output branches have zero probability");

  const Symbol drawn = rng.next_double() < pr_a ? Symbol::A : Symbol::B;
  const std::vector<double>& branch = drawn == Symbol::A ? branch_a : branch_b;
  const double pr = drawn == Symbol::A ? pr_a : pr_b;
  if (pr <= 0.0) throw InternalError("classical step: drew a zero-probability branch");
  next.resize(branch.size());
  for (std::size_t i = 0; i < branch.size(); ++i) {
    const double v = branch[i] / pr;
    next[i] = v < 0.0 ? 0.0 : v;  // clip float noise from barely-valid user input
  }
  return drawn;
}

/// Draws the next output with probabilities ||K_m psi||^2 and collapses
/// `psi` onto the normalized branch state.
inline Symbol quantum_step(const HqmmModel& machine, Vec2& psi, Pcg32& rng) {
  const Vec2 branch_a = machine.k_a() * psi;
  const Vec2 branch_b = machine.k_b() * psi;
  const double pr_a = branch_a.norm_sq();
  const double pr_b = branch_b.norm_sq();
  if (pr_a + pr_b <= 0.0)
    throw InternalError("quantum step: both output branches have zero probability");

  const Symbol drawn = rng.next_double() < pr_a ? Symbol::A : Symbol::B;
  const Vec2& branch = drawn == Symbol::A ? branch_a : branch_b;
  const double pr = drawn == Symbol::A ? pr_a : pr_b;
  if (pr <= 0.0) throw InternalError("quantum step: drew a zero-probability branch");
  psi = (1.0 / std::sqrt(pr)) * branch;
  return drawn;
}

}  // namespace detail

inline std::pair<Symbol, ProbVector> step_classical(const HiddenMarkovModel& hmm,
                                                    const ProbVector& state, Pcg32& rng) {
  if (state.size() != hmm.n_states())
    throw ContractError("step_classical: state dimension does not match the machine");
  std::vector<double> scratch_a;
  std::vector<double> scratch_b;
  std::vector<double> next;
  const Symbol drawn = detail::classical_step(hmm, state.probs(), scratch_a, scratch_b, next, rng);
  return {drawn, ProbVector(std::move(next), kUserTol)};
}

inline std::pair<Symbol, PureState> step_quantum(const HqmmModel& machine, const PureState& state,
                                                 Pcg32& rng) {
  Vec2 psi = state.amplitudes();
  const Symbol drawn = detail::quantum_step(machine, psi, rng);
  return {drawn, PureState(psi, kInternalTol)};
}

/// Runs one machine for burn_in unrecorded steps followed by n_steps recorded
/// ones. Starts are deterministic (uniform distribution for classical
/// machines, the first basis state for quantum ones) so identical seeds give
/// identical records. Markov chains run through their hidden-machine
/// embedding.
inline TrajectoryRecord simulate(const Machine& machine, std::size_t n_steps,
                                 std::size_t burn_in, RngSeed seed) {
  if (n_steps == 0) throw ContractError("simulate requires n_steps >= 1");
  Pcg32 rng(seed);
  std::vector<Symbol> symbols;
  symbols.reserve(n_steps);

  const auto run_classical = [&](const HiddenMarkovModel& hmm) -> TrajectoryRecord {
    const std::size_t n = hmm.n_states();
    std::vector<double> state(n, 1.0 / static_cast<double>(n));
    std::vector<double> branch_a;
    std::vector<double> branch_b;
    std::vector<double> next;
    for (std::size_t k = 0; k < burn_in; ++k) {
      detail::classical_step(hmm, state, branch_a, branch_b, next, rng);
      state.swap(next);
    }
    for (std::size_t k = 0; k < n_steps; ++k) {
      symbols.push_back(detail::classical_step(hmm, state, branch_a, branch_b, next, rng));
      state.swap(next);
    }
    return {Word(std::move(symbols)), ProbVector(std::move(state), kUserTol), n_steps};
  };

  const auto run_quantum = [&](const HqmmModel& m) -> TrajectoryRecord {
    Vec2 psi{1.0, 0.0};
    for (std::size_t k = 0; k < burn_in; ++k) detail::quantum_step(m, psi, rng);
    for (std::size_t k = 0; k < n_steps; ++k) symbols.push_back(detail::quantum_step(m, psi, rng));
    return {Word(std::move(symbols)), PureState(psi, kUserTol), n_steps};
  };

  return std::visit(
      [&](const auto& m) -> TrajectoryRecord {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, MarkovModel>) {
          return run_classical(mm_to_hmm(m));
        } else if constexpr (std::is_same_v<T, HiddenMarkovModel>) {
          return run_classical(m);
        } else {
          return run_quantum(m);
        }
      },
      machine);
}

/// Frequency of exact matches of `word` over all overlapping windows of the
/// record.
inline EmpiricalEstimate empirical_word_prob(const TrajectoryRecord& record, const Word& word) {
  const std::vector<Symbol>& s = record.symbols.symbols;
  const std::size_t len = word.size();
  if (s.size() < len)
    throw ContractError("empirical_word_prob: record is shorter than the word");

  const std::size_t windows = s.size() - len + 1;
  std::size_t count = 0;
  for (std::size_t start = 0; start < windows; ++start) {
    bool match = true;
    for (std::size_t k = 0; k < len; ++k) {
      if (s[start + k] != word.symbols[k]) {
        match = false;
        break;
      }
    }
    if (match) ++count;
  }

  EmpiricalEstimate est;
  est.count = count;
  est.windows = windows;
  est.estimate = static_cast<double>(count) / static_cast<double>(windows);
  est.std_error =
      std::sqrt(est.estimate * (1.0 - est.estimate) / static_cast<double>(windows));
  return est;
}

}  // namespace hqmm
