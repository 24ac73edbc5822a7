#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hqmm/models.hpp"
#include "hqmm/rng.hpp"

namespace hqmm {

enum class MachineClass { mm, hmm, hqmm_restricted };

inline std::string_view to_string(MachineClass cls) {
  switch (cls) {
    case MachineClass::mm: return "mm";
    case MachineClass::hmm: return "hmm";
    case MachineClass::hqmm_restricted: return "hqmm_restricted";
  }
  throw ContractError("unknown machine class");
}

inline MachineClass machine_class_from_string(std::string_view s) {
  if (s == "mm") return MachineClass::mm;
  if (s == "hmm") return MachineClass::hmm;
  if (s == "hqmm_restricted") return MachineClass::hqmm_restricted;
  throw DomainError("unknown machine class '" + std::string(s) +
                    "', expected mm, hmm or hqmm_restricted");
}

/// One random ensemble: n_machines machines of one class, machine i drawn
/// from the stream (master_seed, i). The desk-scale default is 10^4 machines.
struct EnsembleSpec {
  MachineClass machine_class = MachineClass::mm;
  std::size_t n_states = 2;  // hmm only
  std::size_t n_machines = 10000;
  std::uint64_t master_seed = 0;

  void validate() const {
    if (n_machines < 1) throw DomainError("an ensemble needs n_machines >= 1");
    if (machine_class == MachineClass::hmm && n_states < 2)
      throw DomainError("hmm ensembles need n_states >= 2");
  }
};

/// p and q independently uniform on the open unit interval.
inline MarkovModel sample_mm(RngSeed seed) {
  Pcg32 rng(seed);
  const double p = rng.next_open01();
  const double q = rng.next_open01();
  return make_mm(p, q);
}

/// Each column of the total transition matrix is drawn uniformly from the
/// probability simplex (normalized exponentials, i.e. a flat Dirichlet);
/// each entry is then split between the two output symbols by an independent
/// uniform factor, so 0 <= t_a(j,i) <= t(j,i) entrywise.
///
/// Draw order, fixed for reproducibility: for each column, first the N
/// exponentials (row order), then the N split factors (row order).
inline HiddenMarkovModel sample_hmm(std::size_t n_states, RngSeed seed) {
  if (n_states < 2) throw DomainError("sample_hmm requires n_states >= 2");
  Pcg32 rng(seed);
  Matrix t_a(n_states, n_states);
  Matrix t_b(n_states, n_states);
  std::vector<double> column(n_states);
  for (std::size_t i = 0; i < n_states; ++i) {
    double total = 0.0;
    for (std::size_t j = 0; j < n_states; ++j) {
      column[j] = -std::log(rng.next_open01());
      total += column[j];
    }
    for (std::size_t j = 0; j < n_states; ++j) {
      const double t = column[j] / total;
      const double u = rng.next_open01();
      t_a(j, i) = u * t;
      t_b(j, i) = (1.0 - u) * t;
    }
  }
  return make_hmm(std::move(t_a), std::move(t_b), kInternalTol);
}

/// a uniform on (0,1); phi and theta uniform on (0, 2*pi).
inline RestrictedParams sample_restricted_params(RngSeed seed) {
  Pcg32 rng(seed);
  RestrictedParams params;
  params.a = rng.next_open01();
  params.phi = kTwoPi * rng.next_open01();
  params.theta = kTwoPi * rng.next_open01();
  return params;
}

inline HqmmModel sample_restricted_hqmm(RngSeed seed) {
  return restricted_hqmm(sample_restricted_params(seed));
}

}  // namespace hqmm
