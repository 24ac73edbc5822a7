// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failed criteria. Runs the full desk-scale ensembles, so expect a few
// minutes of wall time.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "hqmm/hqmm.hpp"
#include "oracles.hpp"

using namespace hqmm;
namespace fs = std::filesystem;

namespace {

int failures = 0;

double run_criterion(int number, const std::string& label, const std::function<bool()>& body) {
  const auto start = std::chrono::steady_clock::now();
  bool ok = false;
  std::string note;
  try {
    ok = body();
  } catch (const std::exception& e) {
    note = std::string(" [exception: ") + e.what() + "]";
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("criterion %2d %s  %s (%.2f s)%s\n", number, ok ? "PASS" : "FAIL", label.c_str(),
              seconds, note.c_str());
  if (!ok) ++failures;
  return seconds;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

// --------------------------------------------------------------------------
// 1. Kraus completeness of sampled restricted machines
// --------------------------------------------------------------------------
bool kraus_completeness() {
  const auto start = std::chrono::steady_clock::now();
  for (std::uint64_t i = 0; i < 10000; ++i) {
    const HqmmModel m = sample_restricted_hqmm({11001, i});
    if (HqmmModel::completeness_deviation(m.k_a(), m.k_b()) > 1e-12) return false;
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return seconds < 1.0;
}

// --------------------------------------------------------------------------
// 2. Closed forms against the embedded-machine evaluation
// --------------------------------------------------------------------------
bool closed_form_agreement() {
  const auto start = std::chrono::steady_clock::now();
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const MarkovModel mm = sample_mm({12001, i});
    const HiddenMarkovModel h = mm_to_hmm(mm);
    const ProbVector p_ss = mm_stationary(mm);
    for (std::size_t m = 1; m <= 12; ++m) {
      if (std::abs(mm_block_prob_closed(mm, m) - hmm_block_prob(h, p_ss, m)) > 1e-12)
        return false;
      if (m >= 2 &&
          std::abs(mm_gap_prob_paper(mm, m) - hmm_gap_prob(h, p_ss, {m - 2})) > 1e-12)
        return false;
    }
    // m = 1 collapses to the single-symbol probability
    if (std::abs(mm_gap_prob_paper(mm, 1) - p_ss.probs()[0]) > 1e-12) return false;
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return seconds < 5.0;
}

// --------------------------------------------------------------------------
// 3. Stationary fixed points: independent one-step residual
// --------------------------------------------------------------------------
bool stationary_residuals() {
  const auto start = std::chrono::steady_clock::now();
  std::size_t converged_total = 0;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const MarkovModel mm = sample_mm({13001, i});
    const ProbVector p_ss = mm_stationary(mm);
    const std::vector<double> mapped = mm.transition() * p_ss.probs();
    if (one_norm_diff(mapped, p_ss.probs()) > 1e-11) return false;
    ++converged_total;
  }
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const HiddenMarkovModel h = sample_hmm(2 + i % 3, {13002, i});
    const auto report = hmm_stationary(h);
    if (!report.converged) continue;
    ++converged_total;
    const std::vector<double> mapped = h.transition() * report.state.probs();
    if (one_norm_diff(mapped, report.state.probs()) > 1e-11) return false;
  }
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const HqmmModel m = sample_restricted_hqmm({13003, i});
    const auto report = hqmm_stationary(m);
    if (!report.converged) continue;
    ++converged_total;
    const Mat2 mapped = channel_apply(m, report.state.matrix());
    if ((mapped - report.state.matrix()).frobenius_norm() > 1e-11) return false;
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  // the vast majority of sampled machines must actually converge
  return converged_total >= 2900 && seconds < 30.0;
}

// --------------------------------------------------------------------------
// 4. Analytic vs Monte Carlo at 10^6 steps
// --------------------------------------------------------------------------
struct OracleCase {
  Machine machine;
  double analytic_b = 0.0;
  double analytic_word = 0.0;
};

bool trajectory_oracle() {
  const std::size_t steps = 1000000;
  const std::size_t burn_in = 1000;
  const Word word_b = Word::parse("B");
  const Word word_big = Word::parse("BAAAB");

  std::vector<OracleCase> cases;
  std::size_t skipped = 0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const MarkovModel mm = sample_mm({14001, i});
    const ProbVector p_ss = mm_stationary(mm);
    const HiddenMarkovModel h = mm_to_hmm(mm);
    cases.push_back({Machine{mm}, hmm_word_prob(h, p_ss, word_b), hmm_word_prob(h, p_ss, word_big)});
  }
  for (std::uint64_t i = 0; i < 100; ++i) {
    const HiddenMarkovModel h = sample_hmm(3, {14002, i});
    const auto report = hmm_stationary(h);
    if (!report.converged) {
      ++skipped;  // no analytic value exists to compare against
      continue;
    }
    cases.push_back({Machine{h}, hmm_word_prob(h, report.state, word_b),
                     hmm_word_prob(h, report.state, word_big)});
  }
  for (std::uint64_t i = 0; i < 100; ++i) {
    const HqmmModel m = sample_restricted_hqmm({14003, i});
    const auto report = hqmm_stationary(m);
    if (!report.converged) {
      ++skipped;
      continue;
    }
    cases.push_back({Machine{m}, hqmm_word_prob(m, report.state, word_b),
                     hqmm_word_prob(m, report.state, word_big)});
  }
  if (cases.size() < 290) return false;

  std::vector<int> failed(cases.size(), 0);
  parallel_for(cases.size(), 0, [&](std::size_t i) {
    const TrajectoryRecord rec =
        simulate(cases[i].machine, steps, burn_in, {14029, static_cast<std::uint64_t>(i)});
    const auto check = [&](const Word& word, double analytic) {
      const EmpiricalEstimate est = empirical_word_prob(rec, word);
      // The estimate-based stderr degenerates to zero for rare words; the
      // null-hypothesis stderr (analytic value in the same binomial formula)
      // covers that regime.
      const double null_stderr =
          std::sqrt(analytic * (1.0 - analytic) / static_cast<double>(est.windows));
      const double scale = std::max(est.std_error, null_stderr);
      return std::abs(est.estimate - analytic) <= 5.0 * scale;
    };
    if (!check(word_b, cases[i].analytic_b) || !check(word_big, cases[i].analytic_word))
      failed[i] = 1;
  });

  std::size_t n_failed = 0;
  for (int f : failed) n_failed += f;
  if (n_failed > 0)
    std::printf("    [oracle] %zu of %zu machines outside 5 sigma (skipped %zu non-converged)\n",
                n_failed, cases.size(), skipped);
  return n_failed == 0;
}

// --------------------------------------------------------------------------
// 5. Gap probability equals the brute-force sum over middle words
// --------------------------------------------------------------------------
bool gap_identity() {
  for (std::uint64_t i = 0; i < 50; ++i) {
    const MarkovModel mm = sample_mm({15001, i});
    const HiddenMarkovModel h = mm_to_hmm(mm);
    const ProbVector p_ss = mm_stationary(mm);
    for (std::size_t g = 0; g <= 8; ++g) {
      double total = 0.0;
      for (const auto& middle : oracles::all_symbol_seqs(g))
        total += hmm_word_prob(h, p_ss, oracles::sandwich_word(middle));
      if (std::abs(hmm_gap_prob(h, p_ss, {g}) - total) > 1e-10) return false;
    }
  }
  for (std::uint64_t i = 0; i < 50; ++i) {
    const HiddenMarkovModel h = sample_hmm(2 + i % 3, {15002, i});
    const auto report = hmm_stationary(h);
    if (!report.converged) continue;
    for (std::size_t g = 0; g <= 8; ++g) {
      double total = 0.0;
      for (const auto& middle : oracles::all_symbol_seqs(g))
        total += hmm_word_prob(h, report.state, oracles::sandwich_word(middle));
      if (std::abs(hmm_gap_prob(h, report.state, {g}) - total) > 1e-10) return false;
    }
  }
  for (std::uint64_t i = 0; i < 50; ++i) {
    const HqmmModel m = sample_restricted_hqmm({15003, i});
    const auto report = hqmm_stationary(m);
    if (!report.converged) continue;
    for (std::size_t g = 0; g <= 8; ++g) {
      double total = 0.0;
      for (const auto& middle : oracles::all_symbol_seqs(g))
        total += hqmm_word_prob(m, report.state, oracles::sandwich_word(middle));
      if (std::abs(hqmm_gap_prob(m, report.state, {g}) - total) > 1e-10) return false;
    }
  }
  return true;
}

// --------------------------------------------------------------------------
// 6. Words of fixed length partition the outcome space
// --------------------------------------------------------------------------
bool normalization() {
  for (std::uint64_t i = 0; i < 50; ++i) {
    const MarkovModel mm = sample_mm({16001, i});
    const HiddenMarkovModel h = mm_to_hmm(mm);
    const ProbVector p_ss = mm_stationary(mm);
    for (std::size_t len = 1; len <= 10; ++len) {
      double total = 0.0;
      for (const auto& seq : oracles::all_symbol_seqs(len))
        total += hmm_word_prob(h, p_ss, Word{std::vector<Symbol>(seq)});
      if (std::abs(total - 1.0) > 1e-10) return false;
    }
  }
  for (std::uint64_t i = 0; i < 50; ++i) {
    const HiddenMarkovModel h = sample_hmm(2 + i % 3, {16002, i});
    const auto report = hmm_stationary(h);
    if (!report.converged) continue;
    for (std::size_t len = 1; len <= 10; ++len) {
      double total = 0.0;
      for (const auto& seq : oracles::all_symbol_seqs(len))
        total += hmm_word_prob(h, report.state, Word{std::vector<Symbol>(seq)});
      if (std::abs(total - 1.0) > 1e-10) return false;
    }
  }
  for (std::uint64_t i = 0; i < 50; ++i) {
    const HqmmModel m = sample_restricted_hqmm({16003, i});
    const auto report = hqmm_stationary(m);
    if (!report.converged) continue;
    for (std::size_t len = 1; len <= 10; ++len) {
      double total = 0.0;
      for (const auto& seq : oracles::all_symbol_seqs(len))
        total += hqmm_word_prob(m, report.state, Word{std::vector<Symbol>(seq)});
      if (std::abs(total - 1.0) > 1e-10) return false;
    }
  }
  return true;
}

// --------------------------------------------------------------------------
// 7. Long gaps decorrelate to the squared stationary probability
// --------------------------------------------------------------------------
bool decorrelation_limit() {
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const MarkovModel mm = sample_mm({17002, i});
    const HiddenMarkovModel h = mm_to_hmm(mm);
    const ProbVector p_ss = mm_stationary(mm);
    const double p1 = p_ss.probs()[0];
    if (std::abs(hmm_gap_prob(h, p_ss, {400}) - p1 * p1) > 1e-6) return false;
  }
  return true;
}

// --------------------------------------------------------------------------
// 8. Hidden-state count barely moves the envelope
// --------------------------------------------------------------------------
bool envelope_state_invariance() {
  const Word word = Word::parse("BAAAB");
  const SolverSettings solver;
  const std::size_t n_machines = 10000;
  const std::size_t bins = 20;

  std::vector<EnvelopeReport> reports;
  for (std::size_t n_states = 2; n_states <= 4; ++n_states) {
    EnsembleSpec spec{MachineClass::hmm, n_states, n_machines, 18000 + n_states};
    std::vector<ScatterRecord> records(n_machines);
    parallel_for(n_machines, 0, [&](std::size_t i) {
      records[i] = evaluate_machine(sample_machine(spec, i), word, solver);
    });
    reports.push_back(envelope(records, bins));
  }

  const auto* base = reports[0].find(MachineClass::hmm);
  for (std::size_t r = 1; r < reports.size(); ++r) {
    const auto* env = reports[r].find(MachineClass::hmm);
    for (std::size_t b = 0; b < bins; ++b)
      if (env->max_p_word[b] - base->max_p_word[b] > 0.05) return false;
  }
  return true;
}

// --------------------------------------------------------------------------
// 9 and 11. Class comparison scatter: quantum envelope dominance somewhere,
// and byte-identical reruns across worker counts
// --------------------------------------------------------------------------
ExperimentConfig comparison_config(const std::string& out_dir) {
  ExperimentConfig config;
  config.output_path = out_dir;
  config.ensembles = {
      {MachineClass::mm, 2, 10000, 19001},
      {MachineClass::hmm, 2, 10000, 19002},
      {MachineClass::hqmm_restricted, 2, 10000, 19003},
  };
  return config;
}

bool envelope_quantum_dominance() {
  const fs::path dir = fs::temp_directory_path() / "hqmm_acceptance_fig4";
  fs::remove_all(dir);
  const ScatterResult result = run_scatter(comparison_config(dir.string()), 0);

  std::vector<ScatterRecord> merged;
  for (const auto& batch : result.per_ensemble)
    merged.insert(merged.end(), batch.begin(), batch.end());
  const EnvelopeReport report = envelope(merged, 20);
  const auto* env_mm = report.find(MachineClass::mm);
  const auto* env_hmm = report.find(MachineClass::hmm);
  const auto* env_q = report.find(MachineClass::hqmm_restricted);
  if (!env_mm || !env_hmm || !env_q) return false;

  bool dominated = false;
  for (std::size_t b = 0; b < report.bins; ++b) {
    if (env_q->count[b] == 0) continue;
    if (env_q->max_p_word[b] > env_mm->max_p_word[b] &&
        env_q->max_p_word[b] > env_hmm->max_p_word[b])
      dominated = true;
  }
  fs::remove_all(dir);
  return dominated;
}

bool scatter_determinism() {
  const fs::path dir_a = fs::temp_directory_path() / "hqmm_acceptance_det_a";
  const fs::path dir_b = fs::temp_directory_path() / "hqmm_acceptance_det_b";
  const fs::path dir_c = fs::temp_directory_path() / "hqmm_acceptance_det_c";
  for (const auto& d : {dir_a, dir_b, dir_c}) fs::remove_all(d);

  const ScatterResult first = run_scatter(comparison_config(dir_a.string()), 1);
  const ScatterResult second = run_scatter(comparison_config(dir_b.string()), 1);
  const ScatterResult parallel = run_scatter(comparison_config(dir_c.string()), 4);

  bool ok = first.csv_paths.size() == second.csv_paths.size() &&
            first.csv_paths.size() == parallel.csv_paths.size();
  for (std::size_t e = 0; ok && e < first.csv_paths.size(); ++e) {
    const std::string bytes = slurp(first.csv_paths[e]);
    ok = !bytes.empty() && bytes == slurp(second.csv_paths[e]) &&
         bytes == slurp(parallel.csv_paths[e]);
  }
  for (const auto& d : {dir_a, dir_b, dir_c}) fs::remove_all(d);
  return ok;
}

// --------------------------------------------------------------------------
// 10. Decay-realization operator identities on random states
// --------------------------------------------------------------------------
bool decay_identities() {
  Pcg32 rng(20001, 0);
  for (int trial = 0; trial < 1000; ++trial) {
    const double gamma = 0.05 + 4.0 * rng.next_open01();
    const double dt = 0.05 + 3.0 * rng.next_open01();
    const double phi = kTwoPi * rng.next_open01();
    const double theta = kTwoPi * rng.next_open01();
    const HqmmModel machine = decay_realization(gamma, dt, phi, theta);
    const Vec2 psi = oracles::random_pure_state(rng);

    const double a = std::exp(-gamma * dt / 2.0);
    // no-emission branch: damp the excited amplitude, then rotate
    const Vec2 damped{psi.c0, a * psi.c1};
    const Vec2 u_a_damped{std::cos(phi) * damped.c0 - std::sin(phi) * damped.c1,
                          std::sin(phi) * damped.c0 + std::cos(phi) * damped.c1};
    if ((machine.k_a() * psi - u_a_damped).norm() > 1e-12) return false;

    // emission branch: collapse to the post-emission amplitude, then rotate
    const double root = std::sqrt(1.0 - a * a);
    const Vec2 collapsed{Complex{0.0, 0.0}, root * psi.c1};
    const Vec2 u_b_collapsed{std::cos(theta) * collapsed.c0 + std::sin(theta) * collapsed.c1,
                             -std::sin(theta) * collapsed.c0 + std::cos(theta) * collapsed.c1};
    if ((machine.k_b() * psi - u_b_collapsed).norm() > 1e-12) return false;
  }
  return true;
}

}  // namespace

int main() {
  // keep the run hermetic; the override is exercised in the unit tests
  unsetenv(kMasterSeedEnvVar);

  run_criterion(1, "Kraus completeness of 10^4 sampled restricted machines", kraus_completeness);
  run_criterion(2, "closed-form block/gap vs embedded evaluation, 10^3 chains",
                closed_form_agreement);
  run_criterion(3, "one-step residual <= 1e-11 for 10^3 machines per class",
                stationary_residuals);
  run_criterion(4, "analytic vs Monte Carlo, 100 machines per class, 10^6 steps",
                trajectory_oracle);
  run_criterion(5, "gap equals brute-force sum over middle words, g <= 8", gap_identity);
  run_criterion(6, "word probabilities of length <= 10 sum to 1", normalization);
  run_criterion(7, "gap at g = 400 within 1e-6 of squared stationary probability",
                decorrelation_limit);
  run_criterion(8, "envelope nearly independent of hidden-state count (N = 2,3,4)",
                envelope_state_invariance);
  run_criterion(9, "quantum envelope strictly dominates both classical envelopes somewhere",
                envelope_quantum_dominance);
  run_criterion(10, "decay-realization operator identities on random states", decay_identities);
  run_criterion(11, "byte-identical scatter CSVs across reruns and worker counts",
                scatter_determinism);

  if (failures == 0)
    std::printf("all acceptance criteria passed\n");
  else
    std::printf("%d acceptance criteria FAILED\n", failures);
  return failures;
}
