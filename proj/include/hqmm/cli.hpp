#pragma once

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hqmm/experiment.hpp"
#include "hqmm/io.hpp"
#include "hqmm/stationary.hpp"
#include "hqmm/trajectory.hpp"
#include "hqmm/version.hpp"
#include "hqmm/wordprob.hpp"

namespace hqmm {

namespace detail {

inline std::string prob_str(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Stationary report for any machine class, as JSON. The closed-form branch
/// reports zero iterations.
inline Json stationary_report_json(const Machine& machine, const SolverSettings& solver) {
  return std::visit(
      [&](const auto& m) -> Json {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, MarkovModel>) {
          FixedPointReport<ProbVector> report{mm_stationary(m), 0, 0.0, true};
          const std::vector<double> mapped = m.transition() * report.state.probs();
          report.residual = one_norm_diff(mapped, report.state.probs());
          return report_to_json(report);
        } else if constexpr (std::is_same_v<T, HiddenMarkovModel>) {
          return report_to_json(hmm_stationary(m, solver.tol, solver.max_iter));
        } else {
          return report_to_json(hqmm_stationary(m, solver.tol, solver.max_iter));
        }
      },
      machine);
}

inline double word_probability(const Machine& machine, const Word& word,
                               const SolverSettings& solver) {
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, MarkovModel>) {
          return hmm_word_prob(mm_to_hmm(m), mm_stationary(m), word);
        } else if constexpr (std::is_same_v<T, HiddenMarkovModel>) {
          const auto report = hmm_stationary(m, solver.tol, solver.max_iter);
          if (!report.converged)
            throw IoError("stationary state did not converge within " +
                          std::to_string(solver.max_iter) + " iterations");
          return hmm_word_prob(m, report.state, word);
        } else {
          const auto report = hqmm_stationary(m, solver.tol, solver.max_iter);
          if (!report.converged)
            throw IoError("stationary state did not converge within " +
                          std::to_string(solver.max_iter) + " iterations");
          return hqmm_word_prob(m, report.state, word);
        }
      },
      machine);
}

}  // namespace detail

/// Exit codes: 0 success, 1 validation failure, 2 config or I/O error.
inline int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Markov, hidden Markov and one-qubit hidden quantum Markov machines: "
               "stationary states, word probabilities, trajectory simulation and "
               "random-ensemble scatter experiments"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  SolverSettings solver;

  std::string validate_path;
  CLI::App* cmd_validate = app.add_subcommand("validate", "run the class validator on a machine file");
  cmd_validate->add_option("machine", validate_path, "machine JSON file")->required();

  std::string stationary_path;
  CLI::App* cmd_stationary =
      app.add_subcommand("stationary", "print the stationary-state report as JSON");
  cmd_stationary->add_option("machine", stationary_path, "machine JSON file")->required();
  cmd_stationary->add_option("--tol", solver.tol, "fixed-point tolerance");
  cmd_stationary->add_option("--max-iter", solver.max_iter, "iteration cap");

  std::string wordprob_path;
  std::string wordprob_word;
  CLI::App* cmd_wordprob =
      app.add_subcommand("wordprob", "print the stationary probability of a word");
  cmd_wordprob->add_option("machine", wordprob_path, "machine JSON file")->required();
  cmd_wordprob->add_option("word", wordprob_word, "word over {A,B}, e.g. BAAAB")->required();
  cmd_wordprob->add_option("--tol", solver.tol, "fixed-point tolerance");
  cmd_wordprob->add_option("--max-iter", solver.max_iter, "iteration cap");

  std::string simulate_path;
  std::size_t sim_steps = 1000;
  std::size_t sim_burn_in = 1000;
  std::uint64_t sim_seed = 0;
  std::uint64_t sim_stream = 0;
  std::string sim_word;
  CLI::App* cmd_simulate =
      app.add_subcommand("simulate", "emit one trajectory and, with --word, an empirical estimate");
  cmd_simulate->add_option("machine", simulate_path, "machine JSON file")->required();
  cmd_simulate->add_option("--steps", sim_steps, "recorded steps")->required();
  cmd_simulate->add_option("--burn-in", sim_burn_in, "unrecorded equilibration steps");
  cmd_simulate->add_option("--seed", sim_seed, "master seed");
  cmd_simulate->add_option("--stream", sim_stream, "stream index");
  cmd_simulate->add_option("--word", sim_word, "word to estimate from the trajectory");

  std::string scatter_config_path;
  unsigned scatter_threads = 0;
  CLI::App* cmd_scatter = app.add_subcommand("scatter", "run the ensemble scatter experiment");
  cmd_scatter->add_option("config", scatter_config_path, "experiment config JSON file")->required();
  cmd_scatter->add_option("--threads", scatter_threads, "worker count (0 = hardware)");

  std::vector<std::string> envelope_csvs;
  std::size_t envelope_bins = 20;
  CLI::App* cmd_envelope =
      app.add_subcommand("envelope", "per-bin envelope report from scatter CSVs");
  cmd_envelope->add_option("csv", envelope_csvs, "scatter CSV files")->required();
  cmd_envelope->add_option("--bins", envelope_bins, "number of equal-width P(B) bins");

  try {
    app.parse(argc, argv);

    if (*cmd_validate) {
      const Machine machine = load_machine(validate_path);
      std::visit([&](const auto& m) { (void)m; }, machine);
      std::cout << "valid\n";
      return 0;
    }

    if (*cmd_stationary) {
      const Machine machine = load_machine(stationary_path);
      std::cout << detail::stationary_report_json(machine, solver).dump(2) << '\n';
      return 0;
    }

    if (*cmd_wordprob) {
      const Machine machine = load_machine(wordprob_path);
      const Word word = Word::parse(wordprob_word);
      std::cout << detail::prob_str(detail::word_probability(machine, word, solver)) << '\n';
      return 0;
    }

    if (*cmd_simulate) {
      const Machine machine = load_machine(simulate_path);
      const TrajectoryRecord record =
          simulate(machine, sim_steps, sim_burn_in, RngSeed{sim_seed, sim_stream});
      std::cout << record.symbols.str() << '\n';
      if (!sim_word.empty()) {
        const EmpiricalEstimate est = empirical_word_prob(record, Word::parse(sim_word));
        std::cout << estimate_to_json(est).dump() << '\n';
      }
      return 0;
    }

    if (*cmd_scatter) {
      const ExperimentConfig config = config_from_json(load_json_file(scatter_config_path));
      const ScatterResult result = run_scatter(config, scatter_threads);
      for (std::size_t e = 0; e < result.csv_paths.size(); ++e) {
        std::size_t converged = 0;
        for (const ScatterRecord& rec : result.per_ensemble[e])
          if (rec.converged) ++converged;
        std::cout << result.csv_paths[e] << ": " << converged << "/"
                  << result.per_ensemble[e].size() << " machines converged\n";
      }
      std::cout << result.manifest_path << '\n';
      return 0;
    }

    if (*cmd_envelope) {
      std::vector<ScatterRecord> records;
      for (const std::string& path : envelope_csvs) {
        std::vector<ScatterRecord> part = read_scatter_csv(path);
        records.insert(records.end(), part.begin(), part.end());
      }
      std::cout << envelope_to_json(envelope(records, envelope_bins)).dump(2) << '\n';
      return 0;
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const ContractError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const Json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

}  // namespace hqmm
