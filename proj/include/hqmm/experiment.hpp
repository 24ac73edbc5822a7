#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "hqmm/io.hpp"
#include "hqmm/sampler.hpp"
#include "hqmm/stationary.hpp"
#include "hqmm/trajectory.hpp"
#include "hqmm/version.hpp"
#include "hqmm/wordprob.hpp"

namespace hqmm {

/// Environment variable that, when set, overrides every ensemble's master
/// seed. Recorded in the manifest whenever it is used.
inline constexpr const char* kMasterSeedEnvVar = "HQMM_MASTER_SEED";

/// One evaluated machine. Non-converged machines carry no probabilities and
/// are excluded from scatter CSVs (the manifest counts them).
struct ScatterRecord {
  MachineClass machine_class = MachineClass::mm;
  std::uint64_t machine_index = 0;
  std::vector<double> parameters;
  std::optional<double> p_b;
  std::optional<double> p_word;
  bool converged = false;
  std::size_t iterations = 0;
};

struct ExperimentConfig {
  std::vector<EnsembleSpec> ensembles;
  Word word = Word::parse("BAAAB");
  double tolerance = 1e-12;
  std::size_t max_iter = 100000;
  std::string output_path = "scatter_out";
  std::size_t bins = 20;

  void validate() const {
    if (ensembles.empty()) throw DomainError("config needs at least one ensemble");
    for (const EnsembleSpec& e : ensembles) e.validate();
    if (bins < 2) throw DomainError("config needs bins >= 2");
    if (!(tolerance > 0.0)) throw DomainError("config needs a positive tolerance");
  }
};

inline Json ensemble_to_json(const EnsembleSpec& e) {
  Json j{{"machine_class", std::string(to_string(e.machine_class))},
         {"n_machines", e.n_machines},
         {"master_seed", e.master_seed}};
  if (e.machine_class == MachineClass::hmm) j["n_states"] = e.n_states;
  return j;
}

inline EnsembleSpec ensemble_from_json(const Json& j) {
  EnsembleSpec e;
  e.machine_class = machine_class_from_string(j.at("machine_class").get<std::string>());
  if (j.contains("n_machines")) e.n_machines = j.at("n_machines").get<std::size_t>();
  e.master_seed = j.at("master_seed").get<std::uint64_t>();
  if (j.contains("n_states")) e.n_states = j.at("n_states").get<std::size_t>();
  e.validate();
  return e;
}

inline Json config_to_json(const ExperimentConfig& c) {
  Json ensembles = Json::array();
  for (const EnsembleSpec& e : c.ensembles) ensembles.push_back(ensemble_to_json(e));
  return Json{{"ensembles", std::move(ensembles)}, {"word", c.word.str()},
              {"tolerance", c.tolerance},          {"max_iter", c.max_iter},
              {"output_path", c.output_path},      {"bins", c.bins}};
}

inline ExperimentConfig config_from_json(const Json& j) {
  ExperimentConfig c;
  c.ensembles.clear();
  for (const Json& e : j.at("ensembles")) c.ensembles.push_back(ensemble_from_json(e));
  if (j.contains("word")) c.word = Word::parse(j.at("word").get<std::string>());
  if (j.contains("tolerance")) c.tolerance = j.at("tolerance").get<double>();
  if (j.contains("max_iter")) c.max_iter = j.at("max_iter").get<std::size_t>();
  c.output_path = j.at("output_path").get<std::string>();
  if (j.contains("bins")) c.bins = j.at("bins").get<std::size_t>();
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------
// Sampling plus evaluation of a single machine
// ---------------------------------------------------------------------------

/// A sampled machine together with its flattened natural parameters
/// (mm: p, q; hmm: t_a row-major then t_b row-major; restricted: a, phi,
/// theta), which make every CSV row reconstructible.
struct SampledMachine {
  MachineClass machine_class = MachineClass::mm;
  std::uint64_t index = 0;
  std::vector<double> parameters;
  Machine machine;
};

inline SampledMachine sample_machine(const EnsembleSpec& spec, std::uint64_t index) {
  const RngSeed seed{spec.master_seed, index};
  switch (spec.machine_class) {
    case MachineClass::mm: {
      MarkovModel m = sample_mm(seed);
      return {spec.machine_class, index, {m.p(), m.q()}, m};
    }
    case MachineClass::hmm: {
      HiddenMarkovModel m = sample_hmm(spec.n_states, seed);
      std::vector<double> params;
      params.reserve(2 * spec.n_states * spec.n_states);
      params.insert(params.end(), m.t_a().data().begin(), m.t_a().data().end());
      params.insert(params.end(), m.t_b().data().begin(), m.t_b().data().end());
      return {spec.machine_class, index, std::move(params), std::move(m)};
    }
    case MachineClass::hqmm_restricted: {
      const RestrictedParams p = sample_restricted_params(seed);
      return {spec.machine_class, index, {p.a, p.phi, p.theta}, restricted_hqmm(p)};
    }
  }
  throw ContractError("unknown machine class");
}

/// Computes the stationary state and the two scatter coordinates
/// (P of the single symbol B, P of the configured word).
inline ScatterRecord evaluate_machine(const SampledMachine& sampled, const Word& word,
                                      const SolverSettings& solver) {
  ScatterRecord rec;
  rec.machine_class = sampled.machine_class;
  rec.machine_index = sampled.index;
  rec.parameters = sampled.parameters;
  const Word word_b = Word::parse("B");

  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, MarkovModel>) {
          const ProbVector p_ss = mm_stationary(m);
          const HiddenMarkovModel embedded = mm_to_hmm(m);
          rec.converged = true;
          rec.iterations = 0;
          rec.p_b = hmm_word_prob(embedded, p_ss, word_b);
          rec.p_word = hmm_word_prob(embedded, p_ss, word);
        } else if constexpr (std::is_same_v<T, HiddenMarkovModel>) {
          const auto report = hmm_stationary(m, solver.tol, solver.max_iter);
          rec.converged = report.converged;
          rec.iterations = report.iterations;
          if (report.converged) {
            rec.p_b = hmm_word_prob(m, report.state, word_b);
            rec.p_word = hmm_word_prob(m, report.state, word);
          }
        } else {
          const auto report = hqmm_stationary(m, solver.tol, solver.max_iter);
          rec.converged = report.converged;
          rec.iterations = report.iterations;
          if (report.converged) {
            rec.p_b = hqmm_word_prob(m, report.state, word_b);
            rec.p_word = hqmm_word_prob(m, report.state, word);
          }
        }
      },
      sampled.machine);
  return rec;
}

// ---------------------------------------------------------------------------
// Deterministic parallel map
// ---------------------------------------------------------------------------

/// Runs fn(i) for i in [0, n) on `threads` workers with block partitioning.
/// Each index writes only its own output slot, so results are independent of
/// scheduling. The first worker exception is rethrown.
inline void parallel_for(std::size_t n, unsigned threads,
                         const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  if (threads == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  std::vector<std::thread> pool;
  pool.reserve(threads);
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t begin = n * t / threads;
    const std::size_t end = n * (t + 1) / threads;
    pool.emplace_back([&, begin, end] {
      try {
        for (std::size_t i = begin; i < end; ++i) fn(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (std::thread& worker : pool) worker.join();
  if (first_error) std::rethrow_exception(first_error);
}

// ---------------------------------------------------------------------------
// CSV emission and ingestion
// ---------------------------------------------------------------------------

namespace detail {

/// 17 significant digits: enough for exact double round trips, so reruns are
/// byte-identical.
inline std::string csv_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  return fields;
}

}  // namespace detail

inline std::vector<std::string> param_column_names(MachineClass cls, std::size_t n_states) {
  switch (cls) {
    case MachineClass::mm: return {"p", "q"};
    case MachineClass::hqmm_restricted: return {"a", "phi", "theta"};
    case MachineClass::hmm: {
      std::vector<std::string> names;
      for (const char* prefix : {"ta", "tb"})
        for (std::size_t r = 0; r < n_states; ++r)
          for (std::size_t c = 0; c < n_states; ++c)
            names.push_back(std::string(prefix) + "_" + std::to_string(r) + "_" +
                            std::to_string(c));
      return names;
    }
  }
  throw ContractError("unknown machine class");
}

/// Writes converged records only; columns are
/// class,index,p_b,p_word,converged,iterations followed by the per-class
/// parameter columns.
inline void write_scatter_csv(std::ostream& out, const EnsembleSpec& spec,
                              const std::vector<ScatterRecord>& records) {
  out << "class,index,p_b,p_word,converged,iterations";
  for (const std::string& name : param_column_names(spec.machine_class, spec.n_states))
    out << ',' << name;
  out << '\n';
  for (const ScatterRecord& rec : records) {
    if (!rec.converged) continue;
    out << to_string(rec.machine_class) << ',' << rec.machine_index << ','
        << detail::csv_double(*rec.p_b) << ',' << detail::csv_double(*rec.p_word) << ",1,"
        << rec.iterations;
    for (double v : rec.parameters) out << ',' << detail::csv_double(v);
    out << '\n';
  }
}

inline std::vector<ScatterRecord> read_scatter_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::string line;
  if (!std::getline(in, line)) throw IoError("'" + path + "' is empty");
  const std::vector<std::string> header = detail::split_csv_line(line);
  if (header.size() < 6 || header[0] != "class" || header[1] != "index" || header[2] != "p_b" ||
      header[3] != "p_word" || header[4] != "converged" || header[5] != "iterations")
    throw IoError("'" + path + "' does not look like a scatter CSV");

  std::vector<ScatterRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> fields = detail::split_csv_line(line);
    if (fields.size() < 6) throw IoError("'" + path + "' has a truncated row");
    ScatterRecord rec;
    rec.machine_class = machine_class_from_string(fields[0]);
    rec.machine_index = std::stoull(fields[1]);
    rec.p_b = std::stod(fields[2]);
    rec.p_word = std::stod(fields[3]);
    rec.converged = fields[4] == "1";
    rec.iterations = std::stoull(fields[5]);
    for (std::size_t i = 6; i < fields.size(); ++i) rec.parameters.push_back(std::stod(fields[i]));
    records.push_back(std::move(rec));
  }
  return records;
}

// ---------------------------------------------------------------------------
// Whole-experiment driver
// ---------------------------------------------------------------------------

struct ScatterResult {
  std::vector<std::vector<ScatterRecord>> per_ensemble;
  std::vector<std::string> csv_paths;
  std::string manifest_path;
};

/// Samples and evaluates every configured ensemble, writing one CSV per
/// ensemble plus a JSON manifest. Output is a pure function of the config
/// (and the optional seed-override environment variable), independent of the
/// worker count.
inline ScatterResult run_scatter(const ExperimentConfig& config, unsigned threads = 0) {
  config.validate();

  std::optional<std::uint64_t> seed_override;
  if (const char* env = std::getenv(kMasterSeedEnvVar)) {
    try {
      seed_override = std::stoull(env);
    } catch (const std::exception&) {
      throw IoError(std::string(kMasterSeedEnvVar) + " is set but not a valid unsigned integer: '" +
                    env + "'");
    }
  }

  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(config.output_path, ec);
  if (ec) throw IoError("cannot create output directory '" + config.output_path + "': " +
                        ec.message());

  // Open every output file before any sampling happens.
  ScatterResult result;
  std::vector<std::ofstream> csv_streams;
  for (std::size_t e = 0; e < config.ensembles.size(); ++e) {
    const EnsembleSpec& spec = config.ensembles[e];
    std::string name = std::to_string(e) + "_" + std::string(to_string(spec.machine_class));
    if (spec.machine_class == MachineClass::hmm) name += "_n" + std::to_string(spec.n_states);
    name += ".csv";
    const std::string path = (fs::path(config.output_path) / name).string();
    csv_streams.emplace_back(path, std::ios::trunc);
    if (!csv_streams.back()) throw IoError("cannot open '" + path + "' for writing");
    result.csv_paths.push_back(path);
  }
  const std::string manifest_path = (fs::path(config.output_path) / "manifest.json").string();
  std::ofstream manifest_stream(manifest_path, std::ios::trunc);
  if (!manifest_stream) throw IoError("cannot open '" + manifest_path + "' for writing");

  const SolverSettings solver{config.tolerance, config.max_iter};
  Json manifest_ensembles = Json::array();
  for (std::size_t e = 0; e < config.ensembles.size(); ++e) {
    EnsembleSpec spec = config.ensembles[e];
    if (seed_override) spec.master_seed = *seed_override;

    std::vector<ScatterRecord> records(spec.n_machines);
    parallel_for(spec.n_machines, threads, [&](std::size_t i) {
      records[i] = evaluate_machine(sample_machine(spec, i), config.word, solver);
    });

    write_scatter_csv(csv_streams[e], spec, records);
    csv_streams[e].close();

    std::size_t converged = 0;
    for (const ScatterRecord& rec : records)
      if (rec.converged) ++converged;

    Json entry = ensemble_to_json(spec);
    entry["csv"] = fs::path(result.csv_paths[e]).filename().string();
    entry["converged"] = converged;
    entry["non_converged"] = spec.n_machines - converged;
    entry["distribution"] = [&] {
      switch (spec.machine_class) {
        case MachineClass::mm: return "p,q ~ U(0,1) independent";
        case MachineClass::hmm:
          return "columns of T ~ flat Dirichlet; entrywise split u ~ U(0,1): t_a = u t, t_b = (1-u) t";
        case MachineClass::hqmm_restricted: return "a ~ U(0,1); phi,theta ~ U(0,2*pi)";
      }
      return "";
    }();
    manifest_ensembles.push_back(std::move(entry));
    result.per_ensemble.push_back(std::move(records));
  }

  Json manifest{{"software", Json{{"name", kProjectName}, {"version", kVersion}}},
                {"rng", Json{{"algorithm", kRngAlgorithm},
                             {"stream_assignment", "stream_index = machine index"}}},
                {"word", config.word.str()},
                {"solver", Json{{"tolerance", config.tolerance}, {"max_iter", config.max_iter}}},
                {"bins", config.bins},
                {"master_seed_override",
                 seed_override ? Json{{"used", true}, {"value", *seed_override}}
                               : Json{{"used", false}}},
                {"ensembles", std::move(manifest_ensembles)}};
  manifest_stream << manifest.dump(2) << '\n';
  manifest_stream.close();
  result.manifest_path = manifest_path;
  return result;
}

// ---------------------------------------------------------------------------
// Envelope analysis
// ---------------------------------------------------------------------------

/// Per-class, per-bin maxima of p_word over equal-width bins of p_b. Bins
/// with fewer than kLowConfidenceCount samples are flagged.
struct EnvelopeReport {
  static constexpr std::size_t kLowConfidenceCount = 50;

  struct ClassEnvelope {
    MachineClass machine_class = MachineClass::mm;
    std::vector<double> max_p_word;     // 0 where count == 0
    std::vector<std::size_t> count;
  };

  std::size_t bins = 0;
  std::vector<double> bin_centers;
  std::vector<ClassEnvelope> classes;

  const ClassEnvelope* find(MachineClass cls) const {
    for (const ClassEnvelope& c : classes)
      if (c.machine_class == cls) return &c;
    return nullptr;
  }
};

inline EnvelopeReport envelope(const std::vector<ScatterRecord>& records, std::size_t bins) {
  if (bins < 2) throw ContractError("envelope requires bins >= 2");
  bool any_converged = false;
  for (const ScatterRecord& rec : records)
    if (rec.converged) any_converged = true;
  if (!any_converged) throw ContractError("envelope requires at least one converged record");

  EnvelopeReport report;
  report.bins = bins;
  report.bin_centers.resize(bins);
  for (std::size_t b = 0; b < bins; ++b)
    report.bin_centers[b] = (static_cast<double>(b) + 0.5) / static_cast<double>(bins);

  const auto class_slot = [&](MachineClass cls) -> EnvelopeReport::ClassEnvelope& {
    for (auto& c : report.classes)
      if (c.machine_class == cls) return c;
    report.classes.push_back({cls, std::vector<double>(bins, 0.0),
                              std::vector<std::size_t>(bins, 0)});
    return report.classes.back();
  };

  for (const ScatterRecord& rec : records) {
    if (!rec.converged) continue;
    auto& slot = class_slot(rec.machine_class);
    const double p_b = *rec.p_b;
    const auto bin = std::min(bins - 1, static_cast<std::size_t>(p_b * static_cast<double>(bins)));
    slot.count[bin] += 1;
    slot.max_p_word[bin] = std::max(slot.max_p_word[bin], *rec.p_word);
  }

  std::sort(report.classes.begin(), report.classes.end(),
            [](const auto& x, const auto& y) { return x.machine_class < y.machine_class; });
  return report;
}

inline Json envelope_to_json(const EnvelopeReport& report) {
  Json classes = Json::array();
  for (const auto& c : report.classes) {
    Json max_vals = Json::array();
    Json low_confidence = Json::array();
    for (std::size_t b = 0; b < report.bins; ++b) {
      if (c.count[b] == 0)
        max_vals.push_back(nullptr);
      else
        max_vals.push_back(c.max_p_word[b]);
      low_confidence.push_back(c.count[b] < EnvelopeReport::kLowConfidenceCount);
    }
    classes.push_back(Json{{"machine_class", std::string(to_string(c.machine_class))},
                           {"max_p_word", std::move(max_vals)},
                           {"count", c.count},
                           {"low_confidence", std::move(low_confidence)}});
  }
  return Json{{"bins", report.bins}, {"bin_centers", report.bin_centers},
              {"classes", std::move(classes)}};
}

}  // namespace hqmm
