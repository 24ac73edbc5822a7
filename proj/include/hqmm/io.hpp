#pragma once

#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hqmm/models.hpp"
#include "hqmm/sampler.hpp"
#include "hqmm/stationary.hpp"
#include "hqmm/trajectory.hpp"

namespace hqmm {

using Json = nlohmann::json;

// Conventions: complex numbers are [re, im] pairs, matrices are row-major
// nested arrays, machines are tagged by a "type" field.

inline Json complex_to_json(const Complex& z) { return Json::array({z.real(), z.imag()}); }

inline Complex complex_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2)
    throw DomainError("a complex number must be a [re, im] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline Json mat2_to_json(const Mat2& m) {
  return Json::array({Json::array({complex_to_json(m(0, 0)), complex_to_json(m(0, 1))}),
                      Json::array({complex_to_json(m(1, 0)), complex_to_json(m(1, 1))})});
}

inline Mat2 mat2_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_array() || j[0].size() != 2 ||
      !j[1].is_array() || j[1].size() != 2)
    throw DomainError("a 2x2 complex matrix must be a 2x2 nested array of [re, im] pairs");
  Mat2 m;
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < 2; ++c) m(r, c) = complex_from_json(j[r][c]);
  return m;
}

inline Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw DomainError("a matrix must be a non-empty nested array");
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) throw DomainError("a matrix must be a non-empty nested array");
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) throw DomainError("matrix rows have unequal length");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

// ---------------------------------------------------------------------------
// Machine files
// ---------------------------------------------------------------------------

inline Json machine_to_json(const MarkovModel& m) {
  return Json{{"type", "mm"}, {"p", m.p()}, {"q", m.q()}};
}

inline Json machine_to_json(const HiddenMarkovModel& m) {
  return Json{{"type", "hmm"}, {"t_a", matrix_to_json(m.t_a())}, {"t_b", matrix_to_json(m.t_b())}};
}

inline Json machine_to_json(const HqmmModel& m) {
  return Json{{"type", "hqmm"}, {"k_a", mat2_to_json(m.k_a())}, {"k_b", mat2_to_json(m.k_b())}};
}

inline Json machine_to_json(const RestrictedParams& p) {
  return Json{{"type", "hqmm_restricted"}, {"a", p.a}, {"phi", p.phi}, {"theta", p.theta}};
}

/// Parses any machine document; construction validates it.
inline Machine machine_from_json(const Json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "mm") return make_mm(j.at("p").get<double>(), j.at("q").get<double>());
  if (type == "hmm")
    return make_hmm(matrix_from_json(j.at("t_a")), matrix_from_json(j.at("t_b")));
  if (type == "hqmm") return make_hqmm(mat2_from_json(j.at("k_a")), mat2_from_json(j.at("k_b")));
  if (type == "hqmm_restricted")
    return restricted_hqmm({j.at("a").get<double>(), j.at("phi").get<double>(),
                            j.at("theta").get<double>()});
  throw DomainError("unknown machine type '" + type + "'");
}

inline Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return Json::parse(in);
}

inline Machine load_machine(const std::string& path) {
  return machine_from_json(load_json_file(path));
}

// ---------------------------------------------------------------------------
// Reports and estimates
// ---------------------------------------------------------------------------

inline Json report_to_json(const FixedPointReport<ProbVector>& r) {
  return Json{{"state", r.state.probs()},
              {"iterations", r.iterations},
              {"residual", r.residual},
              {"converged", r.converged}};
}

inline Json report_to_json(const FixedPointReport<DensityMatrix>& r) {
  return Json{{"state", mat2_to_json(r.state.matrix())},
              {"iterations", r.iterations},
              {"residual", r.residual},
              {"converged", r.converged}};
}

inline Json estimate_to_json(const EmpiricalEstimate& e) {
  return Json{{"estimate", e.estimate},
              {"count", e.count},
              {"windows", e.windows},
              {"stderr", e.std_error}};
}

}  // namespace hqmm
