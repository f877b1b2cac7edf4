#pragma once

#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qsd/ensemble.hpp"
#include "qsd/errors.hpp"
#include "qsd/hermitian.hpp"
#include "qsd/random.hpp"

namespace qsd::io {

using nlohmann::json;

inline constexpr const char* kStateFormat = "qsd-state-v1";
inline constexpr const char* kEnsembleFormat = "qsd-ensemble-v1";
inline constexpr const char* kChannelFormat = "qsd-channel-v1";
inline constexpr double kHermitianTolerance = 1e-9;

namespace detail {

inline void expect_format(const json& j, const char* fmt) {
  if (!j.is_object() || !j.contains("format") || !j["format"].is_string() || j["format"].get<std::string>() != fmt)
    throw ParseError(std::string("expected an object with \"format\": \"") + fmt + "\"");
}

inline json matrix_part(const Matrix& m, bool imag) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t k = 0; k < m.cols(); ++k) row.push_back(imag ? m(i, k).imag() : m(i, k).real());
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix read_matrix(const json& j, std::size_t rows, std::size_t cols) {
  if (!j.contains("re") || !j.contains("im")) throw ParseError("matrix object lacks \"re\" or \"im\"");
  const json& re = j["re"];
  const json& im = j["im"];
  if (!re.is_array() || !im.is_array() || re.size() != rows || im.size() != rows)
    throw ParseError("matrix parts have the wrong number of rows");
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!re[i].is_array() || !im[i].is_array() || re[i].size() != cols || im[i].size() != cols)
      throw ParseError("matrix row " + std::to_string(i) + " has the wrong length");
    for (std::size_t k = 0; k < cols; ++k) {
      if (!re[i][k].is_number() || !im[i][k].is_number()) throw ParseError("matrix entries must be numbers");
      m(i, k) = complex(re[i][k].get<double>(), im[i][k].get<double>());
    }
  }
  return m;
}

inline std::size_t positive_size(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_integer() || j[key].get<long long>() < 1)
    throw ParseError(std::string("\"") + key + "\" must be a positive integer");
  return j[key].get<std::size_t>();
}

}  // namespace detail

inline json to_json(const HermitianOperator& a) {
  return json{{"format", kStateFormat},
              {"dim", a.dim()},
              {"re", detail::matrix_part(a.matrix(), false)},
              {"im", detail::matrix_part(a.matrix(), true)}};
}

/// Parses a qsd-state-v1 object as a Hermitian operator; rejects matrices
/// whose Hermitian defect exceeds 1e-9.
inline HermitianOperator operator_from_json(const json& j) {
  detail::expect_format(j, kStateFormat);
  const std::size_t n = detail::positive_size(j, "dim");
  Matrix m = detail::read_matrix(j, n, n);
  const double defect = m.hermitian_defect();
  if (defect > kHermitianTolerance)
    throw ParseError("matrix is not Hermitian (defect " + std::to_string(defect) + ")");
  return HermitianOperator(std::move(m));
}

/// Parses a qsd-state-v1 object and validates it as a density matrix. Failures
/// of positivity or normalization surface as DomainError.
inline DensityMatrix state_from_json(const json& j) { return DensityMatrix(operator_from_json(j)); }

inline json to_json(const Ensemble& e) {
  json states = json::array();
  for (const auto& s : e.states()) states.push_back(to_json(s.op()));
  return json{{"format", kEnsembleFormat}, {"weights", e.weights()}, {"states", std::move(states)}};
}

inline Ensemble ensemble_from_json(const json& j) {
  detail::expect_format(j, kEnsembleFormat);
  if (!j.contains("weights") || !j["weights"].is_array()) throw ParseError("\"weights\" must be an array");
  if (!j.contains("states") || !j["states"].is_array()) throw ParseError("\"states\" must be an array");
  std::vector<double> w;
  for (const auto& x : j["weights"]) {
    if (!x.is_number()) throw ParseError("weights must be numbers");
    w.push_back(x.get<double>());
  }
  std::vector<DensityMatrix> states;
  for (const auto& s : j["states"]) states.push_back(state_from_json(s));
  if (w.size() != states.size()) throw ParseError("weights and states differ in length");
  return Ensemble(std::move(w), std::move(states));
}

inline json to_json(const KrausOperators& ks) {
  json kraus = json::array();
  for (const auto& k : ks)
    kraus.push_back(json{{"re", detail::matrix_part(k, false)}, {"im", detail::matrix_part(k, true)}});
  const std::size_t din = ks.empty() ? 0 : ks.front().cols();
  return json{{"format", kChannelFormat}, {"dim_in", din}, {"dim_env", ks.size()}, {"kraus", std::move(kraus)}};
}

inline KrausOperators channel_from_json(const json& j) {
  detail::expect_format(j, kChannelFormat);
  const std::size_t din = detail::positive_size(j, "dim_in");
  const std::size_t denv = detail::positive_size(j, "dim_env");
  if (!j.contains("kraus") || !j["kraus"].is_array() || j["kraus"].size() != denv)
    throw ParseError("\"kraus\" must hold dim_env matrices");
  KrausOperators ks;
  for (const auto& k : j["kraus"]) ks.push_back(detail::read_matrix(k, din, din));
  return ks;
}

inline json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str());
}

/// Writes `j` followed by a newline; "-" writes to standard output.
inline void write_json(const json& j, const std::string& path, std::ostream& stdout_stream) {
  const std::string text = j.dump(2) + "\n";
  if (path == "-") {
    stdout_stream << text;
    stdout_stream.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace qsd::io
