// Copyright 2026 The revquant Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// JSON interchange format.
//
//   matrix    [[re, im], ...]  row-major, flat (rows * cols pairs). Readers
//             also accept nested rows [[[re, im], ...], ...].
//   channel   {"d_in": int, "d_out": int, "kraus": [matrix, ...],
//              "trace_preserving": bool (optional, default true)}
//   ensemble  {"members": [{"p": real, "rho": matrix}, ...],
//              "labels": "computational" (optional)}
//   instance  {"channel": channel, "ensemble": ensemble}

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "revquant/channels.hpp"

namespace revquant {

using Json = nlohmann::json;

/// Malformed or unreadable input.
class InputError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline Complex parse_scalar(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw InputError("matrix entry must be [re, im] or a real number");
}

}  // namespace detail

inline Json matrix_to_json(const Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back({m(i, j).real(), m(i, j).imag()});
  }
  return out;
}

/// Reads a matrix; rows/cols of -1 mean "infer a square shape".
inline Matrix matrix_from_json(const Json& j, int rows = -1, int cols = -1) {
  if (!j.is_array() || j.empty()) throw InputError("matrix must be a non-empty array");
  const bool nested = j[0].is_array() && !j[0].empty() && j[0][0].is_array();
  std::vector<Complex> flat;
  int inferred_rows = 0;
  if (nested) {
    inferred_rows = static_cast<int>(j.size());
    for (const auto& row : j) {
      if (!row.is_array()) throw InputError("nested matrix rows must be arrays");
      for (const auto& x : row) flat.push_back(detail::parse_scalar(x));
    }
  } else {
    for (const auto& x : j) flat.push_back(detail::parse_scalar(x));
  }
  const int n = static_cast<int>(flat.size());
  if (rows < 0 || cols < 0) {
    if (nested) {
      rows = inferred_rows;
      cols = n / inferred_rows;
    } else {
      const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
      rows = cols = side;
    }
  }
  if (rows * cols != n) {
    std::ostringstream os;
    os << "matrix has " << n << " entries, expected " << rows << "x" << cols;
    throw InputError(os.str());
  }
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int k = 0; k < cols; ++k) m(i, k) = flat[static_cast<std::size_t>(i * cols + k)];
  }
  return m;
}

inline Json channel_to_json(const KrausChannel& c) {
  Json ops = Json::array();
  for (const auto& a : c.operators()) ops.push_back(matrix_to_json(a));
  return {{"d_in", c.d_in()}, {"d_out", c.d_out()}, {"kraus", ops},
          {"trace_preserving", c.trace_preserving()}};
}

inline KrausChannel channel_from_json(const Json& j) {
  try {
    const int d_in = j.at("d_in").get<int>();
    const int d_out = j.at("d_out").get<int>();
    std::vector<Matrix> ops;
    for (const auto& op : j.at("kraus")) ops.push_back(matrix_from_json(op, d_out, d_in));
    const bool tp = j.value("trace_preserving", true);
    return KrausChannel(d_in, d_out, std::move(ops), tp);
  } catch (const Json::exception& ex) {
    throw InputError(std::string("channel: ") + ex.what());
  }
}

inline Json ensemble_to_json(const Ensemble& e, bool labeled = false) {
  Json members = Json::array();
  for (const auto& m : e.members()) members.push_back({{"p", m.p}, {"rho", matrix_to_json(m.rho.matrix())}});
  Json out = {{"members", members}};
  if (labeled) out["labels"] = "computational";
  return out;
}

inline Ensemble ensemble_from_json(const Json& j) {
  try {
    std::vector<EnsembleMember> members;
    for (const auto& m : j.at("members")) {
      members.push_back({m.at("p").get<double>(), DensityMatrix(matrix_from_json(m.at("rho")))});
    }
    if (j.contains("labels") && j.at("labels") != "computational") {
      throw InputError("ensemble: only \"computational\" labels are supported");
    }
    return Ensemble(std::move(members));
  } catch (const Json::exception& ex) {
    throw InputError(std::string("ensemble: ") + ex.what());
  }
}

/// Parses a JSON file; errors carry "path:line:column".
inline Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open input file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& ex) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i + 1 < ex.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::ostringstream os;
    os << path << ":" << line << ":" << col << ": malformed JSON (" << ex.what() << ")";
    throw InputError(os.str());
  }
}

}  // namespace revquant
