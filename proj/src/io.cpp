#include "uli/io.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace uli::io {

namespace {

using nlohmann::json;

std::size_t positive_dim(const json& doc, const char* key) {
  if (!doc.contains(key)) throw FormatError(std::string("missing field \"") + key + "\"");
  const json& v = doc.at(key);
  if (!v.is_number_integer() || v.get<long long>() <= 0)
    throw FormatError(std::string("field \"") + key + "\" must be a positive integer");
  return v.get<std::size_t>();
}

double number_at(const json& v, const char* field) {
  if (!v.is_number()) throw FormatError(std::string("non-numeric entry in \"") + field + "\"");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw FormatError(std::string("non-finite entry in \"") + field + "\"");
  return x;
}

RealMatrix real_part_from_json(const json& doc, const char* field, std::size_t rows, std::size_t cols) {
  const auto r = static_cast<Eigen::Index>(rows);
  const auto c = static_cast<Eigen::Index>(cols);
  RealMatrix out(r, c);
  if (!doc.is_array()) throw FormatError(std::string("field \"") + field + "\" must be an array");
  const bool flat = doc.size() == rows * cols && (doc.empty() || !doc.front().is_array());
  if (flat) {
    for (Eigen::Index i = 0; i < r; ++i)
      for (Eigen::Index j = 0; j < c; ++j)
        out(i, j) = number_at(doc[static_cast<std::size_t>(i * c + j)], field);
    return out;
  }
  if (doc.size() != rows)
    throw FormatError(std::string("field \"") + field + "\" must have " + std::to_string(rows) + " rows");
  for (Eigen::Index i = 0; i < r; ++i) {
    const json& row = doc[static_cast<std::size_t>(i)];
    if (!row.is_array() || row.size() != cols)
      throw FormatError(std::string("row ") + std::to_string(i) + " of \"" + field + "\" must have " +
                        std::to_string(cols) + " entries");
    for (Eigen::Index j = 0; j < c; ++j) out(i, j) = number_at(row[static_cast<std::size_t>(j)], field);
  }
  return out;
}

}  // namespace

json real_matrix_rows(const RealMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json matrix_to_json(const ComplexMatrix& m) {
  return json{{"re", real_matrix_rows(m.real())}, {"im", real_matrix_rows(m.imag())}};
}

ComplexMatrix matrix_from_json(const json& doc, std::size_t rows, std::size_t cols) {
  if (!doc.is_object()) throw FormatError("matrix document must be a JSON object");
  if (!doc.contains("re")) throw FormatError("missing field \"re\"");
  const RealMatrix re = real_part_from_json(doc.at("re"), "re", rows, cols);
  const RealMatrix im = doc.contains("im") ? real_part_from_json(doc.at("im"), "im", rows, cols)
                                           : RealMatrix::Zero(re.rows(), re.cols());
  ComplexMatrix out(re.rows(), re.cols());
  out.real() = re;
  out.imag() = im;
  return out;
}

json state_to_json(const BipartiteState& state) {
  json doc{{"d1", state.d1()}, {"d2", state.d2()}};
  doc.update(matrix_to_json(state.psi()));
  return doc;
}

BipartiteState state_from_json(const json& doc, const StateOptions& options) {
  if (!doc.is_object()) throw FormatError("state file must contain a JSON object");
  const std::size_t d1 = positive_dim(doc, "d1");
  const std::size_t d2 = positive_dim(doc, "d2");
  return BipartiteState(matrix_from_json(doc, d1, d2), options);
}

json unitary_to_json(const ComplexMatrix& u) {
  json doc{{"n", u.rows()}};
  doc.update(matrix_to_json(u));
  return doc;
}

LoadedUnitary unitary_from_json(const json& doc, bool lenient, double unitary_tol) {
  if (!doc.is_object()) throw FormatError("unitary file must contain a JSON object");
  const std::size_t n = positive_dim(doc, "n");
  LoadedUnitary out{matrix_from_json(doc, n, n), 0.0};
  const double defect = matkernel::unitarity_defect(out.u);
  if (defect <= unitary_tol) return out;
  if (!lenient) throw NotUnitary("matrix is not unitary: defect " + std::to_string(defect), defect);
  const ComplexMatrix fixed = matkernel::nearest_unitary(out.u);
  out.correction = matkernel::max_abs(fixed - out.u);
  out.u = fixed;
  return out;
}

json pairs_to_json(const std::vector<UnitaryPair>& pairs, std::size_t d1, std::size_t d2,
                   std::uint64_t seed) {
  json list = json::array();
  for (const UnitaryPair& p : pairs)
    list.push_back(json{{"u1", unitary_to_json(p.u1())}, {"u2", unitary_to_json(p.u2())}});
  return json{{"d1", d1}, {"d2", d2}, {"seed", seed}, {"count", pairs.size()}, {"pairs", std::move(list)}};
}

std::vector<UnitaryPair> pairs_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("pairs") || !doc.at("pairs").is_array())
    throw FormatError("pairs file must contain a \"pairs\" array");
  std::vector<UnitaryPair> out;
  for (const json& entry : doc.at("pairs")) {
    if (!entry.is_object() || !entry.contains("u1") || !entry.contains("u2"))
      throw FormatError("each pair needs \"u1\" and \"u2\"");
    out.emplace_back(unitary_from_json(entry.at("u1")).u, unitary_from_json(entry.at("u2")).u);
  }
  return out;
}

json read_json(const std::string& path, std::istream& stdin_stream) {
  try {
    if (path == "-") return json::parse(stdin_stream);
    std::ifstream file(path);
    if (!file) throw FormatError("cannot open " + path);
    return json::parse(file);
  } catch (const json::parse_error& e) {
    throw FormatError("malformed JSON in " + (path == "-" ? std::string("<stdin>") : path) + ": " + e.what());
  }
}

void write_json(const std::string& path, const json& doc, std::ostream& stdout_stream) {
  const std::string text = doc.dump(2) + "\n";
  if (path == "-") {
    stdout_stream << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw FormatError("cannot write " + path);
  file << text;
  if (!file) throw FormatError("failed writing " + path);
}

}  // namespace uli::io
