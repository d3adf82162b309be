#pragma once

// JSON file formats.
//
//   state file:   {"d1": 2, "d2": 2, "re": [[...], ...], "im": [[...], ...]}
//   unitary file: {"n": 2, "re": [[...], ...], "im": [[...], ...]}
//   pairs file:   {"d1": .., "d2": .., "seed": .., "count": ..,
//                  "pairs": [{"u1": <unitary>, "u2": <unitary>}, ...]}
//
// Matrices are lists of rows. A flat row-major list of rows*cols numbers is
// also accepted on input. "im" may be omitted for real matrices.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "uli/bipartite.hpp"
#include "uli/invariance.hpp"

namespace uli::io {

class FormatError : public Error {
 public:
  using Error::Error;
};

nlohmann::json matrix_to_json(const ComplexMatrix& m);  // {"re": .., "im": ..}
nlohmann::json real_matrix_rows(const RealMatrix& m);
ComplexMatrix matrix_from_json(const nlohmann::json& doc, std::size_t rows, std::size_t cols);

nlohmann::json state_to_json(const BipartiteState& state);
BipartiteState state_from_json(const nlohmann::json& doc, const StateOptions& options = {});

nlohmann::json unitary_to_json(const ComplexMatrix& u);

struct LoadedUnitary {
  ComplexMatrix u;
  // max |u_lenient - u_file|; zero unless the matrix was re-unitarized.
  double correction = 0.0;
};

// Rejects matrices further than unitary_tol from unitary unless lenient, in
// which case the polar factor is returned.
LoadedUnitary unitary_from_json(const nlohmann::json& doc, bool lenient = false,
                                double unitary_tol = tolerance::kDecision);

nlohmann::json pairs_to_json(const std::vector<UnitaryPair>& pairs, std::size_t d1, std::size_t d2,
                             std::uint64_t seed);
std::vector<UnitaryPair> pairs_from_json(const nlohmann::json& doc);

// Reads a JSON document from a path; "-" reads from `stdin_stream`.
nlohmann::json read_json(const std::string& path, std::istream& stdin_stream);
// Writes doc followed by a newline; "-" writes to `stdout_stream`.
void write_json(const std::string& path, const nlohmann::json& doc, std::ostream& stdout_stream);

}  // namespace uli::io
