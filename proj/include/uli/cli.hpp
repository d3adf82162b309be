#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "uli/invariance.hpp"

namespace uli::cli {

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kNegative = 1;  // well-formed "no": not invariant, no undo solution
inline constexpr int kInputError = 2;
inline constexpr int kOracleMismatch = 3;
inline constexpr int kUsage = 64;
}  // namespace exit_code

struct Analysis {
  InvarianceStructure structure;
  std::size_t group_dimension = 0;
  std::size_t lie_algebra_dimension = 0;
  bool oracle_agrees() const noexcept { return group_dimension == lie_algebra_dimension; }
};

Analysis analyze(const BipartiteState& state, const StructureOptions& options);
nlohmann::json analysis_to_json(const Analysis& analysis);
std::string analysis_to_text(const Analysis& analysis);

// Runs the command line `args` (args[0] is the program name). Reports go to
// `out`, diagnostics to `err`; "-" paths use `in` / `out`.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace uli::cli
