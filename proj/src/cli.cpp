#include "uli/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "uli/io.hpp"

namespace uli::cli {

namespace {

using nlohmann::json;

std::string fmt(double x, int digits = 17) {
  std::ostringstream s;
  s << std::setprecision(digits) << x;
  return s.str();
}

std::string fmt(Complex z) {
  std::ostringstream s;
  s << std::setprecision(8) << '(' << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag())
    << "i)";
  return s.str();
}

std::string block_name(std::size_t size, std::size_t index) {
  switch (size) {
    case 1:
      return "e^{i phi_" + std::to_string(index) + "}";
    case 2:
      return "D_" + std::to_string(index);
    case 3:
      return "T_" + std::to_string(index);
    default:
      return "B" + std::to_string(size) + "_" + std::to_string(index);
  }
}

std::string conjugate_name(std::size_t size, std::size_t index) {
  if (size == 1) return "e^{-i phi_" + std::to_string(index) + "}";
  return block_name(size, index) + "^*";
}

// R-form terms per side, in Schmidt order.
std::vector<std::string> schmidt_terms(const InvarianceStructure& s, int side) {
  std::map<std::size_t, std::size_t> seen;
  std::vector<std::string> terms;
  for (const SupportBlock& b : s.support) {
    const std::size_t index = ++seen[b.size];
    terms.push_back(side == 1 ? block_name(b.size, index) : conjugate_name(b.size, index));
  }
  const std::size_t null_dim = side == 1 ? s.null_blocks.dim1 : s.null_blocks.dim2;
  if (null_dim > 0)
    terms.push_back("V" + std::to_string(side) + "(" + std::to_string(null_dim) + "x" +
                    std::to_string(null_dim) + ")");
  return terms;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

std::string r_counts_text(const DegeneracySpectrum& spectrum) {
  std::vector<std::string> parts;
  for (const auto& [k, count] : spectrum.r_counts)
    parts.push_back("r" + std::to_string(k) + "=" + std::to_string(count));
  return parts.empty() ? "none" : join(parts, " ");
}

std::string vector_text(const ComplexMatrix& column) {
  std::vector<std::string> parts;
  for (Eigen::Index i = 0; i < column.rows(); ++i) parts.push_back(fmt(column(i, 0)));
  return "[" + join(parts, ", ") + "]";
}

double default_tol(std::ostream& err) {
  const char* env = std::getenv("ULI_DEFAULT_TOL");
  if (env == nullptr || *env == '\0') return tolerance::kDecision;
  char* end = nullptr;
  const double value = std::strtod(env, &end);
  if (end == env || *end != '\0' || !(value > 0.0) || !std::isfinite(value)) {
    err << "warning: ignoring invalid ULI_DEFAULT_TOL=" << env << "\n";
    return tolerance::kDecision;
  }
  return value;
}

// Comma-separated list of numbers or sqrt(x) terms.
RealVector parse_spectrum(const std::string& text) {
  std::vector<double> values;
  std::stringstream stream(text);
  std::string token;
  while (std::getline(stream, token, ',')) {
    const auto first = token.find_first_not_of(" \t");
    const auto last = token.find_last_not_of(" \t");
    if (first == std::string::npos) throw BadSpectrum("empty entry in spectrum");
    token = token.substr(first, last - first + 1);
    bool root = false;
    if (token.rfind("sqrt(", 0) == 0 && token.back() == ')') {
      token = token.substr(5, token.size() - 6);
      root = true;
    }
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(token, &used);
    } catch (const std::exception&) {
      throw BadSpectrum("cannot parse spectrum entry \"" + token + "\"");
    }
    if (used != token.size()) throw BadSpectrum("cannot parse spectrum entry \"" + token + "\"");
    if (root) {
      if (value < 0.0) throw BadSpectrum("sqrt of a negative number in spectrum");
      value = std::sqrt(value);
    }
    values.push_back(value);
  }
  if (values.empty()) throw BadSpectrum("spectrum is empty");
  return Eigen::Map<RealVector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

struct StateFlags {
  std::string path;
  bool normalize = false;
  double rank_tol = kDefaultRankTol;
  double degeneracy_tol = tolerance::kDegeneracy;

  StructureOptions structure() const { return {rank_tol, degeneracy_tol}; }
};

void add_state_flags(CLI::App* cmd, StateFlags& flags, bool structure_flags = true) {
  cmd->add_option("state", flags.path, "state file (- for stdin)")->required();
  cmd->add_flag("--normalize", flags.normalize, "rescale a non-normalized state instead of rejecting it");
  if (structure_flags) {
    cmd->add_option("--rank-tol", flags.rank_tol, "relative cut below which singular values are zero")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--degeneracy-tol", flags.degeneracy_tol,
                    "relative gap below which adjacent singular values are equal")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
  }
}

BipartiteState load_state(const StateFlags& flags, std::istream& in) {
  StateOptions options;
  options.normalize = flags.normalize;
  return io::state_from_json(io::read_json(flags.path, in), options);
}

ComplexMatrix load_unitary(const std::string& path, bool lenient, std::istream& in, std::ostream& err) {
  io::LoadedUnitary loaded = io::unitary_from_json(io::read_json(path, in), lenient);
  if (loaded.correction > 0.0)
    err << "note: " << path << " re-unitarized, max entry correction " << fmt(loaded.correction, 6) << "\n";
  return std::move(loaded.u);
}

int cmd_analyze(const StateFlags& flags, const std::string& format, std::istream& in,
                std::ostream& out, std::ostream& err) {
  const BipartiteState state = load_state(flags, in);
  const Analysis analysis = analyze(state, flags.structure());
  const std::string report = format == "json" ? analysis_to_json(analysis).dump(2) + "\n"
                                              : analysis_to_text(analysis);
  if (!analysis.oracle_agrees()) {
    err << report;
    err << "error: group dimension " << analysis.group_dimension
        << " disagrees with the Lie-algebra dimension " << analysis.lie_algebra_dimension
        << " (min spectral gap " << fmt(analysis.structure.spectrum.min_gap, 6)
        << "); adjust --degeneracy-tol or --rank-tol\n";
    return exit_code::kOracleMismatch;
  }
  out << report;
  return exit_code::kOk;
}

int cmd_sample(const StateFlags& flags, std::size_t count, std::uint64_t seed, const std::string& out_path,
               std::istream& in, std::ostream& out, std::ostream& err) {
  const BipartiteState state = load_state(flags, in);
  const InvarianceStructure structure = invariance_structure(state, flags.structure());
  RandomSource rng(seed);
  std::vector<UnitaryPair> pairs;
  pairs.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    UnitaryPair pair = sample_invariant_pair(structure, rng);
    const InvarianceCheck check = is_invariant(pair, state, tolerance::kDecision);
    if (!check.invariant) {
      err << "error: sampled pair " << i << " failed re-verification, residual " << fmt(check.residual, 6)
          << "\n";
      return exit_code::kOracleMismatch;
    }
    pairs.push_back(std::move(pair));
  }
  io::write_json(out_path, io::pairs_to_json(pairs, state.d1(), state.d2(), seed), out);
  return exit_code::kOk;
}

json verify_one(const UnitaryPair& pair, const BipartiteState& state, double tol) {
  const InvarianceCheck check = is_invariant(pair, state, tol);
  const CommutantCheck comm = commutant_check(pair, state, tol);
  return json{{"invariant", check.invariant},
              {"residual", check.residual},
              {"kron_residual", kron_residual(pair, state)},
              {"commutant_residual_1", comm.residual1},
              {"commutant_residual_2", comm.residual2},
              {"commutant_1", comm.side1},
              {"commutant_2", comm.side2}};
}

void verify_text(const json& r, std::ostream& out, const std::string& indent = "") {
  const auto yes = [](bool b) { return b ? "yes" : "no"; };
  out << indent << "residual: " << fmt(r["residual"].get<double>(), 6) << "\n"
      << indent << "kron residual: " << fmt(r["kron_residual"].get<double>(), 6) << "\n"
      << indent << "commutant residual side 1: " << fmt(r["commutant_residual_1"].get<double>(), 6)
      << " (" << (r["commutant_1"].get<bool>() ? "commutes" : "does not commute") << ")\n"
      << indent << "commutant residual side 2: " << fmt(r["commutant_residual_2"].get<double>(), 6)
      << " (" << (r["commutant_2"].get<bool>() ? "commutes" : "does not commute") << ")\n"
      << indent << "invariant: " << yes(r["invariant"].get<bool>()) << "\n";
}

int cmd_verify(const StateFlags& flags, const std::string& u1_path, const std::string& u2_path,
               const std::string& pairs_path, double tol, bool lenient, const std::string& format,
               std::istream& in, std::ostream& out, std::ostream& err) {
  const BipartiteState state = load_state(flags, in);
  std::vector<UnitaryPair> pairs;
  if (!pairs_path.empty()) {
    if (!u1_path.empty() || !u2_path.empty()) {
      err << "error: give either U1 U2 or --pairs, not both\n";
      return exit_code::kUsage;
    }
    pairs = io::pairs_from_json(io::read_json(pairs_path, in));
  } else {
    if (u1_path.empty() || u2_path.empty()) {
      err << "error: verify needs U1 and U2 files or --pairs\n";
      return exit_code::kUsage;
    }
    pairs.emplace_back(load_unitary(u1_path, lenient, in, err), load_unitary(u2_path, lenient, in, err));
  }

  json results = json::array();
  bool all = true;
  for (const UnitaryPair& p : pairs) {
    json r = verify_one(p, state, tol);
    all = all && r["invariant"].get<bool>();
    results.push_back(std::move(r));
  }

  if (format == "json") {
    json doc{{"tol", tol}, {"invariant", all}};
    if (pairs_path.empty())
      doc.update(results[0]);
    else
      doc["pairs"] = results;
    out << doc.dump(2) << "\n";
  } else if (pairs_path.empty()) {
    verify_text(results[0], out);
    out << "tol: " << fmt(tol, 6) << "\n";
  } else {
    for (std::size_t i = 0; i < results.size(); ++i) {
      out << "pair " << i << ":\n";
      verify_text(results[i], out, "  ");
    }
    out << "tol: " << fmt(tol, 6) << "\nall invariant: " << (all ? "yes" : "no") << "\n";
  }
  return all ? exit_code::kOk : exit_code::kNegative;
}

int cmd_undo(const StateFlags& flags, const std::string& u1_path, const std::string& out_path, double tol,
             bool lenient, std::istream& in, std::ostream& out, std::ostream& err) {
  const BipartiteState state = load_state(flags, in);
  const ComplexMatrix u1 = load_unitary(u1_path, lenient, in, err);
  const UndoOutcome outcome = undo_operator(u1, state, tol, flags.structure());
  if (const auto* none = std::get_if<NoSolution>(&outcome)) {
    out << "no solution: U1 mixes distinct Schmidt clusters\n"
        << "off-block mass: " << fmt(none->off_block_mass, 6) << "\n"
        << "tol: " << fmt(tol, 6) << "\n";
    return exit_code::kNegative;
  }
  const auto& pair = std::get<UnitaryPair>(outcome);
  io::write_json(out_path, io::unitary_to_json(pair.u2()), out);
  if (out_path != "-") out << "residual: " << fmt(is_invariant(pair, state, tol).residual, 6) << "\n";
  return exit_code::kOk;
}

int cmd_gen(const std::string& kind, std::size_t d1, std::size_t d2, const std::string& spectrum_text,
            std::uint64_t seed, bool normalize, const std::string& out_path, std::ostream& out) {
  RandomSource rng(seed);
  const auto n1 = static_cast<Eigen::Index>(d1);
  const auto n2 = static_cast<Eigen::Index>(d2);
  std::optional<BipartiteState> state;
  if (kind == "bell") {
    const Eigen::Index r = std::min(n1, n2);
    ComplexMatrix psi = ComplexMatrix::Zero(n1, n2);
    for (Eigen::Index k = 0; k < r; ++k) psi(k, k) = 1.0 / std::sqrt(static_cast<double>(r));
    state.emplace(std::move(psi));
  } else if (kind == "product") {
    const ComplexVector a = matkernel::haar_vector(d1, rng);
    const ComplexVector b = matkernel::haar_vector(d2, rng);
    state.emplace(a * b.transpose());
  } else if (kind == "spectrum") {
    if (spectrum_text.empty()) throw BadSpectrum("kind spectrum needs --spectrum");
    RealVector sigma = parse_spectrum(spectrum_text);
    if (normalize && sigma.norm() > 0.0) sigma /= sigma.norm();
    state.emplace(random_state_with_spectrum(sigma, d1, d2, rng));
  } else {
    ComplexVector v = matkernel::haar_vector(d1 * d2, rng);
    state.emplace(vec_to_matrix(v, d1, d2));
  }
  io::write_json(out_path, io::state_to_json(*state), out);
  return exit_code::kOk;
}

}  // namespace

Analysis analyze(const BipartiteState& state, const StructureOptions& options) {
  Analysis a;
  a.structure = invariance_structure(state, options);
  a.group_dimension = group_dimension(a.structure);
  a.lie_algebra_dimension = lie_algebra_dimension(state, options.degeneracy_tol);
  return a;
}

json analysis_to_json(const Analysis& analysis) {
  const InvarianceStructure& s = analysis.structure;
  const DegeneracySpectrum& sp = s.spectrum;
  json clusters = json::array();
  for (const Cluster& c : sp.clusters)
    clusters.push_back(json{{"value", c.value}, {"multiplicity", c.multiplicity}, {"offset", c.offset}});
  json r_counts = json::object();
  for (const auto& [k, count] : sp.r_counts) r_counts[std::to_string(k)] = count;
  json blocks = json::array();
  for (const BlockClass& b : s.blocks)
    blocks.push_back(json{{"size", b.size}, {"count", b.count}, {"coupling", to_string(b.coupling)}});

  json support = json::array();
  for (const SupportBlock& b : s.support)
    support.push_back(json{{"offset", b.offset},
                           {"size", b.size},
                           {"value", b.value},
                           {"side1_basis", io::matrix_to_json(s.subspace_basis(1, b.offset, b.size))},
                           {"side2_basis", io::matrix_to_json(s.subspace_basis(2, b.offset, b.size))}});

  std::vector<double> sigma(s.schmidt.sigma.data(), s.schmidt.sigma.data() + s.schmidt.sigma.size());
  json doc{
      {"d1", s.d1},
      {"d2", s.d2},
      {"schmidt_coefficients", sigma},
      {"rank", sp.rank},
      {"clusters", clusters},
      {"r_counts", r_counts},
      {"min_gap", std::isfinite(sp.min_gap) ? json(sp.min_gap) : json(nullptr)},
      {"null_dims", {sp.null_dim1, sp.null_dim2}},
      {"structure",
       {{"schmidt_basis",
         {{"r1", schmidt_terms(s, 1)},
          {"r2", schmidt_terms(s, 2)},
          {"blocks", blocks},
          {"null_blocks",
           {{"dim1", s.null_blocks.dim1},
            {"dim2", s.null_blocks.dim2},
            {"coupling", to_string(s.null_blocks.coupling)}}}}},
        {"original_basis",
         {{"relation", "U_j = S_j^T R_j S_j^*"},
          {"s1", io::matrix_to_json(s.schmidt.s1)},
          {"s2", io::matrix_to_json(s.schmidt.s2)},
          {"support_blocks", support}}}}},
      {"group_dimension", analysis.group_dimension},
      {"lie_algebra_dimension", analysis.lie_algebra_dimension},
      {"oracle", analysis.oracle_agrees() ? "agree" : "mismatch"}};
  return doc;
}

std::string analysis_to_text(const Analysis& analysis) {
  const InvarianceStructure& s = analysis.structure;
  const DegeneracySpectrum& sp = s.spectrum;
  std::ostringstream o;
  o << "state: " << s.d1 << " x " << s.d2 << "\n";
  o << "schmidt coefficients:";
  for (Eigen::Index k = 0; k < s.schmidt.sigma.size(); ++k) o << " " << fmt(s.schmidt.sigma(k));
  o << "\nrank: " << sp.rank << "\n";
  o << "clusters: " << sp.clusters.size() << "\n";
  for (std::size_t i = 0; i < sp.clusters.size(); ++i)
    o << "  #" << i + 1 << " value " << fmt(sp.clusters[i].value) << " multiplicity "
      << sp.clusters[i].multiplicity << "\n";
  o << "r_k: " << r_counts_text(sp) << "\n";
  o << "min spectral gap: " << (std::isfinite(sp.min_gap) ? fmt(sp.min_gap, 6) : "n/a") << "\n";
  o << "null dims: (" << sp.null_dim1 << ", " << sp.null_dim2 << ")\n";

  o << "schmidt basis:\n";
  o << "  R1 = " << join(schmidt_terms(s, 1), " (+) ") << "\n";
  o << "  R2 = " << join(schmidt_terms(s, 2), " (+) ") << "\n";
  for (const BlockClass& b : s.blocks)
    o << "  " << b.count << " free " << b.size << "x" << b.size << " block(s), " << to_string(b.coupling)
      << " coupling\n";
  o << "  null blocks " << s.null_blocks.dim1 << "x" << s.null_blocks.dim1 << " / " << s.null_blocks.dim2
    << "x" << s.null_blocks.dim2 << ", " << to_string(s.null_blocks.coupling) << "\n";

  o << "original basis: U_j = S_j^T R_j S_j^*\n";
  const std::vector<std::string> names = schmidt_terms(s, 1);
  for (std::size_t b = 0; b < s.support.size(); ++b) {
    const SupportBlock& blk = s.support[b];
    const ComplexMatrix side1 = s.subspace_basis(1, blk.offset, blk.size);
    const ComplexMatrix side2 = s.subspace_basis(2, blk.offset, blk.size);
    o << "  " << names[b] << " acts on\n";
    for (Eigen::Index c = 0; c < side1.cols(); ++c) o << "    side 1: " << vector_text(side1.col(c)) << "\n";
    for (Eigen::Index c = 0; c < side2.cols(); ++c) o << "    side 2: " << vector_text(side2.col(c)) << "\n";
  }
  for (int side = 1; side <= 2; ++side) {
    const std::size_t dim = side == 1 ? s.null_blocks.dim1 : s.null_blocks.dim2;
    if (dim == 0) continue;
    const ComplexMatrix basis = s.subspace_basis(side, s.rank(), dim);
    o << "  V" << side << " acts on\n";
    for (Eigen::Index c = 0; c < basis.cols(); ++c)
      o << "    side " << side << ": " << vector_text(basis.col(c)) << "\n";
  }

  const char* verdict = analysis.oracle_agrees() ? "agree" : "mismatch";
  o << "group dimension: " << analysis.group_dimension << "\n";
  o << "lie algebra dimension: " << analysis.lie_algebra_dimension << "\n";
  o << "oracle: " << verdict << "\n";

  std::vector<std::string> mults;
  for (const Cluster& c : sp.clusters) mults.push_back("x" + std::to_string(c.multiplicity));
  o << "summary: " << sp.clusters.size() << (sp.clusters.size() == 1 ? " cluster " : " clusters ")
    << join(mults, ",") << ", " << r_counts_text(sp) << ", null dims (" << sp.null_dim1 << ","
    << sp.null_dim2 << "), dim " << analysis.group_dimension << ", oracle: " << verdict << "\n";
  return o.str();
}

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Local unitary invariance of bipartite pure states"};
  app.require_subcommand(1);

  const double env_tol = default_tol(err);
  StateFlags flags;
  std::string format = "text";
  std::string out_path = "-";
  std::string u1_path, u2_path, pairs_path;
  double tol = env_tol;
  bool lenient = false;
  std::size_t count = 0;
  std::uint64_t seed = 1;
  std::string kind;
  std::size_t d1 = 2, d2 = 2;
  std::string spectrum_text;

  auto* analyze_cmd = app.add_subcommand("analyze", "report the invariance group of a state");
  add_state_flags(analyze_cmd, flags);
  analyze_cmd->add_option("--format", format)->check(CLI::IsMember({"text", "json"}))->capture_default_str();

  auto* sample_cmd = app.add_subcommand("sample", "draw random invariant unitary pairs");
  add_state_flags(sample_cmd, flags);
  sample_cmd->add_option("--count", count, "number of pairs")->required()->check(CLI::PositiveNumber);
  sample_cmd->add_option("--seed", seed)->capture_default_str();
  sample_cmd->add_option("-o,--out", out_path, "pairs file (- for stdout)")->capture_default_str();

  auto* verify_cmd = app.add_subcommand("verify", "check whether U1 (x) U2 leaves a state invariant");
  add_state_flags(verify_cmd, flags, false);
  verify_cmd->add_option("u1", u1_path, "unitary file for subsystem 1");
  verify_cmd->add_option("u2", u2_path, "unitary file for subsystem 2");
  verify_cmd->add_option("--pairs", pairs_path, "pairs file written by sample");
  verify_cmd->add_option("--tol", tol, "max-entry residual threshold")->capture_default_str()->check(CLI::NonNegativeNumber);
  verify_cmd->add_flag("--lenient", lenient, "re-unitarize slightly non-unitary inputs");
  verify_cmd->add_option("--format", format)->check(CLI::IsMember({"text", "json"}))->capture_default_str();

  auto* undo_cmd = app.add_subcommand("undo", "find U2 that undoes U1 on a state");
  add_state_flags(undo_cmd, flags);
  undo_cmd->add_option("u1", u1_path, "unitary file for subsystem 1")->required();
  undo_cmd->add_option("-o,--out", out_path, "output unitary file (- for stdout)")->capture_default_str();
  undo_cmd->add_option("--tol", tol, "block-structure threshold")->capture_default_str()->check(CLI::NonNegativeNumber);
  undo_cmd->add_flag("--lenient", lenient, "re-unitarize a slightly non-unitary U1");

  auto* gen_cmd = app.add_subcommand("gen", "write a test state");
  gen_cmd->add_option("kind", kind, "bell, product, spectrum or haar-random")
      ->required()
      ->check(CLI::IsMember({"bell", "product", "spectrum", "haar-random"}));
  gen_cmd->add_option("--d1", d1)->capture_default_str()->check(CLI::PositiveNumber);
  gen_cmd->add_option("--d2", d2)->capture_default_str()->check(CLI::PositiveNumber);
  gen_cmd->add_option("--spectrum", spectrum_text, "Schmidt coefficients, e.g. sqrt(0.5),sqrt(0.5),0");
  gen_cmd->add_option("--seed", seed)->capture_default_str();
  gen_cmd->add_flag("--normalize", flags.normalize, "rescale the spectrum to unit norm");
  gen_cmd->add_option("-o,--out", out_path, "state file (- for stdout)")->capture_default_str();

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    return exit_code::kUsage;
  }

  try {
    if (analyze_cmd->parsed()) return cmd_analyze(flags, format, in, out, err);
    if (sample_cmd->parsed()) return cmd_sample(flags, count, seed, out_path, in, out, err);
    if (verify_cmd->parsed())
      return cmd_verify(flags, u1_path, u2_path, pairs_path, tol, lenient, format, in, out, err);
    if (undo_cmd->parsed()) return cmd_undo(flags, u1_path, out_path, tol, lenient, in, out, err);
    if (gen_cmd->parsed()) return cmd_gen(kind, d1, d2, spectrum_text, seed, flags.normalize, out_path, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::kInputError;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::kInputError;
  }
  return exit_code::kUsage;
}

}  // namespace uli::cli
