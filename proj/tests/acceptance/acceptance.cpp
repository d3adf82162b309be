// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Usage: uli_acceptance [path-to-uli-binary]

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "../test_support.hpp"
#include "uli/cli.hpp"
#include "uli/invariance.hpp"
#include "uli/io.hpp"

namespace {

using namespace uli;
namespace fs = std::filesystem;
using nlohmann::json;

// Pinned thresholds.
constexpr double kInvarianceTol = 1e-10;
constexpr double kIdentityTol = 1e-12;
constexpr double kMinPairDistance = 1e-3;
constexpr double kGapFactor = 10.0;  // required gap, in units of degeneracy_tol * sigma_max

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

// A fuzzed state with a designed spectrum: `multiplicities` lists the cluster
// sizes in Schmidt order.
struct FuzzCase {
  BipartiteState state;
  std::vector<std::size_t> multiplicities;
  std::size_t rank;
};

// Distinct cluster values are drawn at least 0.05 apart in [0.15, 1], so the
// relative gaps are orders of magnitude above kGapFactor * degeneracy_tol.
FuzzCase fuzz_case(RandomSource& rng, bool nondegenerate = false, std::size_t min_dim = 2,
                   std::size_t max_dim = 6) {
  std::uniform_int_distribution<std::size_t> dim(min_dim, max_dim);
  const std::size_t d1 = dim(rng), d2 = dim(rng);
  const std::size_t rank = std::uniform_int_distribution<std::size_t>(1, std::min(d1, d2))(rng);

  std::vector<std::size_t> mults;
  for (std::size_t left = rank; left > 0;) {
    const std::size_t cap = nondegenerate ? 1 : std::min<std::size_t>(left, 3);
    const std::size_t m = std::uniform_int_distribution<std::size_t>(1, cap)(rng);
    mults.push_back(m);
    left -= m;
  }
  std::vector<double> levels;
  std::uniform_real_distribution<double> level(0.15, 1.0);
  while (levels.size() < mults.size()) {
    const double v = level(rng);
    bool far = true;
    for (double w : levels) far = far && std::abs(v - w) >= 0.05;
    if (far) levels.push_back(v);
  }
  std::sort(levels.begin(), levels.end(), std::greater<>());

  std::vector<double> sigma;
  for (std::size_t c = 0; c < mults.size(); ++c) sigma.insert(sigma.end(), mults[c], levels[c]);
  RealVector s = Eigen::Map<RealVector>(sigma.data(), static_cast<Eigen::Index>(sigma.size()));
  s /= s.norm();
  return FuzzCase{random_state_with_spectrum(s, d1, d2, rng), mults, rank};
}

bool matches_design(const InvarianceStructure& s, const FuzzCase& fc) {
  if (s.rank() != fc.rank || s.support.size() != fc.multiplicities.size()) return false;
  for (std::size_t c = 0; c < fc.multiplicities.size(); ++c)
    if (s.support[c].size != fc.multiplicities[c]) return false;
  return true;
}

// Plane rotation by `angle` between Schmidt indices i and j, in the Schmidt basis.
ComplexMatrix givens(std::size_t n, std::size_t i, std::size_t j, double angle, double phase) {
  ComplexMatrix g = ComplexMatrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  const auto a = static_cast<Eigen::Index>(i), b = static_cast<Eigen::Index>(j);
  g(a, a) = std::cos(angle);
  g(b, b) = std::cos(angle);
  g(a, b) = -std::sin(angle) * std::polar(1.0, phase);
  g(b, a) = std::sin(angle) * std::polar(1.0, -phase);
  return g;
}

std::string num(double x) {
  std::ostringstream s;
  s.precision(3);
  s << x;
  return s.str();
}

// ---------------------------------------------------------------------------

std::vector<FuzzCase> fuzz_states() {
  RandomSource rng(20240501);
  std::vector<FuzzCase> cases;
  cases.reserve(500);
  for (int i = 0; i < 500; ++i) cases.push_back(fuzz_case(rng));
  return cases;
}

Outcome soundness(const std::vector<FuzzCase>& cases) {
  Outcome o;
  RandomSource rng(1);
  double worst = 0.0;
  std::size_t pairs = 0;
  for (const FuzzCase& fc : cases) {
    const InvarianceStructure s = invariance_structure(fc.state);
    if (!matches_design(s, fc)) o.fail("clustering did not recover a designed spectrum");
    for (int k = 0; k < 4; ++k) {
      const UnitaryPair p = sample_invariant_pair(s, rng);
      const double r = is_invariant(p, fc.state, kInvarianceTol).residual;
      worst = std::max(worst, r);
      ++pairs;
      if (r > kInvarianceTol) o.fail("residual " + num(r) + " above 1e-10");
    }
  }
  if (o.pass) o.detail = std::to_string(cases.size()) + " states, " + std::to_string(pairs) +
                         " pairs, max residual " + num(worst);
  return o;
}

Outcome completeness(const std::vector<FuzzCase>& cases) {
  Outcome o;
  const auto anchor = [&o](const char* name, const BipartiteState& st, std::size_t expected) {
    const std::size_t g = group_dimension(invariance_structure(st));
    const std::size_t l = lie_algebra_dimension(st);
    if (g != expected || l != expected)
      o.fail(std::string(name) + ": group " + std::to_string(g) + ", oracle " + std::to_string(l) +
             ", expected " + std::to_string(expected));
  };
  anchor("bell", testing::bell(), 4);
  anchor("|00>", testing::basis00(), 3);
  anchor("diag(sqrt .8, sqrt .2)", testing::diag_state(0.8), 2);
  RandomSource rng(5);
  const double w[] = {std::sqrt(0.5), std::sqrt(0.3), std::sqrt(0.2)};
  anchor("rank-3 3x4", random_state_with_spectrum(Eigen::Map<const RealVector>(w, 3), 3, 4, rng), 4);

  std::size_t checked = 0;
  for (const FuzzCase& fc : cases) {
    const InvarianceStructure s = invariance_structure(fc.state);
    const double sigma_max = s.schmidt.sigma(0);
    if (!(s.spectrum.min_gap > kGapFactor * tolerance::kDegeneracy * sigma_max)) {
      o.fail("fuzz state violates the gap precondition");
      continue;
    }
    const std::size_t g = group_dimension(s);
    const std::size_t l = lie_algebra_dimension(fc.state);
    ++checked;
    if (g != l)
      o.fail("mismatch: group " + std::to_string(g) + " vs oracle " + std::to_string(l) + " on " +
             std::to_string(fc.state.d1()) + "x" + std::to_string(fc.state.d2()));
  }
  if (o.pass) o.detail = "4 anchors + " + std::to_string(checked) + " fuzzed states agree exactly";
  return o;
}

Outcome lemma1_necessity() {
  Outcome o;
  RandomSource rng(3);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const FuzzCase fc = fuzz_case(rng);
    const UnitaryPair p = sample_invariant_pair(invariance_structure(fc.state), rng);
    const CommutantCheck c = commutant_check(p, fc.state, kInvarianceTol);
    worst = std::max({worst, c.residual1, c.residual2});
    if (!c.side1 || !c.side2) o.fail("sampled invariant pair fails the commutant check");
  }

  std::size_t detected = 0;
  for (int i = 0; i < 200; ++i) {
    const FuzzCase fc = fuzz_case(rng, /*nondegenerate=*/true);
    const InvarianceStructure s = invariance_structure(fc.state);
    if (s.rank() < 2) {
      --i;
      continue;
    }
    const UnitaryPair base = sample_invariant_pair(s, rng);
    // Rotate side 1 between two distinct clusters in the Schmidt basis.
    std::uniform_int_distribution<std::size_t> pick(0, s.rank() - 1);
    std::size_t a = pick(rng), b = pick(rng);
    while (b == a) b = pick(rng);
    const double angle = std::uniform_real_distribution<double>(0.05, 1.5)(rng);
    const ComplexMatrix r1 = s.to_schmidt_basis_1(base.u1()) * givens(s.d1, a, b, angle, 0.3 * i);
    const UnitaryPair perturbed(s.to_original_basis_1(r1), base.u2());
    if (is_invariant(perturbed, fc.state, kInvarianceTol).invariant) o.fail("perturbed pair is still invariant");
    const CommutantCheck c = commutant_check(perturbed, fc.state, kInvarianceTol);
    if (c.side1 && c.side2)
      o.fail("cluster-mixing pair passes both commutant checks");
    else
      ++detected;
  }
  if (o.pass)
    o.detail = "200 invariant pairs commute (max residual " + num(worst) + "); " + std::to_string(detected) +
               "/200 mixing pairs rejected";
  return o;
}

Outcome lemma2_isotropy() {
  Outcome o;
  RandomSource rng(4);
  double worst = 0.0, weakest_failure = 1e300;
  for (std::size_t d = 2; d <= 6; ++d) {
    const auto n = static_cast<Eigen::Index>(d);
    // Sigma itself: Schmidt basis equals the computational basis.
    const BipartiteState sigma(ComplexMatrix::Identity(n, n) / std::sqrt(static_cast<double>(d)));
    for (int i = 0; i < 100; ++i) {
      const ComplexMatrix r = matkernel::haar_unitary(d, rng);
      const double res = is_invariant(UnitaryPair(r, r.conjugate()), sigma, kInvarianceTol).residual;
      worst = std::max(worst, res);
      if (res > kInvarianceTol) o.fail("(R, R*) not invariant for d=" + std::to_string(d));
    }
    for (int i = 0; i < 100; ++i) {
      const ComplexMatrix r1 = matkernel::haar_unitary(d, rng);
      const ComplexMatrix r2 = matkernel::haar_unitary(d, rng);
      if (matkernel::max_abs(r1 - r2.conjugate()) <= kMinPairDistance) {
        --i;
        continue;
      }
      const InvarianceCheck c = is_invariant(UnitaryPair(r1, r2), sigma, kInvarianceTol);
      weakest_failure = std::min(weakest_failure, c.residual);
      if (c.invariant) o.fail("independent Haar pair left the maximally entangled state invariant");
    }
  }
  if (o.pass)
    o.detail = "d=2..6: 500 (R,R*) max residual " + num(worst) + "; 500 independent pairs min residual " +
               num(weakest_failure);
  return o;
}

Outcome operator_identities() {
  Outcome o;
  RandomSource rng(5);
  double worst_local = 0.0, worst_trace = 0.0;
  std::uniform_int_distribution<std::size_t> dim(1, 6);
  for (int i = 0; i < 200; ++i) {
    const std::size_t d1 = dim(rng), d2 = dim(rng);
    const BipartiteState st = testing::random_state(d1, d2, rng);
    const bool unitary = i % 2 == 0;
    const ComplexMatrix a = unitary ? matkernel::haar_unitary(d1, rng)
                                    : testing::random_complex(static_cast<Eigen::Index>(d1), static_cast<Eigen::Index>(d1), rng);
    const ComplexMatrix b = unitary ? matkernel::haar_unitary(d2, rng)
                                    : testing::random_complex(static_cast<Eigen::Index>(d2), static_cast<Eigen::Index>(d2), rng);
    const double local =
        matkernel::max_abs(matrix_to_vec(apply_local(a, b, st)) - testing::brute_kron(a, b) * matrix_to_vec(st));
    const double trace = std::max(matkernel::max_abs(partial_trace_2(st) - testing::brute_partial_trace_2(st.psi())),
                                  matkernel::max_abs(partial_trace_1(st) - testing::brute_partial_trace_1(st.psi())));
    worst_local = std::max(worst_local, local);
    worst_trace = std::max(worst_trace, trace);
    if (local > kIdentityTol) o.fail("apply_local disagrees with the Kronecker oracle: " + num(local));
    if (trace > kIdentityTol) o.fail("partial trace disagrees with the brute-force trace: " + num(trace));
  }
  if (o.pass) o.detail = "200 cases, apply_local " + num(worst_local) + ", partial traces " + num(worst_trace);
  return o;
}

Outcome separable_case() {
  Outcome o;
  RandomSource rng(6);
  std::size_t states = 0;
  for (std::size_t d : {2u, 3u}) {
    for (int i = 0; i < 50; ++i) {
      const ComplexVector a = matkernel::haar_vector(d, rng);
      const ComplexVector b = matkernel::haar_vector(d, rng);
      const BipartiteState st(a * b.transpose());
      ++states;
      const json report = cli::analysis_to_json(cli::analyze(st, {}));
      const std::string null_term = "(" + std::to_string(d - 1) + "x" + std::to_string(d - 1) + ")";
      const json& sb = report["structure"]["schmidt_basis"];
      if (report["rank"] != 1 || report["r_counts"] != json({{"1", 1}}) ||
          report["null_dims"] != json({d - 1, d - 1}) ||
          sb["r1"] != json({"e^{i phi_1}", "V1" + null_term}) ||
          sb["r2"] != json({"e^{-i phi_1}", "V2" + null_term}) || report["oracle"] != "agree" ||
          report["group_dimension"] != 1 + 2 * (d - 1) * (d - 1))
        o.fail("unexpected separable report for d=" + std::to_string(d));

      const InvarianceStructure s = invariance_structure(st);
      const ComplexVector phi = s.subspace_basis(1, 0, 1).col(0);
      const ComplexVector theta = s.subspace_basis(2, 0, 1).col(0);
      for (int k = 0; k < 5; ++k) {
        const UnitaryPair p = sample_invariant_pair(s, rng);
        const Complex e1 = phi.dot(p.u1() * phi);  // <phi|U1|phi>
        const Complex e2 = theta.dot(p.u2() * theta);
        const double eig_err = std::max((p.u1() * phi - e1 * phi).cwiseAbs().maxCoeff(),
                                        (p.u2() * theta - e2 * theta).cwiseAbs().maxCoeff());
        if (eig_err > kInvarianceTol || std::abs(std::abs(e1) - 1.0) > kInvarianceTol ||
            std::abs(e1 * e2 - 1.0) > kInvarianceTol)
          o.fail("sampled pair is not e^{i phi} / e^{-i phi} on the Schmidt vectors");
      }
    }
  }
  if (o.pass) o.detail = std::to_string(states) + " product states (2x2, 3x3), 5 pairs each";
  return o;
}

Outcome undo_protocol() {
  Outcome o;
  RandomSource rng(7);
  for (int i = 0; i < 100; ++i) {
    const FuzzCase fc = fuzz_case(rng);
    const InvarianceStructure s = invariance_structure(fc.state);
    const UnitaryPair sampled = sample_invariant_pair(s, rng);
    const UndoOutcome out = undo_operator(sampled.u1(), fc.state);
    if (!std::holds_alternative<UnitaryPair>(out)) {
      o.fail("round trip returned NoSolution");
      continue;
    }
    if (!is_invariant(std::get<UnitaryPair>(out), fc.state, kInvarianceTol).invariant)
      o.fail("undo result fails verification");
  }
  double smallest_mass = 1e300;
  for (int i = 0; i < 100; ++i) {
    const FuzzCase fc = fuzz_case(rng, /*nondegenerate=*/true);
    const InvarianceStructure s = invariance_structure(fc.state);
    if (s.rank() < 2) {
      --i;
      continue;
    }
    std::uniform_int_distribution<std::size_t> pick(0, s.rank() - 1);
    std::size_t a = pick(rng), b = pick(rng);
    while (b == a) b = pick(rng);
    const double angle = std::uniform_real_distribution<double>(0.05, 1.5)(rng);
    const ComplexMatrix r1 = s.to_schmidt_basis_1(sample_invariant_pair(s, rng).u1()) * givens(s.d1, a, b, angle, i);
    const UndoOutcome out = undo_operator(s.to_original_basis_1(r1), fc.state);
    if (const auto* none = std::get_if<NoSolution>(&out))
      smallest_mass = std::min(smallest_mass, none->off_block_mass);
    else
      o.fail("cluster-mixing U1 was undone");
  }
  if (o.pass) o.detail = "100 round trips verified; 100 mixing U1 rejected (min off-block mass " + num(smallest_mass) + ")";
  return o;
}

// --- CLI ------------------------------------------------------------------

struct Run {
  int code;
  std::string out;
};

class CliDriver {
 public:
  explicit CliDriver(std::string binary) : binary_(std::move(binary)) {}

  Run operator()(const std::vector<std::string>& args, const fs::path& capture) const {
    if (binary_.empty()) {
      std::vector<std::string> full{"uli"};
      full.insert(full.end(), args.begin(), args.end());
      std::istringstream in;
      std::ostringstream out, err;
      const int code = cli::run(full, in, out, err);
      return {code, out.str()};
    }
    std::string cmd = quote(binary_);
    for (const std::string& a : args) cmd += " " + quote(a);
    cmd += " > " + quote(capture.string()) + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    std::ifstream f(capture);
    std::string text((std::istreambuf_iterator<char>(f)), {});
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, text};
  }

  bool external() const { return !binary_.empty(); }

 private:
  static std::string quote(const std::string& s) { return "'" + s + "'"; }
  std::string binary_;
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(f)), {});
}

Outcome cli_pipeline(const CliDriver& uli_cmd) {
  Outcome o;
  const fs::path dir = fs::temp_directory_path() / "uli_acceptance_cli";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path log = dir / "stdout.txt";
  const auto p = [&dir](const std::string& name) { return (dir / name).string(); };

  struct Golden {
    std::string name;
    std::vector<std::string> gen;
    std::string summary;
  };
  const std::vector<Golden> goldens = {
      {"bell", {"gen", "bell", "--d1", "2", "--d2", "2"}, "summary: 1 cluster x2, r2=1, null dims (0,0), dim 4, oracle: agree"},
      {"product", {"gen", "product", "--d1", "2", "--d2", "2", "--seed", "3"},
       "summary: 1 cluster x1, r1=1, null dims (1,1), dim 3, oracle: agree"},
      {"spectrum",
       {"gen", "spectrum", "--d1", "3", "--d2", "3", "--spectrum", "sqrt(0.4),sqrt(0.4),sqrt(0.2)", "--seed", "9"},
       "summary: 2 clusters x2,x1, r1=1 r2=1, null dims (0,0), dim 5, oracle: agree"},
  };

  for (const Golden& g : goldens) {
    const std::string state = p(g.name + ".json");
    std::vector<std::string> gen = g.gen;
    gen.insert(gen.end(), {"-o", state});
    if (const Run r = uli_cmd(gen, log); r.code != 0) o.fail(g.name + ": gen exited " + std::to_string(r.code));

    const Run text = uli_cmd({"analyze", state}, log);
    if (text.code != 0 || text.out.find(g.summary) == std::string::npos)
      o.fail(g.name + ": analyze report inconsistent (exit " + std::to_string(text.code) + ")");
    const Run js = uli_cmd({"analyze", state, "--format", "json"}, log);
    if (js.code != 0 || json::parse(js.out)["oracle"] != "agree") o.fail(g.name + ": json analyze failed");

    const std::string a = p(g.name + "_a.json"), b = p(g.name + "_b.json");
    for (const std::string& out : {a, b})
      if (const Run r = uli_cmd({"sample", state, "--count", "10", "--seed", "42", "-o", out}, log); r.code != 0)
        o.fail(g.name + ": sample exited " + std::to_string(r.code));
    if (slurp(a) != slurp(b) || slurp(a).empty()) o.fail(g.name + ": fixed seed did not reproduce the sample file");

    if (const Run r = uli_cmd({"verify", state, "--pairs", a}, log); r.code != 0)
      o.fail(g.name + ": verify --pairs exited " + std::to_string(r.code));

    // Every pair, split into individual unitary files, verifies on its own.
    const json pairs = json::parse(slurp(a));
    for (std::size_t i = 0; i < pairs["pairs"].size(); ++i) {
      const std::string u1 = p(g.name + "_u1.json"), u2 = p(g.name + "_u2.json");
      std::ofstream(u1) << pairs["pairs"][i]["u1"].dump();
      std::ofstream(u2) << pairs["pairs"][i]["u2"].dump();
      if (const Run r = uli_cmd({"verify", state, u1, u2}, log); r.code != 0)
        o.fail(g.name + ": verify of pair " + std::to_string(i) + " exited " + std::to_string(r.code));
    }
  }
  fs::remove_all(dir);
  if (o.pass)
    o.detail = std::string("bell, product, 3-level spectrum via ") + (uli_cmd.external() ? "uli binary" : "in-process CLI");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const CliDriver driver(argc > 1 ? argv[1] : "");
  std::vector<FuzzCase> cases;

  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"AC1 theorem soundness (500 fuzzed states, residual <= 1e-10)",
       [&] {
         cases = fuzz_states();
         return soundness(cases);
       }},
      {"AC2 completeness at identity (Lie-algebra oracle == group dimension)", [&] { return completeness(cases); }},
      {"AC3 commutant necessity (200 invariant, 200 cluster-mixing pairs)", lemma1_necessity},
      {"AC4 maximally entangled isotropy and its converse (d=2..6)", lemma2_isotropy},
      {"AC5 local action and partial trace identities (200 cases, 1e-12)", operator_identities},
      {"AC6 separable states: phase (+) null unitary structure", separable_case},
      {"AC7 undo protocol (100 round trips, 100 NoSolution)", undo_protocol},
      {"AC8 CLI gen -> analyze -> sample -> verify, deterministic samples", [&] { return cli_pipeline(driver); }},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (o.pass ? "PASS " : "FAIL ") << c.name << " -- " << o.detail << " [" << num(secs) << " s]"
              << std::endl;
    if (!o.pass) ++failures;
  }
  std::cout << (failures == 0 ? "all acceptance criteria passed" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
