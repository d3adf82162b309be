#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "uli/bipartite.hpp"
#include "uli/cli.hpp"
#include "uli/invariance.hpp"
#include "uli/matkernel.hpp"

namespace py = pybind11;
using namespace uli;

namespace {

struct Rng {
  explicit Rng(std::uint64_t seed) : engine(seed) {}
  RandomSource engine;
};

py::tuple spectrum_clusters(const DegeneracySpectrum& sp) {
  py::list out;
  for (const Cluster& c : sp.clusters) out.append(py::make_tuple(c.value, c.multiplicity, c.offset));
  return py::tuple(out);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Local unitary invariance of bipartite pure states";

  auto base = py::register_exception<Error>(m, "UliError", PyExc_ValueError);
  py::register_exception<DimensionMismatch>(m, "DimensionMismatch", base.ptr());
  py::register_exception<DimensionOverflow>(m, "DimensionOverflow", base.ptr());
  py::register_exception<ConvergenceFailure>(m, "ConvergenceFailure", base.ptr());
  py::register_exception<NonFiniteEntry>(m, "NonFiniteEntry", base.ptr());
  py::register_exception<NotNormalized>(m, "NotNormalized", base.ptr());
  py::register_exception<NotSorted>(m, "NotSorted", base.ptr());
  py::register_exception<BadSpectrum>(m, "BadSpectrum", base.ptr());
  py::register_exception<NotUnitary>(m, "NotUnitary", base.ptr());

  py::class_<Rng>(m, "Rng", "Seeded random source (64-bit Mersenne Twister)")
      .def(py::init<std::uint64_t>(), py::arg("seed"));

  // matkernel
  m.def(
      "svd",
      [](const ComplexMatrix& a) {
        matkernel::SvdResult f = matkernel::svd(a);
        return py::make_tuple(f.u, f.sigma, f.v);
      },
      py::arg("m"), "Full SVD (u, sigma, v) with m = u @ diag(sigma) @ v^H");
  m.def(
      "haar_unitary", [](std::size_t n, Rng& rng) { return matkernel::haar_unitary(n, rng.engine); },
      py::arg("n"), py::arg("rng"));
  m.def("kron", [](const ComplexMatrix& a, const ComplexMatrix& b) { return matkernel::kron(a, b); });
  m.def("real_nullspace_dimension", &matkernel::real_nullspace_dimension, py::arg("coeffs"),
        py::arg("tol") = tolerance::kDecision);

  // bipartite
  py::class_<BipartiteState>(m, "BipartiteState")
      .def(py::init([](const ComplexMatrix& psi, bool normalize, double norm_tol) {
             return BipartiteState(psi, StateOptions{norm_tol, normalize});
           }),
           py::arg("psi"), py::arg("normalize") = false, py::arg("norm_tol") = kDefaultNormTol)
      .def_property_readonly("psi", &BipartiteState::psi)
      .def_property_readonly("d1", &BipartiteState::d1)
      .def_property_readonly("d2", &BipartiteState::d2)
      .def_property_readonly("original_norm", &BipartiteState::original_norm);

  py::class_<SchmidtForm>(m, "SchmidtForm")
      .def_readonly("s1", &SchmidtForm::s1)
      .def_readonly("s2", &SchmidtForm::s2)
      .def_readonly("sigma", &SchmidtForm::sigma)
      .def_readonly("rank", &SchmidtForm::rank)
      .def("reconstruct", &SchmidtForm::reconstruct);

  py::class_<DegeneracySpectrum>(m, "DegeneracySpectrum")
      .def_property_readonly("clusters", &spectrum_clusters)
      .def_readonly("r_counts", &DegeneracySpectrum::r_counts)
      .def_readonly("rank", &DegeneracySpectrum::rank)
      .def_property_readonly("null_dims",
                             [](const DegeneracySpectrum& s) { return py::make_tuple(s.null_dim1, s.null_dim2); })
      .def_readonly("min_gap", &DegeneracySpectrum::min_gap);

  m.def(
      "vec_to_matrix",
      [](const ComplexVector& v, std::size_t d1, std::size_t d2, bool normalize) {
        return vec_to_matrix(v, d1, d2, StateOptions{kDefaultNormTol, normalize});
      },
      py::arg("amplitudes"), py::arg("d1"), py::arg("d2"), py::arg("normalize") = false);
  m.def("matrix_to_vec", py::overload_cast<const BipartiteState&>(&matrix_to_vec));
  m.def("apply_local", py::overload_cast<const ComplexMatrix&, const ComplexMatrix&, const BipartiteState&>(&apply_local),
        py::arg("a"), py::arg("b"), py::arg("state"));
  m.def("hs_inner", &hs_inner);
  m.def("partial_trace_1", &partial_trace_1);
  m.def("partial_trace_2", &partial_trace_2);
  m.def("schmidt_decompose", &schmidt_decompose, py::arg("state"), py::arg("rank_tol") = kDefaultRankTol);
  m.def("cluster_spectrum", &cluster_spectrum, py::arg("sigma"), py::arg("rank_tol") = kDefaultRankTol,
        py::arg("degeneracy_tol") = tolerance::kDegeneracy, py::arg("d1") = py::none(), py::arg("d2") = py::none());
  m.def(
      "random_state_with_spectrum",
      [](const RealVector& sigma, std::size_t d1, std::size_t d2, Rng& rng) {
        return random_state_with_spectrum(sigma, d1, d2, rng.engine);
      },
      py::arg("sigma"), py::arg("d1"), py::arg("d2"), py::arg("rng"));

  // invariance
  py::class_<UnitaryPair>(m, "UnitaryPair")
      .def(py::init<ComplexMatrix, ComplexMatrix, double>(), py::arg("u1"), py::arg("u2"),
           py::arg("tol") = tolerance::kDecision)
      .def_property_readonly("u1", &UnitaryPair::u1)
      .def_property_readonly("u2", &UnitaryPair::u2);

  py::class_<NoSolution>(m, "NoSolution")
      .def_readonly("off_block_mass", &NoSolution::off_block_mass)
      .def("__repr__", [](const NoSolution& n) {
        std::ostringstream s;
        s << "NoSolution(off_block_mass=" << n.off_block_mass << ")";
        return s.str();
      });

  py::class_<InvarianceStructure>(m, "InvarianceStructure")
      .def_readonly("d1", &InvarianceStructure::d1)
      .def_readonly("d2", &InvarianceStructure::d2)
      .def_readonly("schmidt", &InvarianceStructure::schmidt)
      .def_readonly("spectrum", &InvarianceStructure::spectrum)
      .def_property_readonly("rank", &InvarianceStructure::rank)
      .def_property_readonly("support_blocks",
                             [](const InvarianceStructure& s) {
                               py::list out;
                               for (const SupportBlock& b : s.support) out.append(py::make_tuple(b.offset, b.size, b.value));
                               return out;
                             })
      .def_property_readonly("null_dims",
                             [](const InvarianceStructure& s) {
                               return py::make_tuple(s.null_blocks.dim1, s.null_blocks.dim2);
                             })
      .def("to_original_basis_1", &InvarianceStructure::to_original_basis_1)
      .def("to_original_basis_2", &InvarianceStructure::to_original_basis_2)
      .def("to_schmidt_basis_1", &InvarianceStructure::to_schmidt_basis_1)
      .def("to_schmidt_basis_2", &InvarianceStructure::to_schmidt_basis_2)
      .def("assemble", &InvarianceStructure::assemble, py::arg("support_blocks"), py::arg("v1"), py::arg("v2"));

  m.def(
      "invariance_structure",
      [](const BipartiteState& s, double rank_tol, double degeneracy_tol) {
        return invariance_structure(s, StructureOptions{rank_tol, degeneracy_tol});
      },
      py::arg("state"), py::arg("rank_tol") = kDefaultRankTol, py::arg("degeneracy_tol") = tolerance::kDegeneracy);
  m.def(
      "sample_invariant_pair",
      [](const InvarianceStructure& s, Rng& rng) { return sample_invariant_pair(s, rng.engine); },
      py::arg("structure"), py::arg("rng"));
  m.def(
      "is_invariant",
      [](const UnitaryPair& p, const BipartiteState& s, double tol) {
        const InvarianceCheck c = is_invariant(p, s, tol);
        return py::make_tuple(c.invariant, c.residual);
      },
      py::arg("pair"), py::arg("state"), py::arg("tol") = tolerance::kDecision);
  m.def("kron_residual", &kron_residual);
  m.def(
      "commutant_check",
      [](const UnitaryPair& p, const BipartiteState& s, double tol) {
        const CommutantCheck c = commutant_check(p, s, tol);
        return py::make_tuple(c.side1, c.side2, c.residual1, c.residual2);
      },
      py::arg("pair"), py::arg("state"), py::arg("tol") = tolerance::kDecision);
  m.def(
      "undo_operator",
      [](const ComplexMatrix& u1, const BipartiteState& s, double tol) -> py::object {
        UndoOutcome out = undo_operator(u1, s, tol);
        if (auto* p = std::get_if<UnitaryPair>(&out)) return py::cast(*p);
        return py::cast(std::get<NoSolution>(out));
      },
      py::arg("u1"), py::arg("state"), py::arg("tol") = tolerance::kDecision);
  m.def("group_dimension", &group_dimension);
  m.def("lie_algebra_dimension", &lie_algebra_dimension, py::arg("state"), py::arg("tol") = tolerance::kDegeneracy);

  // cli
  m.def(
      "analyze_json",
      [](const BipartiteState& s, double rank_tol, double degeneracy_tol) {
        return cli::analysis_to_json(cli::analyze(s, StructureOptions{rank_tol, degeneracy_tol})).dump();
      },
      py::arg("state"), py::arg("rank_tol") = kDefaultRankTol, py::arg("degeneracy_tol") = tolerance::kDegeneracy);
  m.def(
      "run_cli",
      [](std::vector<std::string> args, const std::string& stdin_text) {
        args.insert(args.begin(), "uli");
        std::istringstream in(stdin_text);
        std::ostringstream out, err;
        const int code = cli::run(args, in, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), py::arg("stdin") = "");
}
