#include "uli/invariance.hpp"

#include <algorithm>
#include <string>

namespace uli {

namespace {

// Anti-Hermitian basis of n x n matrices: i E_jj, then for j < k the pair
// E_jk - E_kj and i (E_jk + E_kj).
std::vector<ComplexMatrix> anti_hermitian_basis(std::size_t n) {
  const auto dim = static_cast<Eigen::Index>(n);
  const Complex i_unit(0.0, 1.0);
  std::vector<ComplexMatrix> basis;
  basis.reserve(n * n);
  for (Eigen::Index j = 0; j < dim; ++j) {
    ComplexMatrix x = ComplexMatrix::Zero(dim, dim);
    x(j, j) = i_unit;
    basis.push_back(std::move(x));
  }
  for (Eigen::Index j = 0; j < dim; ++j)
    for (Eigen::Index k = j + 1; k < dim; ++k) {
      ComplexMatrix re = ComplexMatrix::Zero(dim, dim);
      re(j, k) = 1.0;
      re(k, j) = -1.0;
      basis.push_back(std::move(re));
      ComplexMatrix im = ComplexMatrix::Zero(dim, dim);
      im(j, k) = i_unit;
      im(k, j) = i_unit;
      basis.push_back(std::move(im));
    }
  return basis;
}

void require_same_dims(const UnitaryPair& pair, const BipartiteState& state) {
  if (static_cast<std::size_t>(pair.u1().rows()) != state.d1() ||
      static_cast<std::size_t>(pair.u2().rows()) != state.d2())
    throw DimensionMismatch("unitaries of size " + std::to_string(pair.u1().rows()) + " and " +
                            std::to_string(pair.u2().rows()) + " do not act on a " +
                            std::to_string(state.d1()) + "x" + std::to_string(state.d2()) +
                            " state");
}

}  // namespace

const char* to_string(Coupling c) {
  switch (c) {
    case Coupling::Conjugate:
      return "conjugate";
    case Coupling::Independent:
      return "independent";
  }
  return "unknown";
}

UnitaryPair::UnitaryPair(ComplexMatrix u1, ComplexMatrix u2, double tol)
    : u1_(std::move(u1)), u2_(std::move(u2)) {
  matkernel::require_valid(u1_, "u1");
  matkernel::require_valid(u2_, "u2");
  if (u1_.rows() != u1_.cols() || u2_.rows() != u2_.cols())
    throw DimensionMismatch("unitary pair entries must be square");
  const double defect = std::max(matkernel::unitarity_defect(u1_), matkernel::unitarity_defect(u2_));
  if (defect > tol)
    throw NotUnitary("pair is not unitary: defect " + std::to_string(defect), defect);
}

ComplexMatrix InvarianceStructure::to_original_basis_1(const ComplexMatrix& r1) const {
  return schmidt.s1.transpose() * r1 * schmidt.s1.conjugate();
}

ComplexMatrix InvarianceStructure::to_original_basis_2(const ComplexMatrix& r2) const {
  return schmidt.s2.transpose() * r2 * schmidt.s2.conjugate();
}

ComplexMatrix InvarianceStructure::to_schmidt_basis_1(const ComplexMatrix& u1) const {
  return schmidt.s1.conjugate() * u1 * schmidt.s1.transpose();
}

ComplexMatrix InvarianceStructure::to_schmidt_basis_2(const ComplexMatrix& u2) const {
  return schmidt.s2.conjugate() * u2 * schmidt.s2.transpose();
}

ComplexMatrix InvarianceStructure::subspace_basis(int side, std::size_t offset, std::size_t size) const {
  const ComplexMatrix& s = side == 1 ? schmidt.s1 : schmidt.s2;
  if (offset + size > static_cast<std::size_t>(s.rows()))
    throw DimensionMismatch("subspace exceeds the dimension of side " + std::to_string(side));
  // Row k of S_j holds the coefficients of the k-th Schmidt vector.
  return s.middleRows(static_cast<Eigen::Index>(offset), static_cast<Eigen::Index>(size)).transpose();
}

std::size_t InvarianceStructure::block_of(std::size_t index) const {
  for (std::size_t b = 0; b < support.size(); ++b)
    if (index >= support[b].offset && index < support[b].offset + support[b].size) return b;
  return support.size();
}

UnitaryPair InvarianceStructure::assemble(const std::vector<ComplexMatrix>& support_blocks,
                                          const ComplexMatrix& v1, const ComplexMatrix& v2) const {
  if (support_blocks.size() != support.size())
    throw DimensionMismatch("expected " + std::to_string(support.size()) + " support blocks");
  const auto n1 = static_cast<Eigen::Index>(d1);
  const auto n2 = static_cast<Eigen::Index>(d2);
  const auto r = static_cast<Eigen::Index>(rank());
  if (v1.rows() != n1 - r || v1.cols() != n1 - r || v2.rows() != n2 - r || v2.cols() != n2 - r)
    throw DimensionMismatch("null blocks do not match the null dimensions");

  ComplexMatrix r1 = ComplexMatrix::Zero(n1, n1);
  ComplexMatrix r2 = ComplexMatrix::Zero(n2, n2);
  for (std::size_t b = 0; b < support.size(); ++b) {
    const auto off = static_cast<Eigen::Index>(support[b].offset);
    const auto sz = static_cast<Eigen::Index>(support[b].size);
    const ComplexMatrix& w = support_blocks[b];
    if (w.rows() != sz || w.cols() != sz)
      throw DimensionMismatch("support block " + std::to_string(b) + " must be " +
                              std::to_string(sz) + "x" + std::to_string(sz));
    r1.block(off, off, sz, sz) = w;
    r2.block(off, off, sz, sz) = w.conjugate();
  }
  r1.bottomRightCorner(n1 - r, n1 - r) = v1;
  r2.bottomRightCorner(n2 - r, n2 - r) = v2;
  return UnitaryPair(to_original_basis_1(r1), to_original_basis_2(r2));
}

InvarianceStructure invariance_structure(const BipartiteState& state, const StructureOptions& options) {
  InvarianceStructure out;
  out.d1 = state.d1();
  out.d2 = state.d2();
  out.schmidt = schmidt_decompose(state, options.rank_tol);
  out.spectrum = cluster_spectrum(out.schmidt.sigma, options.rank_tol, options.degeneracy_tol,
                                  out.d1, out.d2);
  // Clustering and the decomposition share rank_tol, so the ranks agree.
  out.schmidt.rank = out.spectrum.rank;

  for (const Cluster& c : out.spectrum.clusters)
    out.support.push_back(SupportBlock{c.offset, c.multiplicity, c.value});
  for (const auto& [size, count] : out.spectrum.r_counts)
    out.blocks.push_back(BlockClass{size, count, Coupling::Conjugate});
  out.null_blocks = NullBlocks{out.spectrum.null_dim1, out.spectrum.null_dim2, Coupling::Independent};
  return out;
}

UnitaryPair sample_invariant_pair(const InvarianceStructure& structure, RandomSource& rng) {
  std::vector<ComplexMatrix> blocks;
  blocks.reserve(structure.support.size());
  for (const SupportBlock& b : structure.support) blocks.push_back(matkernel::haar_unitary(b.size, rng));
  const auto draw_null = [&rng](std::size_t dim) {
    return dim == 0 ? ComplexMatrix(0, 0) : matkernel::haar_unitary(dim, rng);
  };
  ComplexMatrix v1 = draw_null(structure.null_blocks.dim1);
  ComplexMatrix v2 = draw_null(structure.null_blocks.dim2);
  return structure.assemble(blocks, v1, v2);
}

InvarianceCheck is_invariant(const UnitaryPair& pair, const BipartiteState& state, double tol) {
  require_same_dims(pair, state);
  const double residual = matkernel::max_abs(apply_local(pair.u1(), pair.u2(), state) - state.psi());
  return InvarianceCheck{residual <= tol, residual};
}

double kron_residual(const UnitaryPair& pair, const BipartiteState& state) {
  require_same_dims(pair, state);
  const ComplexVector v = matrix_to_vec(state);
  return matkernel::max_abs(matkernel::kron(pair.u1(), pair.u2()) * v - v);
}

CommutantCheck commutant_check(const UnitaryPair& pair, const BipartiteState& state, double tol) {
  require_same_dims(pair, state);
  const ComplexMatrix rho1 = partial_trace_2(state);
  const ComplexMatrix rho2 = partial_trace_1(state);
  CommutantCheck out;
  out.residual1 = matkernel::max_abs(pair.u1() * rho1 - rho1 * pair.u1());
  out.residual2 = matkernel::max_abs(pair.u2() * rho2 - rho2 * pair.u2());
  out.side1 = out.residual1 <= tol;
  out.side2 = out.residual2 <= tol;
  return out;
}

UndoOutcome undo_operator(const ComplexMatrix& u1, const BipartiteState& state, double tol,
                          const StructureOptions& options) {
  matkernel::require_valid(u1, "u1");
  if (u1.rows() != u1.cols() || static_cast<std::size_t>(u1.rows()) != state.d1())
    throw DimensionMismatch("u1 must be " + std::to_string(state.d1()) + "x" +
                            std::to_string(state.d1()));
  const double defect = matkernel::unitarity_defect(u1);
  if (defect > tol) throw NotUnitary("u1 is not unitary: defect " + std::to_string(defect), defect);

  const InvarianceStructure structure = invariance_structure(state, options);
  const ComplexMatrix r1 = structure.to_schmidt_basis_1(u1);

  double off_block = 0.0;
  for (Eigen::Index i = 0; i < r1.rows(); ++i)
    for (Eigen::Index j = 0; j < r1.cols(); ++j)
      if (structure.block_of(static_cast<std::size_t>(i)) != structure.block_of(static_cast<std::size_t>(j)))
        off_block = std::max(off_block, std::abs(r1(i, j)));
  if (off_block > tol) return NoSolution{off_block};

  // Each diagonal block of r1 is unitary up to the discarded off-block mass;
  // project back so the returned pair is unitary to rounding.
  std::vector<ComplexMatrix> blocks;
  blocks.reserve(structure.support.size());
  for (const SupportBlock& b : structure.support) {
    const auto off = static_cast<Eigen::Index>(b.offset);
    const auto sz = static_cast<Eigen::Index>(b.size);
    blocks.push_back(matkernel::nearest_unitary(r1.block(off, off, sz, sz)));
  }
  const auto r = static_cast<Eigen::Index>(structure.rank());
  const Eigen::Index null1 = r1.rows() - r;
  const Eigen::Index null2 = static_cast<Eigen::Index>(structure.d2) - r;
  const ComplexMatrix v1 = null1 > 0 ? matkernel::nearest_unitary(r1.bottomRightCorner(null1, null1))
                                     : ComplexMatrix(0, 0);
  const ComplexMatrix v2 = ComplexMatrix::Identity(null2, null2);

  const UnitaryPair assembled = structure.assemble(blocks, v1, v2);
  // Report the caller's u1 together with the solved u2.
  return UnitaryPair(u1, assembled.u2());
}

std::size_t group_dimension(const InvarianceStructure& structure) {
  std::size_t dim = 0;
  for (const SupportBlock& b : structure.support) dim += b.size * b.size;
  dim += structure.null_blocks.dim1 * structure.null_blocks.dim1;
  dim += structure.null_blocks.dim2 * structure.null_blocks.dim2;
  return dim;
}

RealMatrix lie_algebra_system(const BipartiteState& state) {
  const ComplexMatrix& psi = state.psi();
  const Eigen::Index cells = psi.size();
  const std::vector<ComplexMatrix> basis1 = anti_hermitian_basis(state.d1());
  const std::vector<ComplexMatrix> basis2 = anti_hermitian_basis(state.d2());

  RealMatrix system(2 * cells, static_cast<Eigen::Index>(basis1.size() + basis2.size()));
  Eigen::Index col = 0;
  const auto put = [&](const ComplexMatrix& image) {
    const ComplexVector v = matrix_to_vec(image);
    system.col(col).head(cells) = v.real();
    system.col(col).tail(cells) = v.imag();
    ++col;
  };
  for (const ComplexMatrix& x1 : basis1) put(x1 * psi);
  for (const ComplexMatrix& x2 : basis2) put(psi * x2.transpose());
  return system;
}

std::size_t lie_algebra_dimension(const BipartiteState& state, double tol) {
  return matkernel::real_nullspace_dimension(lie_algebra_system(state), tol);
}

}  // namespace uli
