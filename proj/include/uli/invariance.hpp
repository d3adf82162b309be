#pragma once

// Local unitary pairs (U1, U2) with (U1 (x) U2)|Psi>> = |Psi>>, i.e.
// U1 Psi U2^T = Psi.
//
// In the Schmidt basis Psi = S1^T Sigma S2 the condition becomes
// R1 Sigma = Sigma R2^* with U_j = S_j^T R_j S_j^*. The solutions are
// block diagonal: one free unitary W per cluster of equal nonzero singular
// values, entering R1 as W and R2 as W^*, plus independent free unitaries
// V1, V2 on the two null subspaces.

#include <cstddef>
#include <variant>
#include <vector>

#include "uli/bipartite.hpp"
#include "uli/matkernel.hpp"

namespace uli {

enum class Coupling {
  Conjugate,  // side-2 block is the complex conjugate of the side-1 block
  Independent,
};

const char* to_string(Coupling c);

// One free block per degeneracy cluster, in Schmidt order.
struct SupportBlock {
  std::size_t offset = 0;
  std::size_t size = 0;
  double value = 0.0;  // the shared singular value
};

// Blocks of equal size grouped together: `count` free size x size unitaries.
struct BlockClass {
  std::size_t size = 0;
  std::size_t count = 0;
  Coupling coupling = Coupling::Conjugate;
};

struct NullBlocks {
  std::size_t dim1 = 0;
  std::size_t dim2 = 0;
  Coupling coupling = Coupling::Independent;
};

class UnitaryPair {
 public:
  // Throws DimensionMismatch, NonFiniteEntry, NotUnitary.
  UnitaryPair(ComplexMatrix u1, ComplexMatrix u2, double tol = tolerance::kDecision);

  const ComplexMatrix& u1() const noexcept { return u1_; }
  const ComplexMatrix& u2() const noexcept { return u2_; }

 private:
  ComplexMatrix u1_;
  ComplexMatrix u2_;
};

struct InvarianceStructure {
  std::size_t d1 = 0;
  std::size_t d2 = 0;
  SchmidtForm schmidt;
  DegeneracySpectrum spectrum;
  std::vector<SupportBlock> support;
  std::vector<BlockClass> blocks;  // ascending block size
  NullBlocks null_blocks;

  std::size_t rank() const noexcept { return spectrum.rank; }

  // U_j = S_j^T R_j S_j^*.
  ComplexMatrix to_original_basis_1(const ComplexMatrix& r1) const;
  ComplexMatrix to_original_basis_2(const ComplexMatrix& r2) const;
  // R_j = S_j^* U_j S_j^T.
  ComplexMatrix to_schmidt_basis_1(const ComplexMatrix& u1) const;
  ComplexMatrix to_schmidt_basis_2(const ComplexMatrix& u2) const;

  // Columns spanning Schmidt indices [offset, offset + size) of the given side
  // (1 or 2), expressed in the computational basis.
  ComplexMatrix subspace_basis(int side, std::size_t offset, std::size_t size) const;

  // Block label of Schmidt index i on side 1 or 2: the cluster index for
  // support indices, clusters.size() for the null subspace.
  std::size_t block_of(std::size_t index) const;

  // Assembles R1 = (+)_i W_i (+) V1 and R2 = (+)_i W_i^* (+) V2 in the
  // Schmidt basis and maps them to the computational basis.
  // Throws DimensionMismatch if block shapes do not match the structure.
  UnitaryPair assemble(const std::vector<ComplexMatrix>& support_blocks, const ComplexMatrix& v1,
                       const ComplexMatrix& v2) const;
};

struct StructureOptions {
  double rank_tol = kDefaultRankTol;
  double degeneracy_tol = tolerance::kDegeneracy;
};

InvarianceStructure invariance_structure(const BipartiteState& state,
                                         const StructureOptions& options = {});

// Haar-random support blocks and null blocks, drawn in Schmidt order with V1
// then V2 last.
UnitaryPair sample_invariant_pair(const InvarianceStructure& structure, RandomSource& rng);

struct InvarianceCheck {
  bool invariant = false;
  double residual = 0.0;  // max |U1 Psi U2^T - Psi|
};

InvarianceCheck is_invariant(const UnitaryPair& pair, const BipartiteState& state,
                             double tol = tolerance::kDecision);

// max |(U1 (x) U2) vec(Psi) - vec(Psi)|, computed with an explicit Kronecker product.
double kron_residual(const UnitaryPair& pair, const BipartiteState& state);

struct CommutantCheck {
  bool side1 = false;
  bool side2 = false;
  double residual1 = 0.0;  // max |[U1, rho1]|
  double residual2 = 0.0;  // max |[U2, rho2]|
};

CommutantCheck commutant_check(const UnitaryPair& pair, const BipartiteState& state,
                               double tol = tolerance::kDecision);

struct NoSolution {
  // Largest entry of S1^* U1 S1^T coupling different clusters or support and null.
  double off_block_mass = 0.0;
};

using UndoOutcome = std::variant<UnitaryPair, NoSolution>;

// Finds U2 with (U1 (x) U2)|Psi>> = |Psi>>, completing the null block with
// the identity. Throws NotUnitary if u1 is not unitary within tol.
UndoOutcome undo_operator(const ComplexMatrix& u1, const BipartiteState& state,
                          double tol = tolerance::kDecision, const StructureOptions& options = {});

// sum_i m_i^2 + (d1 - r)^2 + (d2 - r)^2
std::size_t group_dimension(const InvarianceStructure& structure);

// Nullspace dimension of the real-linear map (X1, X2) -> X1 Psi + Psi X2^T over
// anti-Hermitian X1, X2: the dimension of the stabilizer's Lie algebra.
std::size_t lie_algebra_dimension(const BipartiteState& state,
                                  double tol = tolerance::kDegeneracy);

// The real-linear system used by lie_algebra_dimension: 2*d1*d2 rows,
// d1^2 + d2^2 columns.
RealMatrix lie_algebra_system(const BipartiteState& state);

}  // namespace uli
