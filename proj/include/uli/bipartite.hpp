#pragma once

// Bipartite pure states as coefficient matrices.
//
// A state sum_ij psi_ij |i>_1 (x) |j>_2 is stored as the d1 x d2 matrix Psi.
// The amplitude vector is ordered with the subsystem-1 index major, so that
// (A (x) B) vec(Psi) = vec(A Psi B^T) with the standard Kronecker product.

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "uli/matkernel.hpp"

namespace uli {

inline constexpr double kDefaultNormTol = 1e-10;
inline constexpr double kDefaultRankTol = 1e-10;

struct StateOptions {
  double norm_tol = kDefaultNormTol;
  // Rescale to unit norm instead of rejecting; the input norm is kept.
  bool normalize = false;
};

class BipartiteState {
 public:
  // Throws DimensionMismatch, NonFiniteEntry, NotNormalized.
  explicit BipartiteState(ComplexMatrix psi, const StateOptions& options = {});

  const ComplexMatrix& psi() const noexcept { return psi_; }
  std::size_t d1() const noexcept { return static_cast<std::size_t>(psi_.rows()); }
  std::size_t d2() const noexcept { return static_cast<std::size_t>(psi_.cols()); }

  // Norm of the matrix handed to the constructor (1 unless normalize rescaled it).
  double original_norm() const noexcept { return original_norm_; }

 private:
  ComplexMatrix psi_;
  double original_norm_;
};

struct SchmidtForm {
  ComplexMatrix s1;  // d1 x d1 unitary; rows are the Schmidt vectors of side 1
  ComplexMatrix s2;  // d2 x d2 unitary; rows are the Schmidt vectors of side 2
  RealVector sigma;  // min(d1, d2) values, descending
  std::size_t rank = 0;

  // Rectangular diagonal d1 x d2 matrix of sigma.
  ComplexMatrix sigma_matrix() const;
  // s1^T * Sigma * s2
  ComplexMatrix reconstruct() const;
};

struct Cluster {
  double value = 0.0;  // mean of the member singular values
  std::size_t multiplicity = 0;
  std::size_t offset = 0;  // index of the first member in the sorted spectrum
};

struct DegeneracySpectrum {
  std::vector<Cluster> clusters;  // strictly decreasing values
  std::map<std::size_t, std::size_t> r_counts;  // k -> number of clusters of size k
  std::size_t rank = 0;
  std::size_t null_dim1 = 0;
  std::size_t null_dim2 = 0;
  // Smallest distance between adjacent cluster values, including the distance
  // from the smallest cluster to zero. Infinity when there are no clusters.
  double min_gap = 0.0;
};

// Amplitude vector -> state. Throws DimensionMismatch, NotNormalized.
BipartiteState vec_to_matrix(const ComplexVector& amplitudes, std::size_t d1, std::size_t d2,
                             const StateOptions& options = {});

ComplexVector matrix_to_vec(const ComplexMatrix& psi);
inline ComplexVector matrix_to_vec(const BipartiteState& state) {
  return matrix_to_vec(state.psi());
}

// A * Psi * B^T; normalized when a and b are unitary.
ComplexMatrix apply_local(const ComplexMatrix& a, const ComplexMatrix& b, const ComplexMatrix& psi);
inline ComplexMatrix apply_local(const ComplexMatrix& a, const ComplexMatrix& b,
                                 const BipartiteState& state) {
  return apply_local(a, b, state.psi());
}

// Tr[A^dagger B]
Complex hs_inner(const ComplexMatrix& a, const ComplexMatrix& b);

// Reduced state of subsystem 1: Psi Psi^dagger (d1 x d1).
ComplexMatrix partial_trace_2(const BipartiteState& state);
// Reduced state of subsystem 2: Psi^T Psi^* (d2 x d2).
ComplexMatrix partial_trace_1(const BipartiteState& state);

// Psi = S1^T Sigma S2 with S1 = U^T, S2 = V^dagger from the raw SVD.
// rank counts singular values above rank_tol * sigma_max.
SchmidtForm schmidt_decompose(const BipartiteState& state, double rank_tol = kDefaultRankTol);

// Groups a descending spectrum into clusters of numerically equal values.
// Values <= rank_tol * sigma_max belong to the null space. Adjacent surviving
// values share a cluster iff their gap is <= degeneracy_tol * sigma_max.
// d1/d2 default to sigma.size() and only affect the null dimensions.
// Throws NotSorted for increasing entries, BadSpectrum for negative ones.
DegeneracySpectrum cluster_spectrum(const RealVector& sigma, double rank_tol = kDefaultRankTol,
                                    double degeneracy_tol = tolerance::kDegeneracy,
                                    std::optional<std::size_t> d1 = std::nullopt,
                                    std::optional<std::size_t> d2 = std::nullopt);

// Psi = S1^T Sigma S2 with Haar-random S1, S2 and Sigma built from sigma
// (sorted descending, zero padded). Throws BadSpectrum.
BipartiteState random_state_with_spectrum(const RealVector& sigma, std::size_t d1, std::size_t d2,
                                          RandomSource& rng, double norm_tol = kDefaultNormTol);

}  // namespace uli
