#pragma once

// Dense complex linear algebra used throughout the toolkit.
//
// Matrices are Eigen dense types. Storage order is an Eigen detail; every
// place where a flat ordering matters (vec/unvec, file formats) indexes
// explicitly in row-major order.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "uli/errors.hpp"

namespace uli {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

// Caller-owned source of randomness. Every sampling routine takes one
// explicitly so that results are reproducible for a fixed seed.
using RandomSource = std::mt19937_64;

namespace tolerance {
inline constexpr double kReconstruction = 1e-12;
inline constexpr double kDecision = 1e-10;
inline constexpr double kDegeneracy = 1e-8;
}  // namespace tolerance

namespace matkernel {

struct SvdResult {
  ComplexMatrix u;  // rows x rows, unitary
  RealVector sigma;  // min(rows, cols), non-increasing
  ComplexMatrix v;  // cols x cols, unitary
};

// Throws NonFiniteEntry if m has NaN/Inf entries, DimensionMismatch if empty.
void require_valid(const ComplexMatrix& m, const char* what = "matrix");

// Full SVD m = u * diag(sigma) * v^dagger.
//
// Phase convention: every column of u is rotated so that its first entry of
// largest modulus is real and positive; the same phase is applied to the
// matching column of v so the product is unchanged. Columns of u and v beyond
// min(rows, cols) are normalized the same way independently.
SvdResult svd(const ComplexMatrix& m);

// Singular values only, descending.
RealVector singular_values(const ComplexMatrix& m);
RealVector singular_values(const RealMatrix& m);

// Haar-distributed n x n unitary: complex Ginibre matrix, Householder QR,
// then Q * diag(r_ii / |r_ii|) so the equivalent R has positive diagonal.
ComplexMatrix haar_unitary(std::size_t n, RandomSource& rng);

// Haar-random unit vector of length n.
ComplexVector haar_vector(std::size_t n, RandomSource& rng);

inline constexpr std::size_t kDefaultKronEntryCap = std::size_t{1} << 20;

// Standard Kronecker product; (a (x) b)(i*p + k, j*q + l) = a(i,j) b(k,l).
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b,
                   std::size_t entry_cap = kDefaultKronEntryCap);

// Dimension of {x : coeffs * x = 0}: cols minus the number of singular values
// above tol * sigma_max (tol absolute when sigma_max == 0).
std::size_t real_nullspace_dimension(const RealMatrix& coeffs, double tol);

// max_ij |m_ij|
double max_abs(const ComplexMatrix& m);

// max_ij |(m^dagger m - I)_ij|; throws DimensionMismatch if m is not square.
double unitarity_defect(const ComplexMatrix& m);

inline bool is_unitary(const ComplexMatrix& m, double tol = tolerance::kDecision) {
  return m.rows() == m.cols() && unitarity_defect(m) <= tol;
}

// Nearest unitary in Frobenius norm (polar factor), computed from the SVD.
ComplexMatrix nearest_unitary(const ComplexMatrix& m);

// Block-diagonal direct sum a (+) b.
ComplexMatrix direct_sum(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace matkernel
}  // namespace uli
