#pragma once

// Random inputs and brute-force oracles shared by the test suites. Nothing
// here calls into the code paths it is used to check.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "uli/bipartite.hpp"
#include "uli/matkernel.hpp"

namespace uli::testing {

inline ComplexMatrix random_complex(Eigen::Index rows, Eigen::Index cols, RandomSource& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  ComplexMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double re = dist(rng);
      const double im = dist(rng);
      m(i, j) = Complex(re, im);
    }
  return m;
}

inline BipartiteState random_state(std::size_t d1, std::size_t d2, RandomSource& rng) {
  ComplexMatrix m = random_complex(static_cast<Eigen::Index>(d1), static_cast<Eigen::Index>(d2), rng);
  m /= m.norm();
  return BipartiteState(m);
}

// Tr_2 of |psi>><<psi| by summing over the subsystem-2 index of the full
// d1*d2 projector, with the subsystem-1 index major in the amplitude vector.
inline ComplexMatrix brute_partial_trace_2(const ComplexMatrix& psi) {
  const Eigen::Index d1 = psi.rows(), d2 = psi.cols();
  ComplexVector v(d1 * d2);
  for (Eigen::Index i = 0; i < d1; ++i)
    for (Eigen::Index j = 0; j < d2; ++j) v(i * d2 + j) = psi(i, j);
  const ComplexMatrix proj = v * v.adjoint();
  ComplexMatrix out = ComplexMatrix::Zero(d1, d1);
  for (Eigen::Index i = 0; i < d1; ++i)
    for (Eigen::Index k = 0; k < d1; ++k)
      for (Eigen::Index j = 0; j < d2; ++j) out(i, k) += proj(i * d2 + j, k * d2 + j);
  return out;
}

inline ComplexMatrix brute_partial_trace_1(const ComplexMatrix& psi) {
  const Eigen::Index d1 = psi.rows(), d2 = psi.cols();
  ComplexVector v(d1 * d2);
  for (Eigen::Index i = 0; i < d1; ++i)
    for (Eigen::Index j = 0; j < d2; ++j) v(i * d2 + j) = psi(i, j);
  const ComplexMatrix proj = v * v.adjoint();
  ComplexMatrix out = ComplexMatrix::Zero(d2, d2);
  for (Eigen::Index j = 0; j < d2; ++j)
    for (Eigen::Index l = 0; l < d2; ++l)
      for (Eigen::Index i = 0; i < d1; ++i) out(j, l) += proj(i * d2 + j, i * d2 + l);
  return out;
}

// Explicit Kronecker product by index arithmetic.
inline ComplexMatrix brute_kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index k = 0; k < b.rows(); ++k)
      for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

// Squared singular values of m from the Hermitian eigenproblem of m^dagger m
// or m m^dagger (the smaller one), sorted descending.
inline std::vector<double> squared_singular_values(const ComplexMatrix& m) {
  const ComplexMatrix gram = m.rows() <= m.cols() ? ComplexMatrix(m * m.adjoint())
                                                  : ComplexMatrix(m.adjoint() * m);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(gram);
  std::vector<double> out(eig.eigenvalues().data(), eig.eigenvalues().data() + eig.eigenvalues().size());
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

inline std::vector<double> hermitian_eigenvalues(const ComplexMatrix& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(h);
  std::vector<double> out(eig.eigenvalues().data(), eig.eigenvalues().data() + eig.eigenvalues().size());
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

inline ComplexMatrix pauli_x() {
  ComplexMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

inline ComplexMatrix hadamard() {
  ComplexMatrix m(2, 2);
  m << 1.0, 1.0, 1.0, -1.0;
  return m / std::sqrt(2.0);
}

inline ComplexMatrix diag2(Complex a, Complex b) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

inline BipartiteState bell() { return BipartiteState(ComplexMatrix::Identity(2, 2) / std::sqrt(2.0)); }

inline BipartiteState basis00(std::size_t d1 = 2, std::size_t d2 = 2) {
  ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(d1), static_cast<Eigen::Index>(d2));
  m(0, 0) = 1.0;
  return BipartiteState(m);
}

inline BipartiteState diag_state(double p) {
  return BipartiteState(diag2(std::sqrt(p), std::sqrt(1.0 - p)));
}

}  // namespace uli::testing
