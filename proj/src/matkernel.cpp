#include "uli/matkernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace uli::matkernel {

namespace {

// Entries within this relative distance of the column maximum count as tied;
// the first of them carries the phase.
constexpr double kPhaseTieTol = 1e-10;

Complex pivot_phase(const ComplexMatrix& m, Eigen::Index col) {
  double largest = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) largest = std::max(largest, std::abs(m(i, col)));
  if (largest == 0.0) return {1.0, 0.0};
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double a = std::abs(m(i, col));
    if (a >= largest * (1.0 - kPhaseTieTol)) return m(i, col) / a;
  }
  return {1.0, 0.0};
}

bool all_finite(const ComplexMatrix& m) {
  return m.array().real().allFinite() && m.array().imag().allFinite();
}

}  // namespace

void require_valid(const ComplexMatrix& m, const char* what) {
  if (m.rows() == 0 || m.cols() == 0)
    throw DimensionMismatch(std::string(what) + " is empty");
  if (!all_finite(m)) throw NonFiniteEntry(std::string(what) + " has non-finite entries");
}

SvdResult svd(const ComplexMatrix& m) {
  require_valid(m, "svd input");
  Eigen::JacobiSVD<ComplexMatrix> solver(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  SvdResult out{solver.matrixU(), solver.singularValues(), solver.matrixV()};
  if (!all_finite(out.u) || !all_finite(out.v) || !out.sigma.allFinite())
    throw ConvergenceFailure("svd did not converge (non-finite factors)");

  const Eigen::Index k = out.sigma.size();
  for (Eigen::Index c = 0; c < out.u.cols(); ++c) {
    const Complex phase = std::conj(pivot_phase(out.u, c));
    out.u.col(c) *= phase;
    if (c < k) out.v.col(c) *= phase;
  }
  for (Eigen::Index c = k; c < out.v.cols(); ++c) out.v.col(c) *= std::conj(pivot_phase(out.v, c));
  return out;
}

RealVector singular_values(const ComplexMatrix& m) {
  require_valid(m, "svd input");
  Eigen::JacobiSVD<ComplexMatrix> solver(m);
  if (!solver.singularValues().allFinite()) throw ConvergenceFailure("svd did not converge");
  return solver.singularValues();
}

RealVector singular_values(const RealMatrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return RealVector{};
  if (!m.allFinite()) throw NonFiniteEntry("matrix has non-finite entries");
  Eigen::JacobiSVD<RealMatrix> solver(m);
  if (!solver.singularValues().allFinite()) throw ConvergenceFailure("svd did not converge");
  return solver.singularValues();
}

ComplexMatrix haar_unitary(std::size_t n, RandomSource& rng) {
  if (n == 0) throw DimensionMismatch("haar_unitary needs n >= 1");
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto dim = static_cast<Eigen::Index>(n);
  ComplexMatrix z(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      z(i, j) = Complex(re, im) / std::sqrt(2.0);
    }
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < dim; ++j) {
    const double a = std::abs(r(j, j));
    if (a > 0.0) q.col(j) *= r(j, j) / a;
  }
  return q;
}

ComplexVector haar_vector(std::size_t n, RandomSource& rng) {
  if (n == 0) throw DimensionMismatch("haar_vector needs n >= 1");
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexVector v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    v(i) = Complex(re, im);
  }
  return v / v.norm();
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b, std::size_t entry_cap) {
  const auto rows = static_cast<std::size_t>(a.rows()) * static_cast<std::size_t>(b.rows());
  const auto cols = static_cast<std::size_t>(a.cols()) * static_cast<std::size_t>(b.cols());
  if (rows != 0 && cols > entry_cap / rows)
    throw DimensionOverflow("kron result of " + std::to_string(rows) + "x" + std::to_string(cols) +
                            " exceeds the entry cap of " + std::to_string(entry_cap));
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

std::size_t real_nullspace_dimension(const RealMatrix& coeffs, double tol) {
  const RealVector s = singular_values(coeffs);
  const double sigma_max = s.size() > 0 ? s(0) : 0.0;
  const double threshold = sigma_max > 0.0 ? tol * sigma_max : tol;
  std::size_t rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > threshold) ++rank;
  return static_cast<std::size_t>(coeffs.cols()) - rank;
}

double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double unitarity_defect(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("unitarity check needs a square matrix");
  return max_abs(m.adjoint() * m - ComplexMatrix::Identity(m.rows(), m.cols()));
}

ComplexMatrix nearest_unitary(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("nearest_unitary needs a square matrix");
  const SvdResult f = svd(m);
  return f.u * f.v.adjoint();
}

ComplexMatrix direct_sum(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out = ComplexMatrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

}  // namespace uli::matkernel
