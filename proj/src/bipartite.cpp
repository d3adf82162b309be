#include "uli/bipartite.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace uli {

namespace {

std::string shape(Eigen::Index r, Eigen::Index c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

}  // namespace

BipartiteState::BipartiteState(ComplexMatrix psi, const StateOptions& options)
    : psi_(std::move(psi)), original_norm_(1.0) {
  matkernel::require_valid(psi_, "state");
  const double norm = psi_.norm();
  original_norm_ = norm;
  if (options.normalize) {
    if (norm == 0.0) throw NotNormalized("cannot normalize the zero state", norm);
    psi_ /= norm;
    return;
  }
  if (std::abs(norm * norm - 1.0) > options.norm_tol) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "state is not normalized: norm = " << norm;
    throw NotNormalized(msg.str(), norm);
  }
}

ComplexMatrix SchmidtForm::sigma_matrix() const {
  ComplexMatrix out = ComplexMatrix::Zero(s1.rows(), s2.rows());
  for (Eigen::Index k = 0; k < sigma.size(); ++k) out(k, k) = sigma(k);
  return out;
}

ComplexMatrix SchmidtForm::reconstruct() const {
  return s1.transpose() * sigma_matrix() * s2;
}

BipartiteState vec_to_matrix(const ComplexVector& amplitudes, std::size_t d1, std::size_t d2,
                             const StateOptions& options) {
  if (d1 == 0 || d2 == 0 || static_cast<std::size_t>(amplitudes.size()) != d1 * d2)
    throw DimensionMismatch("amplitude vector of length " + std::to_string(amplitudes.size()) +
                            " does not match " + std::to_string(d1) + "x" + std::to_string(d2));
  const auto rows = static_cast<Eigen::Index>(d1);
  const auto cols = static_cast<Eigen::Index>(d2);
  ComplexMatrix psi(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) psi(i, j) = amplitudes(i * cols + j);
  return BipartiteState(std::move(psi), options);
}

ComplexVector matrix_to_vec(const ComplexMatrix& psi) {
  ComplexVector out(psi.size());
  for (Eigen::Index i = 0; i < psi.rows(); ++i)
    for (Eigen::Index j = 0; j < psi.cols(); ++j) out(i * psi.cols() + j) = psi(i, j);
  return out;
}

ComplexMatrix apply_local(const ComplexMatrix& a, const ComplexMatrix& b, const ComplexMatrix& psi) {
  if (a.rows() != psi.rows() || a.cols() != psi.rows() || b.rows() != psi.cols() ||
      b.cols() != psi.cols())
    throw DimensionMismatch("apply_local: operators " + shape(a.rows(), a.cols()) + ", " +
                            shape(b.rows(), b.cols()) + " do not act on a " +
                            shape(psi.rows(), psi.cols()) + " state");
  return a * psi * b.transpose();
}

Complex hs_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionMismatch("hs_inner: shapes " + shape(a.rows(), a.cols()) + " and " +
                            shape(b.rows(), b.cols()) + " differ");
  return (a.adjoint() * b).trace();
}

ComplexMatrix partial_trace_2(const BipartiteState& state) {
  return state.psi() * state.psi().adjoint();
}

ComplexMatrix partial_trace_1(const BipartiteState& state) {
  return state.psi().transpose() * state.psi().conjugate();
}

SchmidtForm schmidt_decompose(const BipartiteState& state, double rank_tol) {
  matkernel::SvdResult f = matkernel::svd(state.psi());
  SchmidtForm out;
  out.s1 = f.u.transpose();
  out.s2 = f.v.adjoint();
  out.sigma = std::move(f.sigma);
  const double threshold = out.sigma.size() > 0 ? rank_tol * out.sigma(0) : 0.0;
  for (Eigen::Index k = 0; k < out.sigma.size(); ++k)
    if (out.sigma(k) > threshold) ++out.rank;
  return out;
}

DegeneracySpectrum cluster_spectrum(const RealVector& sigma, double rank_tol, double degeneracy_tol,
                                    std::optional<std::size_t> d1, std::optional<std::size_t> d2) {
  const auto n = static_cast<std::size_t>(sigma.size());
  for (Eigen::Index k = 0; k < sigma.size(); ++k) {
    if (!std::isfinite(sigma(k)) || sigma(k) < 0.0)
      throw BadSpectrum("singular values must be finite and non-negative");
    if (k > 0 && sigma(k) > sigma(k - 1))
      throw NotSorted("singular values must be sorted in descending order");
  }
  const std::size_t dim1 = d1.value_or(n);
  const std::size_t dim2 = d2.value_or(n);
  if (n > std::min(dim1, dim2))
    throw DimensionMismatch("spectrum longer than min(d1, d2)");

  DegeneracySpectrum out;
  const double sigma_max = n > 0 ? sigma(0) : 0.0;
  const double zero_cut = rank_tol * sigma_max;
  const double chain_gap = degeneracy_tol * sigma_max;
  while (out.rank < n && sigma_max > 0.0 && sigma(static_cast<Eigen::Index>(out.rank)) > zero_cut)
    ++out.rank;

  double sum = 0.0;
  for (std::size_t k = 0; k < out.rank; ++k) {
    const double value = sigma(static_cast<Eigen::Index>(k));
    const bool extends = !out.clusters.empty() &&
                         sigma(static_cast<Eigen::Index>(k - 1)) - value <= chain_gap;
    if (!extends) {
      if (!out.clusters.empty()) out.clusters.back().value = sum / static_cast<double>(out.clusters.back().multiplicity);
      out.clusters.push_back(Cluster{0.0, 0, k});
      sum = 0.0;
    }
    out.clusters.back().multiplicity += 1;
    sum += value;
  }
  if (!out.clusters.empty()) out.clusters.back().value = sum / static_cast<double>(out.clusters.back().multiplicity);

  for (const Cluster& c : out.clusters) out.r_counts[c.multiplicity] += 1;
  out.null_dim1 = dim1 - out.rank;
  out.null_dim2 = dim2 - out.rank;

  out.min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < out.clusters.size(); ++i) {
    const double below = i + 1 < out.clusters.size() ? out.clusters[i + 1].value : 0.0;
    out.min_gap = std::min(out.min_gap, out.clusters[i].value - below);
  }
  return out;
}

BipartiteState random_state_with_spectrum(const RealVector& sigma, std::size_t d1, std::size_t d2,
                                          RandomSource& rng, double norm_tol) {
  if (d1 == 0 || d2 == 0) throw DimensionMismatch("subsystem dimensions must be positive");
  if (sigma.size() == 0 || static_cast<std::size_t>(sigma.size()) > std::min(d1, d2))
    throw BadSpectrum("spectrum length must be in 1..min(d1, d2)");
  if (!sigma.allFinite() || (sigma.array() < 0.0).any())
    throw BadSpectrum("spectrum entries must be finite and non-negative");
  const double total = sigma.squaredNorm();
  if (std::abs(total - 1.0) > norm_tol)
    throw BadSpectrum("squared spectrum sums to " + std::to_string(total) + ", expected 1");

  std::vector<double> sorted(sigma.data(), sigma.data() + sigma.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  ComplexMatrix core = ComplexMatrix::Zero(static_cast<Eigen::Index>(d1), static_cast<Eigen::Index>(d2));
  for (std::size_t k = 0; k < sorted.size(); ++k)
    core(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = sorted[k];

  const ComplexMatrix s1 = matkernel::haar_unitary(d1, rng);
  const ComplexMatrix s2 = matkernel::haar_unitary(d2, rng);
  return BipartiteState(s1.transpose() * core * s2, StateOptions{norm_tol, false});
}

}  // namespace uli
