#ifndef CHEEGER_SPECTRAL_HPP
#define CHEEGER_SPECTRAL_HPP

#include <algorithm>
#include <stdexcept>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

namespace cheeger {

struct EigenDecomposition {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // orthonormal columns
};

namespace detail {

inline Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& x) {
  if (x.rows() != x.cols()) throw std::invalid_argument("matrix is not square");
  if (!x.allFinite()) throw std::domain_error("matrix has non-finite entries");
  return 0.5 * (x + x.transpose());
}

// Eigenvalues below this magnitude are treated as zero by the projections.
inline double zero_threshold(const Eigen::VectorXd& values) {
  const double scale = values.size() ? values.cwiseAbs().maxCoeff() : 0.0;
  return 1e-12 * std::max(1.0, scale);
}

}  // namespace detail

inline EigenDecomposition eigh(const Eigen::MatrixXd& x) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(detail::symmetrized(x));
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

inline Eigen::VectorXd eigvalsh(const Eigen::MatrixXd& x) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(detail::symmetrized(x), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  return solver.eigenvalues();
}

/// Projection onto the PSD cone in the Frobenius norm.
inline Eigen::MatrixXd project_psd(const Eigen::MatrixXd& x) {
  const auto eig = eigh(x);
  const double tol = detail::zero_threshold(eig.values);
  const Eigen::Index k = eig.values.size();
  Eigen::Index first = 0;
  while (first < k && eig.values(first) <= tol) ++first;
  if (first == k) return Eigen::MatrixXd::Zero(k, k);
  const Eigen::Index r = k - first;
  auto v = eig.vectors.rightCols(r);
  Eigen::MatrixXd scaled = v * eig.values.tail(r).asDiagonal();
  return scaled * v.transpose();
}

struct NegativeSpectrum {
  double negative_sum = 0.0;
  double min_eigenvalue = 0.0;
};

inline NegativeSpectrum negative_eigenvalue_sum(const Eigen::MatrixXd& x) {
  const Eigen::VectorXd values = eigvalsh(x);
  NegativeSpectrum out;
  if (values.size() == 0) return out;
  out.min_eigenvalue = values(0);
  for (Eigen::Index i = 0; i < values.size() && values(i) < 0.0; ++i) out.negative_sum += values(i);
  return out;
}

}  // namespace cheeger

#endif  // CHEEGER_SPECTRAL_HPP
