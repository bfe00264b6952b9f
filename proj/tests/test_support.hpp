#ifndef CHEEGER_TEST_SUPPORT_HPP
#define CHEEGER_TEST_SUPPORT_HPP

#include <random>
#include <vector>

#include <Eigen/Core>

#include "cheeger/model.hpp"

namespace cheeger::fixtures {

/// Lifted matrix rho * (x; 1)(x; 1)^T of the point encoding vertex set S,
/// where x = (chi_S, e - chi_S, floor(n/2) - |S|, |S| - 1) and rho = 1/|S|.
inline Eigen::MatrixXd binary_lift(int n, const std::vector<int>& subset) {
  const BlockIndex ix{n};
  Eigen::VectorXd v = Eigen::VectorXd::Zero(ix.dim());
  for (int i = 0; i < n; ++i) v(ix.z(i)) = 1.0;
  for (int i : subset) {
    v(ix.x(i)) = 1.0;
    v(ix.z(i)) = 0.0;
  }
  const double size = static_cast<double>(subset.size());
  v(ix.s()) = n / 2 - size;
  v(ix.t()) = size - 1.0;
  v(ix.rho()) = 1.0;
  return (v * v.transpose()) / size;
}

inline Eigen::MatrixXd random_symmetric(int k, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> dist(0.0, scale);
  Eigen::MatrixXd a(k, k);
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < k; ++i) a(i, j) = dist(rng);
  return 0.5 * (a + a.transpose());
}

inline Eigen::MatrixXd random_psd(int k, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Eigen::MatrixXd a(k, k);
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < k; ++i) a(i, j) = dist(rng);
  return a * a.transpose() / k;
}

}  // namespace cheeger::fixtures

#endif  // CHEEGER_TEST_SUPPORT_HPP
