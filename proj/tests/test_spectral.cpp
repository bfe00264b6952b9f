#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "cheeger/spectral.hpp"
#include "test_support.hpp"

using namespace cheeger;

TEST(Eigh, Diagonal) {
  const auto e = eigh(Eigen::Vector2d(3, 1).asDiagonal().toDenseMatrix());
  EXPECT_DOUBLE_EQ(e.values(0), 1.0);
  EXPECT_DOUBLE_EQ(e.values(1), 3.0);
}

TEST(Eigh, OffDiagonal) {
  Eigen::MatrixXd x(2, 2);
  x << 0, 1, 1, 0;
  const auto e = eigh(x);
  EXPECT_NEAR(e.values(0), -1.0, 1e-15);
  EXPECT_NEAR(e.values(1), 1.0, 1e-15);
}

TEST(Eigh, Reconstruction) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::MatrixXd x = fixtures::random_symmetric(20, rng);
    const auto e = eigh(x);
    const Eigen::MatrixXd back = e.vectors * e.values.asDiagonal() * e.vectors.transpose();
    EXPECT_LE((back - x).norm(), 1e-8 * (1.0 + x.norm()));
    EXPECT_LE((e.vectors.transpose() * e.vectors - Eigen::MatrixXd::Identity(20, 20)).norm(), 1e-10);
  }
}

TEST(Eigh, RejectsNonFinite) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Identity(3, 3);
  x(1, 2) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(eigh(x), std::domain_error);
}

TEST(ProjectPsd, Diagonal) {
  const Eigen::MatrixXd x = Eigen::Vector2d(2, -3).asDiagonal();
  const Eigen::MatrixXd expected = Eigen::Vector2d(2, 0).asDiagonal();
  EXPECT_LE((project_psd(x) - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ProjectPsd, FixesPsdInput) {
  std::mt19937_64 rng(2);
  const Eigen::MatrixXd x = fixtures::random_psd(12, rng) + 0.1 * Eigen::MatrixXd::Identity(12, 12);
  EXPECT_LE((project_psd(x) - x).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(ProjectPsd, MoreauDecomposition) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd x = fixtures::random_symmetric(15, rng);
    const Eigen::MatrixXd p = project_psd(x);
    const Eigen::MatrixXd rest = x - p;
    EXPECT_GE(eigh(p).values.minCoeff(), -1e-10);
    EXPECT_LE(eigh(rest).values.maxCoeff(), 1e-10);
    EXPECT_NEAR((p.array() * rest.array()).sum(), 0.0, 1e-9);
    EXPECT_LE((project_psd(p) - p).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_GE(p.trace(), 0.0);
    EXPECT_LE(p.norm(), x.norm() + 1e-12);
  }
}

TEST(NegativeEigenvalueSum, Diagonal) {
  const auto s = negative_eigenvalue_sum(Eigen::Vector3d(1, -0.25, -0.5).asDiagonal());
  EXPECT_DOUBLE_EQ(s.negative_sum, -0.75);
  EXPECT_DOUBLE_EQ(s.min_eigenvalue, -0.5);
}

TEST(NegativeEigenvalueSum, PsdInput) {
  const auto s = negative_eigenvalue_sum(Eigen::Vector3d(1, 0.5, 2).asDiagonal());
  EXPECT_EQ(s.negative_sum, 0.0);
  EXPECT_GE(s.min_eigenvalue, 0.0);
}

TEST(NegativeEigenvalueSum, MatchesDecomposition) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::MatrixXd x = fixtures::random_symmetric(10, rng);
    const auto e = eigh(x);
    double expected = 0.0;
    for (Eigen::Index i = 0; i < e.values.size(); ++i) expected += std::min(0.0, e.values(i));
    const auto s = negative_eigenvalue_sum(x);
    EXPECT_NEAR(s.negative_sum, expected, 1e-12);
    EXPECT_NEAR(s.min_eigenvalue, e.values(0), 1e-12);
  }
}
