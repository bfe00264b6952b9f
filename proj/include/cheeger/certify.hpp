#ifndef CHEEGER_CERTIFY_HPP
#define CHEEGER_CERTIFY_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "cheeger/problem.hpp"
#include "cheeger/spectral.hpp"

namespace cheeger {

/// Safe lower bound from an approximate dual point (nu, mu >= 0, S >= 0):
///
///   p* >= b^T nu + r_bar * sum of the negative eigenvalues of W Zt W^T,
///   Zt = W^T (C - A^T nu + B^T mu - S) W,
///
/// valid whenever r_bar bounds lambda_max of an optimal W R W^T. Floating
/// point eigenvalues are trusted as computed.
struct Certificate {
  double dual_objective = 0.0;  // b^T nu
  double correction = 0.0;      // <= 0
  double certified_lb = 0.0;
  double r_bar = 0.0;
  double lambda_min = 0.0;      // of Zt
};

class CertificateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kCertifyClipTol = 1e-12;

namespace detail {

inline void clip_or_throw(double& v, const char* what) {
  if (v >= 0.0) return;
  if (v < -kCertifyClipTol) throw CertificateError(std::string("negative ") + what + " multiplier beyond clip tolerance");
  v = 0.0;
}

}  // namespace detail

/// Certificate from the reduced residual Zt. Since W^T W = I, the nonzero
/// spectrum of W Zt W^T is the spectrum of Zt; the remaining eigenvalues are
/// exact zeros and add nothing to the negative sum.
inline Certificate certificate_from_residual(double dual_objective, const Eigen::MatrixXd& zt, double r_bar) {
  if (!(r_bar > 0.0)) throw std::invalid_argument("r_bar must be positive");
  const auto spec = negative_eigenvalue_sum(zt);
  Certificate c;
  c.dual_objective = dual_objective;
  c.correction = r_bar * spec.negative_sum;
  c.certified_lb = dual_objective + c.correction;
  c.r_bar = r_bar;
  c.lambda_min = spec.min_eigenvalue;
  return c;
}

inline Certificate certify(const ConicProblem& p, const std::vector<LinearFunctional>& ineq, const Eigen::VectorXd& nu,
                           Eigen::VectorXd mu, Eigen::MatrixXd s, double r_bar) {
  for (Eigen::Index j = 0; j < mu.size(); ++j) detail::clip_or_throw(mu(j), "inequality");
  for (Eigen::Index j = 0; j < s.cols(); ++j)
    for (Eigen::Index i = 0; i < s.rows(); ++i) detail::clip_or_throw(s(i, j), "non-negativity");
  // Zt = -W^T (A^T nu - B^T mu + S - C) W
  const Eigen::MatrixXd zt = -p.reduce(dual_operator(p, ineq, nu, mu, s));
  return certificate_from_residual(p.b.dot(nu), zt, r_bar);
}

inline Certificate certify(const ConicProblem& p, const std::vector<LinearFunctional>& ineq, const Eigen::VectorXd& nu,
                           const Eigen::VectorXd& mu, const Eigen::MatrixXd& s) {
  return certify(p, ineq, nu, mu, s, p.trace_bound);
}

}  // namespace cheeger

#endif  // CHEEGER_CERTIFY_HPP
