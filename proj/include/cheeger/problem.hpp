#ifndef CHEEGER_PROBLEM_HPP
#define CHEEGER_PROBLEM_HPP

#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "cheeger/cuts.hpp"
#include "cheeger/graph.hpp"
#include "cheeger/model.hpp"

namespace cheeger {

/// Facially reduced doubly non-negative program in the form
///
///   min <C, W R W^T>  s.t.  A(W R W^T) = b,  B(W R W^T) <= 0,
///                           W R W^T >= 0 entrywise,  R psd,
///
/// where B stacks the fixed inequality rows followed by the active cuts.
/// Both relaxations (the lifted (2n+3) model and the basic (n+1) model) are
/// instances of this.
struct ConicProblem {
  int n = 0;                // graph vertices
  Eigen::MatrixXd W;        // lifted_dim x reduced_dim, orthonormal columns
  bool identity_basis = false;
  Eigen::MatrixXd cost;     // lifted_dim x lifted_dim
  std::vector<LinearFunctional> equalities;
  Eigen::VectorXd b;
  std::vector<LinearFunctional> inequalities;  // fixed rows, "<= 0"
  int rho_index = 0;        // position of rho; Y11 occupies [0, n)
  bool supports_cuts = false;
  double trace_bound = 0.0;  // upper bound on lambda_max of any feasible W R W^T

  Eigen::Index lifted_dim() const { return W.rows(); }
  Eigen::Index reduced_dim() const { return W.cols(); }
  Eigen::Index num_equalities() const { return static_cast<Eigen::Index>(equalities.size()); }
  Eigen::Index num_fixed_inequalities() const { return static_cast<Eigen::Index>(inequalities.size()); }

  /// Y~ = W R W^T.
  Eigen::MatrixXd lift(const Eigen::MatrixXd& r) const {
    if (identity_basis) return r;
    return W * r * W.transpose();
  }

  /// W^T X W.
  Eigen::MatrixXd reduce(const Eigen::MatrixXd& x) const {
    if (identity_basis) return x;
    return W.transpose() * x * W;
  }
};

/// Largest eigenvalue bound for feasible lifted matrices: floor(n/2)^2 + n.
inline double trace_bound(int n) {
  if (n < 3) throw std::invalid_argument("n must be at least 3");
  const double k = n / 2;
  return k * k + n;
}

inline ConicProblem lifted_problem(const ModelMatrices& model) {
  ConicProblem p;
  p.n = model.n;
  p.W = model.W;
  p.cost = model.Ltilde;
  p.equalities = model.equalities;
  p.b = model.b;
  p.rho_index = model.index.rho();
  p.supports_cuts = true;
  p.trace_bound = trace_bound(model.n);
  return p;
}

/// Basic relaxation over [[Y, y], [y^T, rho]] of order n+1 with W = I:
/// e^T y = 1, diag(Y) = y, 1/k <= rho <= 1, 1 <= <E, Y> <= k (k = floor(n/2)).
/// The four two-sided bounds are homogenized with e^T y = 1 so they fit the
/// "B(Y) <= 0" form; they agree with the originals on the feasible set.
inline ConicProblem basic_problem(const Graph& g) {
  const int n = g.num_vertices();
  const int k = n / 2;
  const int rho = n;
  ConicProblem p;
  p.n = n;
  p.W = Eigen::MatrixXd::Identity(n + 1, n + 1);
  p.identity_basis = true;
  p.cost = Eigen::MatrixXd::Zero(n + 1, n + 1);
  p.cost.topLeftCorner(n, n) = laplacian(g);

  LinearFunctional sum_y;
  for (int i = 0; i < n; ++i) sum_y.add(i, rho, 1.0);
  p.equalities.push_back(sum_y);
  for (int i = 0; i < n; ++i) p.equalities.push_back(LinearFunctional{}.add(i, i, 1.0).add(i, rho, -1.0));
  p.b = Eigen::VectorXd::Zero(n + 1);
  p.b(0) = 1.0;

  auto scaled = [&](double s) {
    LinearFunctional f;
    for (int i = 0; i < n; ++i) f.add(i, rho, s);
    return f;
  };
  auto sum_entries = [&](double s, LinearFunctional f) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) f.add(i, j, s);
    return f;
  };
  // e^T y / k - rho <= 0
  p.inequalities.push_back(scaled(1.0 / k).add(rho, rho, -1.0));
  // rho - e^T y <= 0
  p.inequalities.push_back(scaled(-1.0).add(rho, rho, 1.0));
  // e^T y - <E, Y> <= 0
  p.inequalities.push_back(sum_entries(-1.0, scaled(1.0)));
  // <E, Y> - k e^T y <= 0
  p.inequalities.push_back(sum_entries(1.0, scaled(-static_cast<double>(k))));

  p.rho_index = rho;
  p.supports_cuts = false;
  // Looser than the trace (which is at most 2 here) but trivially valid.
  p.trace_bound = n + 1;
  return p;
}

/// Inequality rows of the dual: fixed rows followed by one row per cut.
inline std::vector<LinearFunctional> inequality_rows(const ConicProblem& p, const CutPool& pool) {
  std::vector<LinearFunctional> rows = p.inequalities;
  rows.reserve(rows.size() + pool.size());
  for (const auto& c : pool.cuts()) rows.push_back(c.functional(p.rho_index));
  return rows;
}

/// A^T nu - B^T mu + S - C, the lifted dual residual before reduction.
inline Eigen::MatrixXd dual_operator(const ConicProblem& p, const std::vector<LinearFunctional>& ineq,
                                     const Eigen::VectorXd& nu, const Eigen::VectorXd& mu, const Eigen::MatrixXd& s) {
  if (nu.size() != p.num_equalities()) throw std::invalid_argument("nu has wrong length");
  if (mu.size() != static_cast<Eigen::Index>(ineq.size())) throw std::invalid_argument("mu has wrong length");
  if (s.rows() != p.lifted_dim() || s.cols() != p.lifted_dim()) throw std::invalid_argument("S has wrong size");
  Eigen::MatrixXd k = s - p.cost;
  for (Eigen::Index i = 0; i < nu.size(); ++i)
    if (nu(i) != 0.0) p.equalities[i].add_adjoint(k, nu(i));
  for (Eigen::Index j = 0; j < mu.size(); ++j)
    if (mu(j) != 0.0) ineq[j].add_adjoint(k, -mu(j));
  return k;
}

}  // namespace cheeger

#endif  // CHEEGER_PROBLEM_HPP
