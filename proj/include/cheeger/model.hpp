#ifndef CHEEGER_MODEL_HPP
#define CHEEGER_MODEL_HPP

#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/QR>

#include "cheeger/graph.hpp"

namespace cheeger {

/// Linear functional Y -> sum_k coef_k * Y(row_k, col_k) on symmetric
/// matrices. As a matrix it is symmetric with coef/2 on both off-diagonal
/// positions, so <A, Y> reproduces the scalar for symmetric Y.
struct LinearFunctional {
  struct Term {
    int row;
    int col;
    double coef;
  };
  std::vector<Term> terms;

  LinearFunctional& add(int row, int col, double coef) {
    terms.push_back({row, col, coef});
    return *this;
  }

  template <typename Derived>
  double operator()(const Eigen::MatrixBase<Derived>& y) const {
    double s = 0.0;
    for (const auto& t : terms) s += t.coef * y(t.row, t.col);
    return s;
  }

  /// out += scale * A
  void add_adjoint(Eigen::MatrixXd& out, double scale) const {
    for (const auto& t : terms) {
      if (t.row == t.col) {
        out(t.row, t.row) += scale * t.coef;
      } else {
        const double half = 0.5 * scale * t.coef;
        out(t.row, t.col) += half;
        out(t.col, t.row) += half;
      }
    }
  }

  Eigen::MatrixXd dense(Eigen::Index dim) const {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
    add_adjoint(a, 1.0);
    return a;
  }
};

/// Index layout of the lifted (2n+3)-dimensional space, 0-indexed:
/// x-bar block [0, n), z-bar block [n, 2n), s at 2n, t at 2n+1, rho at 2n+2.
struct BlockIndex {
  int n;

  int dim() const { return 2 * n + 3; }
  int x(int i) const { return i; }
  int z(int i) const { return n + i; }
  int s() const { return 2 * n; }
  int t() const { return 2 * n + 1; }
  int rho() const { return 2 * n + 2; }
};

/// Which diagonal constraints diag(Y11) = y1 and diag(Y22) = y2 are imposed.
enum class DiagMode { None, Y1Only, Both };

struct ModelMatrices {
  int n = 0;
  BlockIndex index{0};
  DiagMode mode = DiagMode::None;
  Eigen::MatrixXd C;       // (n+2) x (2n+2)
  Eigen::VectorXd d;       // n+2
  Eigen::MatrixXd M;       // (n+2) x (2n+3), (C | -d)
  Eigen::MatrixXd W;       // (2n+3) x (n+1), orthonormal basis of ker(M)
  Eigen::MatrixXd Ltilde;  // Diag(L, 0_{n+3})
  std::vector<LinearFunctional> equalities;
  Eigen::VectorXd b;

  int lifted_dim() const { return 2 * n + 3; }
  int reduced_dim() const { return n + 1; }
  int half() const { return n / 2; }
};

/// Kernel basis of M before orthonormalization, one vector per column:
/// columns 0..n-1 are (u_i; -u_i; -1; 1; 0), column n is (0; e; floor(n/2); -1; 1).
inline Eigen::MatrixXd kernel_basis_raw(int n) {
  if (n < 3) throw std::invalid_argument("n must be at least 3");
  const BlockIndex ix{n};
  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(ix.dim(), n + 1);
  for (int i = 0; i < n; ++i) {
    basis(ix.x(i), i) = 1.0;
    basis(ix.z(i), i) = -1.0;
    basis(ix.s(), i) = -1.0;
    basis(ix.t(), i) = 1.0;
  }
  for (int i = 0; i < n; ++i) basis(ix.z(i), n) = 1.0;
  basis(ix.s(), n) = n / 2;
  basis(ix.t(), n) = -1.0;
  basis(ix.rho(), n) = 1.0;
  return basis;
}

inline Eigen::MatrixXd orthonormalize_columns(const Eigen::MatrixXd& basis) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis);
  return qr.householderQ() * Eigen::MatrixXd::Identity(basis.rows(), basis.cols());
}

inline ModelMatrices build_model(const Graph& g, DiagMode mode = DiagMode::None) {
  const int n = g.num_vertices();
  const int k = n / 2;
  ModelMatrices m;
  m.n = n;
  m.index = BlockIndex{n};
  m.mode = mode;
  const BlockIndex& ix = m.index;

  m.C = Eigen::MatrixXd::Zero(n + 2, 2 * n + 2);
  m.C.block(0, 0, 1, n).setOnes();
  m.C(0, ix.s()) = 1.0;
  m.C.block(1, 0, 1, n).setOnes();
  m.C(1, ix.t()) = -1.0;
  for (int i = 0; i < n; ++i) {
    m.C(2 + i, ix.x(i)) = 1.0;
    m.C(2 + i, ix.z(i)) = 1.0;
  }
  m.d = Eigen::VectorXd::Ones(n + 2);
  m.d(0) = k;

  m.M.resize(n + 2, 2 * n + 3);
  m.M << m.C, -m.d;

  m.W = orthonormalize_columns(kernel_basis_raw(n));

  m.Ltilde = Eigen::MatrixXd::Zero(ix.dim(), ix.dim());
  m.Ltilde.topLeftCorner(n, n) = laplacian(g);

  // e^T y1 = 1
  LinearFunctional sum_y1;
  for (int i = 0; i < n; ++i) sum_y1.add(ix.x(i), ix.rho(), 1.0);
  m.equalities.push_back(std::move(sum_y1));
  // diag(Y12) = 0
  for (int i = 0; i < n; ++i) m.equalities.push_back(LinearFunctional{}.add(ix.x(i), ix.z(i), 1.0));
  if (mode != DiagMode::None) {
    for (int i = 0; i < n; ++i)
      m.equalities.push_back(LinearFunctional{}.add(ix.x(i), ix.x(i), 1.0).add(ix.x(i), ix.rho(), -1.0));
  }
  if (mode == DiagMode::Both) {
    for (int i = 0; i < n; ++i)
      m.equalities.push_back(LinearFunctional{}.add(ix.z(i), ix.z(i), 1.0).add(ix.z(i), ix.rho(), -1.0));
  }
  m.b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m.equalities.size()));
  m.b(0) = 1.0;
  return m;
}

/// Read-only block view of a lifted matrix Y~ = [[Y, y], [y^T, rho]] with
/// Y = [Y^{ab}] for a, b in {1 (x-bar), 2 (z-bar), 3 (s), 4 (t)}.
class LiftedBlocks {
 public:
  LiftedBlocks(Eigen::MatrixXd y, int n) : y_(std::move(y)), ix_{n} {
    if (y_.rows() != ix_.dim() || y_.cols() != ix_.dim()) throw std::invalid_argument("lifted matrix has wrong size");
  }

  int n() const { return ix_.n; }
  const Eigen::MatrixXd& full() const { return y_; }

  auto Y11() const { return y_.block(0, 0, ix_.n, ix_.n); }
  auto Y12() const { return y_.block(0, ix_.n, ix_.n, ix_.n); }
  auto Y21() const { return y_.block(ix_.n, 0, ix_.n, ix_.n); }
  auto Y22() const { return y_.block(ix_.n, ix_.n, ix_.n, ix_.n); }
  auto Y13() const { return y_.col(ix_.s()).segment(0, ix_.n); }
  auto Y23() const { return y_.col(ix_.s()).segment(ix_.n, ix_.n); }
  auto Y14() const { return y_.col(ix_.t()).segment(0, ix_.n); }
  auto Y24() const { return y_.col(ix_.t()).segment(ix_.n, ix_.n); }
  double Y33() const { return y_(ix_.s(), ix_.s()); }
  double Y34() const { return y_(ix_.s(), ix_.t()); }
  double Y44() const { return y_(ix_.t(), ix_.t()); }
  auto y1() const { return y_.col(ix_.rho()).segment(0, ix_.n); }
  auto y2() const { return y_.col(ix_.rho()).segment(ix_.n, ix_.n); }
  double y3() const { return y_(ix_.s(), ix_.rho()); }
  double y4() const { return y_(ix_.t(), ix_.rho()); }
  double rho() const { return y_(ix_.rho(), ix_.rho()); }
  /// Upper-left (2n+2) block Y.
  auto Y() const { return y_.topLeftCorner(2 * ix_.n + 2, 2 * ix_.n + 2); }
  auto y() const { return y_.col(ix_.rho()).segment(0, 2 * ix_.n + 2); }

 private:
  Eigen::MatrixXd y_;
  BlockIndex ix_;
};

/// Y~ = W R W^T.
inline Eigen::MatrixXd lift(const ModelMatrices& model, const Eigen::MatrixXd& r) {
  if (r.rows() != model.W.cols() || r.cols() != model.W.cols())
    throw std::invalid_argument("reduced matrix has wrong size");
  return model.W * r * model.W.transpose();
}

}  // namespace cheeger

#endif  // CHEEGER_MODEL_HPP
