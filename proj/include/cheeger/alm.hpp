#ifndef CHEEGER_ALM_HPP
#define CHEEGER_ALM_HPP

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "cheeger/certify.hpp"
#include "cheeger/cuts.hpp"
#include "cheeger/lbfgsb.hpp"
#include "cheeger/model.hpp"
#include "cheeger/problem.hpp"
#include "cheeger/spectral.hpp"

namespace cheeger {

struct SolverConfig {
  double alpha_init = 1.0;
  double alpha_min = 1e-5;
  double alpha_factor = 3.0 / 5.0;
  int cut_batch = 500;
  double cut_tol = 1e-3;
  int min_new_cuts = 50;
  double purge_tol = 1e-5;
  int warmup_iters_before_cuts = 5;
  int post_iters_max = 500;
  double post_correction_tol = 0.01;
  lbfgsb::Options inner{10, 2000, 1e8, 1e-5, 20};
  double feasibility_tol = 1e-3;
  DiagMode diag_mode = DiagMode::None;
  double divergence_limit = 1e8;
  int max_outer_iterations = 10000;

  void validate() const {
    auto positive = [](double v, const char* name) {
      if (!(v > 0.0)) throw std::invalid_argument(std::string(name) + " must be positive");
    };
    positive(alpha_init, "alpha_init");
    positive(alpha_min, "alpha_min");
    if (!(alpha_factor > 0.0 && alpha_factor < 1.0)) throw std::invalid_argument("alpha_factor must lie in (0, 1)");
    if (cut_batch < 0) throw std::invalid_argument("cut_batch must be non-negative");
    positive(cut_tol, "cut_tol");
    if (min_new_cuts < 0) throw std::invalid_argument("min_new_cuts must be non-negative");
    if (purge_tol < 0.0) throw std::invalid_argument("purge_tol must be non-negative");
    if (warmup_iters_before_cuts < 0) throw std::invalid_argument("warmup_iters_before_cuts must be non-negative");
    if (post_iters_max < 0) throw std::invalid_argument("post_iters_max must be non-negative");
    positive(post_correction_tol, "post_correction_tol");
    if (inner.memory < 1 || inner.max_iterations < 1) throw std::invalid_argument("inner solver options must be positive");
    positive(inner.factr, "factr");
    positive(inner.pgtol, "pgtol");
    positive(feasibility_tol, "feasibility_tol");
    positive(divergence_limit, "divergence_limit");
  }
};

/// Dual variables of the facially reduced program. S is kept symmetric and
/// entrywise non-negative; Z is recovered from (nu, mu, S) and never packed.
struct DualState {
  Eigen::VectorXd nu;
  Eigen::VectorXd mu;
  Eigen::MatrixXd S;
  Eigen::MatrixXd Z;
  double alpha = 1.0;
};

struct PrimalState {
  Eigen::MatrixXd R;
  Eigen::MatrixXd Y;  // W R W^T
};

struct IterationLog {
  int iter = 0;
  double alpha = 0.0;
  double F = 0.0;
  int inner_iters = 0;
  int cuts_added = 0;
  int cuts_removed = 0;
  double correction = 0.0;
  std::string inner_status;
  bool post_phase = false;
};

struct SolveResult {
  DualState dual;
  PrimalState primal;
  CutPool pool;
  std::vector<IterationLog> log;
  Certificate certificate;
  int iterations = 0;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Inner function F_alpha and its gradient
// ---------------------------------------------------------------------------

struct FValue {
  double value = 0.0;
  Eigen::VectorXd grad_nu;
  Eigen::VectorXd grad_mu;
  Eigen::MatrixXd grad_S;     // symmetric, = -W P W^T / alpha
  Eigen::MatrixXd projection;  // P = P_psd(W^T K W + alpha R)
};

namespace detail {

struct InnerTerms {
  Eigen::MatrixXd reduced;     // W^T K W
  Eigen::MatrixXd projection;  // P_psd(W^T K W + alpha R)
  Eigen::MatrixXd lifted;      // W P W^T / alpha
};

inline InnerTerms inner_terms(const ConicProblem& p, const std::vector<LinearFunctional>& ineq, const Eigen::VectorXd& nu,
                              const Eigen::VectorXd& mu, const Eigen::MatrixXd& s, const Eigen::MatrixXd& r, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (r.rows() != p.reduced_dim() || r.cols() != p.reduced_dim()) throw std::invalid_argument("R has wrong size");
  InnerTerms t;
  t.reduced = p.reduce(dual_operator(p, ineq, nu, mu, s));
  t.projection = project_psd(t.reduced + alpha * r);
  t.lifted = p.lift(t.projection) / alpha;
  return t;
}

inline double f_value(const ConicProblem& p, const Eigen::VectorXd& nu, const Eigen::MatrixXd& projection,
                      const Eigen::MatrixXd& r, double alpha) {
  return p.b.dot(nu) - projection.squaredNorm() / (2.0 * alpha) + 0.5 * alpha * r.squaredNorm();
}

}  // namespace detail

inline FValue eval_F_alpha(const ConicProblem& p, const std::vector<LinearFunctional>& ineq, const DualState& dual,
                           const Eigen::MatrixXd& r) {
  auto t = detail::inner_terms(p, ineq, dual.nu, dual.mu, dual.S, r, dual.alpha);
  FValue out;
  out.value = detail::f_value(p, dual.nu, t.projection, r, dual.alpha);
  out.grad_nu.resize(dual.nu.size());
  for (Eigen::Index i = 0; i < dual.nu.size(); ++i) out.grad_nu(i) = p.b(i) - p.equalities[i](t.lifted);
  out.grad_mu.resize(dual.mu.size());
  for (Eigen::Index j = 0; j < dual.mu.size(); ++j) out.grad_mu(j) = ineq[j](t.lifted);
  out.grad_S = -t.lifted;
  out.projection = std::move(t.projection);
  return out;
}

// Packed layout: [nu (p) | mu (q) | upper triangle of S, column by column].
inline Eigen::Index packed_size(Eigen::Index p, Eigen::Index q, Eigen::Index dim) { return p + q + dim * (dim + 1) / 2; }

inline Eigen::VectorXd pack(const DualState& d) {
  const Eigen::Index p = d.nu.size(), q = d.mu.size(), dim = d.S.rows();
  Eigen::VectorXd x(packed_size(p, q, dim));
  x.head(p) = d.nu;
  x.segment(p, q) = d.mu;
  Eigen::Index k = p + q;
  for (Eigen::Index j = 0; j < dim; ++j)
    for (Eigen::Index i = 0; i <= j; ++i) x(k++) = d.S(i, j);
  return x;
}

inline void unpack(const Eigen::VectorXd& x, Eigen::Index p, Eigen::Index q, Eigen::Index dim, DualState& d) {
  if (x.size() != packed_size(p, q, dim)) throw std::invalid_argument("packed dual has wrong length");
  d.nu = x.head(p);
  d.mu = x.segment(p, q);
  d.S.resize(dim, dim);
  Eigen::Index k = p + q;
  for (Eigen::Index j = 0; j < dim; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      d.S(i, j) = x(k);
      d.S(j, i) = x(k);
      ++k;
    }
  }
}

/// F_alpha at a packed point with its gradient in the same layout. Off
/// diagonal S entries appear twice in the symmetric matrix, so their partial
/// derivatives are doubled.
inline double eval_F_alpha_packed(const ConicProblem& p, const std::vector<LinearFunctional>& ineq,
                                  const Eigen::MatrixXd& r, double alpha, const Eigen::VectorXd& x,
                                  Eigen::VectorXd& grad) {
  const Eigen::Index np = p.num_equalities(), nq = static_cast<Eigen::Index>(ineq.size()), dim = p.lifted_dim();
  DualState d;
  unpack(x, np, nq, dim, d);
  auto t = detail::inner_terms(p, ineq, d.nu, d.mu, d.S, r, alpha);
  grad.resize(x.size());
  for (Eigen::Index i = 0; i < np; ++i) grad(i) = p.b(i) - p.equalities[i](t.lifted);
  for (Eigen::Index j = 0; j < nq; ++j) grad(np + j) = ineq[j](t.lifted);
  Eigen::Index k = np + nq;
  for (Eigen::Index j = 0; j < dim; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) grad(k++) = -2.0 * t.lifted(i, j);
    grad(k++) = -t.lifted(j, j);
  }
  return detail::f_value(p, d.nu, t.projection, r, alpha);
}

/// Optimal Z of the inner problem for fixed (nu, mu, S):
/// Z = P_psd(-(W^T K W + alpha R)).
inline Eigen::MatrixXd recover_Z(const ConicProblem& p, const std::vector<LinearFunctional>& ineq, const DualState& dual,
                                 const Eigen::MatrixXd& r) {
  const Eigen::MatrixXd reduced = p.reduce(dual_operator(p, ineq, dual.nu, dual.mu, dual.S));
  return project_psd(-(reduced + dual.alpha * r));
}

/// Multiplier step R' = R + (W^T K W + Z) / alpha. With Z from recover_Z
/// this equals P_psd(W^T K W + alpha R) / alpha, so R' stays psd and
/// W R' W^T is the negative S-gradient of F_alpha.
inline Eigen::MatrixXd update_R(const ConicProblem& p, const std::vector<LinearFunctional>& ineq, const DualState& dual,
                                const Eigen::MatrixXd& r) {
  if (dual.Z.rows() != r.rows() || dual.Z.cols() != r.cols()) throw std::invalid_argument("Z has wrong size");
  const Eigen::MatrixXd reduced = p.reduce(dual_operator(p, ineq, dual.nu, dual.mu, dual.S));
  Eigen::MatrixXd next = r + (reduced + dual.Z) / dual.alpha;
  return 0.5 * (next + next.transpose());
}

// ---------------------------------------------------------------------------
// Outer loop
// ---------------------------------------------------------------------------

namespace detail {

struct InnerOutcome {
  double F = 0.0;
  int iterations = 0;
  lbfgsb::Status status = lbfgsb::Status::MaxIterations;
};

inline InnerOutcome solve_inner(const ConicProblem& p, const std::vector<LinearFunctional>& ineq, DualState& dual,
                                const Eigen::MatrixXd& r, const lbfgsb::Options& opts) {
  const Eigen::Index np = p.num_equalities(), nq = static_cast<Eigen::Index>(ineq.size()), dim = p.lifted_dim();
  const Eigen::Index total = packed_size(np, nq, dim);
  lbfgsb::BoxProblem box;
  box.lower = Eigen::VectorXd::Zero(total);
  box.lower.head(np).setConstant(-lbfgsb::kInf);
  box.upper = Eigen::VectorXd::Constant(total, lbfgsb::kInf);
  box.options = opts;
  const double alpha = dual.alpha;
  box.objective = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    const double f = eval_F_alpha_packed(p, ineq, r, alpha, x, g);
    g = -g;
    return -f;
  };
  auto res = lbfgsb::minimize(box, pack(dual));
  unpack(res.x, np, nq, dim, dual);
  return {-res.f, res.iterations, res.status};
}

}  // namespace detail

/// Augmented Lagrangian loop with cutting planes. Starts from R = 0 and a
/// zero dual; each round does one inner solve, one multiplier step, purges
/// cuts with small multipliers and (after the warm-up rounds) adds the most
/// violated triangle cuts. alpha shrinks whenever fewer than min_new_cuts
/// cuts were added. Once alpha drops below alpha_min, extra rounds at the
/// last alpha run until the certificate correction is below
/// post_correction_tol.
inline SolveResult solve(const ConicProblem& p, const SolverConfig& cfg) {
  cfg.validate();
  const bool cuts_on = p.supports_cuts && cfg.cut_batch > 0;
  const Eigen::Index r_dim = p.reduced_dim(), dim = p.lifted_dim();
  const Eigen::Index q_fixed = p.num_fixed_inequalities();

  SolveResult out;
  out.pool = CutPool(p.n);
  DualState& dual = out.dual;
  dual.nu = Eigen::VectorXd::Zero(p.num_equalities());
  dual.mu = Eigen::VectorXd::Zero(q_fixed);
  dual.S = Eigen::MatrixXd::Zero(dim, dim);
  dual.Z = Eigen::MatrixXd::Zero(r_dim, r_dim);
  dual.alpha = cfg.alpha_init;
  PrimalState& primal = out.primal;
  primal.R = Eigen::MatrixXd::Zero(r_dim, r_dim);
  primal.Y = p.lift(primal.R);
  std::vector<LinearFunctional> ineq = inequality_rows(p, out.pool);

  int iter = 0;
  auto round = [&](bool post_phase) -> IterationLog {
    if (iter >= cfg.max_outer_iterations) throw SolverError("outer iteration limit reached");
    detail::InnerOutcome inner;
    try {
      inner = detail::solve_inner(p, ineq, dual, primal.R, cfg.inner);
    } catch (const lbfgsb::NonFiniteError& e) {
      throw SolverError("inner solve diverged at iteration " + std::to_string(iter + 1) + ", alpha " +
                        std::to_string(dual.alpha) + ": " + e.what());
    }
    dual.Z = recover_Z(p, ineq, dual, primal.R);
    primal.R = update_R(p, ineq, dual, primal.R);
    if (!primal.R.allFinite() || primal.R.norm() > cfg.divergence_limit)
      throw SolverError("primal matrix diverged at iteration " + std::to_string(iter + 1));
    primal.Y = p.lift(primal.R);
    ++iter;

    IterationLog entry;
    entry.iter = iter;
    entry.alpha = dual.alpha;
    entry.F = inner.F;
    entry.inner_iters = inner.iterations;
    entry.inner_status = lbfgsb::to_string(inner.status);
    entry.post_phase = post_phase;

    if (cuts_on && !post_phase) {
      std::vector<double> mu_cuts(dual.mu.data() + q_fixed, dual.mu.data() + dual.mu.size());
      out.pool.set_multipliers(mu_cuts);
      const std::size_t before = out.pool.size();
      out.pool.purge(cfg.purge_tol);
      entry.cuts_removed = static_cast<int>(before - out.pool.size());
      if (iter > cfg.warmup_iters_before_cuts) {
        for (const auto& sc : separate(primal.Y, p.n, p.rho_index, out.pool, cfg.cut_batch, cfg.cut_tol))
          if (out.pool.add(sc.cut)) ++entry.cuts_added;
      }
      if (entry.cuts_removed > 0 || entry.cuts_added > 0) {
        Eigen::VectorXd mu(q_fixed + static_cast<Eigen::Index>(out.pool.size()));
        mu.head(q_fixed) = dual.mu.head(q_fixed);
        for (std::size_t j = 0; j < out.pool.size(); ++j)
          mu(q_fixed + static_cast<Eigen::Index>(j)) = out.pool.multipliers()[j];
        dual.mu = std::move(mu);
        ineq = inequality_rows(p, out.pool);
      }
    }
    entry.correction = certify(p, ineq, dual.nu, dual.mu, dual.S).correction;
    out.log.push_back(entry);
    return entry;
  };

  double last_alpha = dual.alpha;
  while (dual.alpha >= cfg.alpha_min) {
    const auto entry = round(false);
    last_alpha = dual.alpha;
    if (entry.cuts_added < cfg.min_new_cuts) dual.alpha *= cfg.alpha_factor;
  }

  dual.alpha = last_alpha;
  double correction = out.log.empty() ? -std::numeric_limits<double>::infinity() : out.log.back().correction;
  for (int extra = 0; extra < cfg.post_iters_max && !(std::abs(correction) < cfg.post_correction_tol); ++extra)
    correction = round(true).correction;

  out.certificate = certify(p, ineq, dual.nu, dual.mu, dual.S);
  out.iterations = iter;
  return out;
}

/// Lifted model (with cuts unless cfg.cut_batch == 0).
inline SolveResult solve(const ModelMatrices& model, const SolverConfig& cfg) { return solve(lifted_problem(model), cfg); }

inline SolveResult solve(const Graph& g, const SolverConfig& cfg) { return solve(build_model(g, cfg.diag_mode), cfg); }

/// Basic (n+1)-dimensional relaxation through the same machinery.
inline SolveResult solve_basic(const Graph& g, const SolverConfig& cfg) { return solve(basic_problem(g), cfg); }

}  // namespace cheeger

#endif  // CHEEGER_ALM_HPP
