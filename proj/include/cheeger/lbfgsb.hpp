#ifndef CHEEGER_LBFGSB_HPP
#define CHEEGER_LBFGSB_HPP

// Limited-memory BFGS for bound-constrained minimization (L-BFGS-B):
// generalized Cauchy point along the projected gradient path, direct primal
// subspace minimization over the free variables, and a More-Thuente line
// search. The compact representation B = theta*I - W M W^T is rebuilt from
// the stored correction pairs each iteration.

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/LU>

namespace cheeger::lbfgsb {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Options {
  int memory = 10;
  int max_iterations = 2000;
  double factr = 1e8;
  double pgtol = 1e-5;
  int max_linesearch = 20;
};

enum class Status { ConvergedFactr, ConvergedPgtol, MaxIterations, LineSearchFailure };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::ConvergedFactr: return "converged-factr";
    case Status::ConvergedPgtol: return "converged-pgtol";
    case Status::MaxIterations: return "maxiter";
    case Status::LineSearchFailure: return "linesearch-failure";
  }
  return "unknown";
}

/// f(x) with the gradient written into `grad` (already sized).
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

struct BoxProblem {
  Eigen::VectorXd lower;  // -inf for free coordinates
  Eigen::VectorXd upper;  // +inf for unbounded above
  Objective objective;
  Options options;
  std::function<void(int iteration, double f)> on_iterate;  // optional
};

struct Result {
  Eigen::VectorXd x;
  double f = 0.0;
  Status status = Status::MaxIterations;
  int iterations = 0;
  int evaluations = 0;
  double projected_gradient = 0.0;
};

class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Max-norm of the projected gradient P(x - g) - x.
inline double projected_gradient_norm(const Eigen::VectorXd& x, const Eigen::VectorXd& g, const Eigen::VectorXd& lower,
                                      const Eigen::VectorXd& upper) {
  double norm = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double gi = g(i);
    if (gi < 0.0) {
      gi = std::max(x(i) - upper(i), gi);
    } else {
      gi = std::min(x(i) - lower(i), gi);
    }
    norm = std::max(norm, std::abs(gi));
  }
  return norm;
}

namespace detail {

// One safeguarded step of the More-Thuente interval update.
inline void more_thuente_step(double& stx, double& fx, double& dx, double& sty, double& fy, double& dy, double& stp,
                              double fp, double dp, bool& brackt, double stpmin, double stpmax) {
  const double sgnd = dp * std::copysign(1.0, dx);
  double stpf = 0.0;
  if (fp > fx) {
    const double theta = 3.0 * (fx - fp) / (stp - stx) + dx + dp;
    const double s = std::max({std::abs(theta), std::abs(dx), std::abs(dp)});
    double gamma = s * std::sqrt((theta / s) * (theta / s) - (dx / s) * (dp / s));
    if (stp < stx) gamma = -gamma;
    const double p = (gamma - dx) + theta;
    const double q = ((gamma - dx) + gamma) + dp;
    const double r = p / q;
    const double stpc = stx + r * (stp - stx);
    const double stpq = stx + ((dx / ((fx - fp) / (stp - stx) + dx)) / 2.0) * (stp - stx);
    stpf = std::abs(stpc - stx) < std::abs(stpq - stx) ? stpc : stpc + (stpq - stpc) / 2.0;
    brackt = true;
  } else if (sgnd < 0.0) {
    const double theta = 3.0 * (fx - fp) / (stp - stx) + dx + dp;
    const double s = std::max({std::abs(theta), std::abs(dx), std::abs(dp)});
    double gamma = s * std::sqrt((theta / s) * (theta / s) - (dx / s) * (dp / s));
    if (stp > stx) gamma = -gamma;
    const double p = (gamma - dp) + theta;
    const double q = ((gamma - dp) + gamma) + dx;
    const double r = p / q;
    const double stpc = stp + r * (stx - stp);
    const double stpq = stp + (dp / (dp - dx)) * (stx - stp);
    stpf = std::abs(stpc - stp) > std::abs(stpq - stp) ? stpc : stpq;
    brackt = true;
  } else if (std::abs(dp) < std::abs(dx)) {
    const double theta = 3.0 * (fx - fp) / (stp - stx) + dx + dp;
    const double s = std::max({std::abs(theta), std::abs(dx), std::abs(dp)});
    double gamma = s * std::sqrt(std::max(0.0, (theta / s) * (theta / s) - (dx / s) * (dp / s)));
    if (stp > stx) gamma = -gamma;
    const double p = (gamma - dp) + theta;
    const double q = (gamma + (dx - dp)) + gamma;
    const double r = p / q;
    double stpc;
    if (r < 0.0 && gamma != 0.0) {
      stpc = stp + r * (stx - stp);
    } else if (stp > stx) {
      stpc = stpmax;
    } else {
      stpc = stpmin;
    }
    const double stpq = stp + (dp / (dp - dx)) * (stx - stp);
    if (brackt) {
      stpf = std::abs(stpc - stp) < std::abs(stpq - stp) ? stpc : stpq;
      if (stp > stx) {
        stpf = std::min(stp + 0.66 * (sty - stp), stpf);
      } else {
        stpf = std::max(stp + 0.66 * (sty - stp), stpf);
      }
    } else {
      stpf = std::abs(stpc - stp) > std::abs(stpq - stp) ? stpc : stpq;
      stpf = std::clamp(stpf, stpmin, stpmax);
    }
  } else {
    if (brackt) {
      const double theta = 3.0 * (fp - fy) / (sty - stp) + dy + dp;
      const double s = std::max({std::abs(theta), std::abs(dy), std::abs(dp)});
      double gamma = s * std::sqrt((theta / s) * (theta / s) - (dy / s) * (dp / s));
      if (stp > sty) gamma = -gamma;
      const double p = (gamma - dp) + theta;
      const double q = ((gamma - dp) + gamma) + dy;
      const double r = p / q;
      stpf = stp + r * (sty - stp);
    } else if (stp > stx) {
      stpf = stpmax;
    } else {
      stpf = stpmin;
    }
  }

  if (fp > fx) {
    sty = stp;
    fy = fp;
    dy = dp;
  } else {
    if (sgnd < 0.0) {
      sty = stx;
      fy = fx;
      dy = dx;
    }
    stx = stp;
    fx = fp;
    dx = dp;
  }
  stp = stpf;
}

struct LineSearchPoint {
  double stp = 0.0;
  double f = 0.0;
  Eigen::VectorXd x;
  Eigen::VectorXd g;
};

// More-Thuente search for a step satisfying the strong Wolfe conditions
// (ftol = 1e-3, gtol = 0.9). Falls back to the best Armijo point seen; an
// empty result means no sufficient decrease was found.
template <typename Eval>
std::optional<LineSearchPoint> more_thuente(Eval&& eval, double finit, double ginit, double stp, double stpmax,
                                            int max_evals) {
  constexpr double ftol = 1e-3, gtol = 0.9, xtol = 0.1, stpmin = 0.0;
  constexpr double xtrapl = 1.1, xtrapu = 4.0;
  bool brackt = false;
  int stage = 1;
  const double gtest = ftol * ginit;
  double width = stpmax - stpmin, width1 = 2.0 * width;
  double stx = 0.0, fx = finit, gx = ginit;
  double sty = 0.0, fy = finit, gy = ginit;
  double stmin = 0.0, stmax = stp + xtrapu * stp;

  std::optional<LineSearchPoint> best;
  for (int evals = 0; evals < max_evals; ++evals) {
    LineSearchPoint pt;
    pt.stp = stp;
    double g = 0.0;
    pt.f = eval(stp, pt.x, pt.g, g);
    const double f = pt.f;
    const double ftest = finit + stp * gtest;
    const bool armijo = f <= ftest;
    if (armijo && (!best || f < best->f)) best = pt;

    if (stage == 1 && armijo && g >= std::min(ftol, gtol) * ginit) stage = 2;
    if (armijo && std::abs(g) <= gtol * (-ginit)) return pt;
    if (brackt && (stp <= stmin || stp >= stmax)) break;
    if (brackt && stmax - stmin <= xtol * stmax) break;
    if (stp == stpmax && armijo && g <= gtest) break;
    if (stp == stpmin && (!armijo || g >= gtest)) break;

    if (stage == 1 && f <= fx && f > ftest) {
      double fm = f - stp * gtest, gm = g - gtest;
      double fxm = fx - stx * gtest, fym = fy - sty * gtest;
      double gxm = gx - gtest, gym = gy - gtest;
      more_thuente_step(stx, fxm, gxm, sty, fym, gym, stp, fm, gm, brackt, stmin, stmax);
      fx = fxm + stx * gtest;
      fy = fym + sty * gtest;
      gx = gxm + gtest;
      gy = gym + gtest;
    } else {
      more_thuente_step(stx, fx, gx, sty, fy, gy, stp, f, g, brackt, stmin, stmax);
    }

    if (brackt) {
      if (std::abs(sty - stx) >= 0.66 * width1) stp = stx + 0.5 * (sty - stx);
      width1 = width;
      width = std::abs(sty - stx);
      stmin = std::min(stx, sty);
      stmax = std::max(stx, sty);
    } else {
      stmin = stp + xtrapl * (stp - stx);
      stmax = stp + xtrapu * (stp - stx);
    }
    stp = std::clamp(stp, stpmin, stpmax);
    if ((brackt && (stp <= stmin || stp >= stmax)) || (brackt && stmax - stmin <= xtol * stmax)) stp = stx;
    if (!(stp > 0.0)) break;
  }
  return best;
}

}  // namespace detail

class Solver {
 public:
  explicit Solver(const BoxProblem& problem) : p_(problem), n_(problem.lower.size()) {
    if (problem.upper.size() != n_) throw std::invalid_argument("bound vectors differ in length");
    if (!problem.objective) throw std::invalid_argument("missing objective");
    if (problem.options.memory < 1) throw std::invalid_argument("memory must be positive");
    for (Eigen::Index i = 0; i < n_; ++i)
      if (p_.lower(i) > p_.upper(i)) throw std::invalid_argument("lower bound exceeds upper bound");
    constrained_ = (p_.lower.array() > -kInf).any() || (p_.upper.array() < kInf).any();
  }

  Result run(Eigen::VectorXd x0) {
    if (x0.size() != n_) throw std::invalid_argument("x0 has wrong length");
    Result res;
    x_ = x0.cwiseMax(p_.lower).cwiseMin(p_.upper);
    g_.resize(n_);
    f_ = evaluate(x_, g_, res);
    res.projected_gradient = projected_gradient_norm(x_, g_, p_.lower, p_.upper);
    if (res.projected_gradient <= p_.options.pgtol) {
      res.status = Status::ConvergedPgtol;
      return finish(res);
    }

    constexpr double epsmch = std::numeric_limits<double>::epsilon();
    bool just_reset = false;
    while (true) {
      if (res.iterations >= p_.options.max_iterations) {
        res.status = Status::MaxIterations;
        return finish(res);
      }
      Eigen::VectorXd xbar = search_point();
      Eigen::VectorXd d = xbar - x_;
      double gd = g_.dot(d);
      if (!(gd < 0.0)) {
        // Not a descent direction: retry from a fresh memory.
        if (!s_.empty()) {
          reset_memory();
          continue;
        }
        res.status = Status::ConvergedPgtol;
        return finish(res);
      }

      const double dnorm = d.norm();
      double stpmax = max_feasible_step(d);
      double stp = 1.0;
      if (s_.empty()) {
        if (constrained_) stpmax = std::min(stpmax, 1.0);
        stp = std::min(1.0 / dnorm, stpmax);
      }
      stp = std::min(stp, stpmax);

      auto eval = [&](double step, Eigen::VectorXd& x, Eigen::VectorXd& g, double& dg) {
        x = (x_ + step * d).cwiseMax(p_.lower).cwiseMin(p_.upper);
        g.resize(n_);
        double f = evaluate(x, g, res);
        dg = g.dot(d);
        return f;
      };
      auto point = detail::more_thuente(eval, f_, gd, stp, stpmax, p_.options.max_linesearch);
      if (!point) {
        if (!s_.empty() && !just_reset) {
          reset_memory();
          just_reset = true;
          continue;
        }
        res.status = Status::LineSearchFailure;
        return finish(res);
      }
      just_reset = false;

      const double f_old = f_;
      Eigen::VectorXd s = point->x - x_;
      Eigen::VectorXd y = point->g - g_;
      x_ = std::move(point->x);
      g_ = std::move(point->g);
      f_ = point->f;
      ++res.iterations;
      if (p_.on_iterate) p_.on_iterate(res.iterations, f_);

      res.projected_gradient = projected_gradient_norm(x_, g_, p_.lower, p_.upper);
      if (res.projected_gradient <= p_.options.pgtol) {
        res.status = Status::ConvergedPgtol;
        return finish(res);
      }
      const double scale = std::max({std::abs(f_old), std::abs(f_), 1.0});
      if (f_old - f_ <= p_.options.factr * epsmch * scale) {
        res.status = Status::ConvergedFactr;
        return finish(res);
      }

      const double sy = s.dot(y);
      const double yy = y.squaredNorm();
      if (sy > epsmch * yy) {
        s_.push_back(std::move(s));
        y_.push_back(std::move(y));
        if (static_cast<int>(s_.size()) > p_.options.memory) {
          s_.pop_front();
          y_.pop_front();
        }
        theta_ = yy / sy;
      }
    }
  }

 private:
  double evaluate(const Eigen::VectorXd& x, Eigen::VectorXd& g, Result& res) {
    ++res.evaluations;
    const double f = p_.objective(x, g);
    if (!std::isfinite(f) || !g.allFinite()) throw NonFiniteError("objective or gradient is not finite");
    return f;
  }

  Result& finish(Result& res) {
    res.x = x_;
    res.f = f_;
    return res;
  }

  void reset_memory() {
    s_.clear();
    y_.clear();
    theta_ = 1.0;
  }

  double max_feasible_step(const Eigen::VectorXd& d) const {
    double stp = 1e10;
    for (Eigen::Index i = 0; i < n_; ++i) {
      if (d(i) < 0.0 && p_.lower(i) > -kInf) {
        stp = std::min(stp, (p_.lower(i) - x_(i)) / d(i));
      } else if (d(i) > 0.0 && p_.upper(i) < kInf) {
        stp = std::min(stp, (p_.upper(i) - x_(i)) / d(i));
      }
    }
    return std::max(stp, 0.0);
  }

  // Builds W = [Y, theta*S] and the 2k x 2k middle matrix M of the compact
  // representation B = theta*I - W M W^T.
  void build_compact() {
    const int k = static_cast<int>(s_.size());
    wmat_.resize(n_, 2 * k);
    for (int j = 0; j < k; ++j) {
      wmat_.col(j) = y_[j];
      wmat_.col(k + j) = theta_ * s_[j];
    }
    Eigen::MatrixXd middle = Eigen::MatrixXd::Zero(2 * k, 2 * k);
    for (int i = 0; i < k; ++i) {
      middle(i, i) = -s_[i].dot(y_[i]);
      for (int j = 0; j < k; ++j) {
        if (i > j) {
          const double lij = s_[i].dot(y_[j]);
          middle(k + i, j) = lij;
          middle(j, k + i) = lij;
        }
        if (j >= i) {
          const double sij = theta_ * s_[i].dot(s_[j]);
          middle(k + i, k + j) = sij;
          middle(k + j, k + i) = sij;
        }
      }
    }
    mmat_ = middle.fullPivLu().inverse();
  }

  // Generalized Cauchy point followed by subspace minimization over the
  // variables that are free at the Cauchy point.
  Eigen::VectorXd search_point() {
    const int k = static_cast<int>(s_.size());
    if (k > 0) {
      build_compact();
    } else {
      wmat_.resize(n_, 0);
      mmat_.resize(0, 0);
    }
    const Eigen::Index m2 = 2 * k;

    Eigen::VectorXd d = Eigen::VectorXd::Zero(n_);
    std::vector<std::pair<double, Eigen::Index>> breaks;
    breaks.reserve(n_);
    for (Eigen::Index i = 0; i < n_; ++i) {
      const double gi = g_(i);
      double t = kInf;
      if (gi < 0.0 && p_.upper(i) < kInf) {
        t = (x_(i) - p_.upper(i)) / gi;
      } else if (gi > 0.0 && p_.lower(i) > -kInf) {
        t = (x_(i) - p_.lower(i)) / gi;
      }
      if (t > 0.0 && gi != 0.0) {
        d(i) = -gi;
        if (t < kInf) breaks.emplace_back(t, i);
      }
    }
    std::sort(breaks.begin(), breaks.end());

    Eigen::VectorXd xcp = x_;
    Eigen::VectorXd c = Eigen::VectorXd::Zero(m2);
    Eigen::VectorXd p = m2 ? Eigen::VectorXd(wmat_.transpose() * d) : Eigen::VectorXd();
    double fp = -d.squaredNorm();
    double fpp = -theta_ * fp - (m2 ? p.dot(mmat_ * p) : 0.0);
    if (fp >= 0.0) return x_;
    double dt_min = fpp > 0.0 ? -fp / fpp : kInf;
    double t_old = 0.0;
    std::size_t next = 0;
    std::vector<char> fixed(n_, 0);

    while (next < breaks.size()) {
      const double t = breaks[next].first;
      const Eigen::Index b = breaks[next].second;
      const double dt = t - t_old;
      if (dt_min < dt) break;
      ++next;

      const double xb = d(b) > 0.0 ? p_.upper(b) : p_.lower(b);
      const double zb = xb - x_(b);
      xcp(b) = xb;
      fixed[b] = 1;
      const double gb = g_(b);
      if (m2) {
        c += dt * p;
        const Eigen::VectorXd wb = wmat_.row(b).transpose();
        const Eigen::VectorXd mc = mmat_ * c;
        const Eigen::VectorXd mp = mmat_ * p;
        const Eigen::VectorXd mw = mmat_ * wb;
        fp += dt * fpp + gb * gb + theta_ * gb * zb - gb * wb.dot(mc);
        fpp += -theta_ * gb * gb - 2.0 * gb * wb.dot(mp) - gb * gb * wb.dot(mw);
        p += gb * wb;
      } else {
        fp += dt * fpp + gb * gb + theta_ * gb * zb;
        fpp += -theta_ * gb * gb;
      }
      d(b) = 0.0;
      t_old = t;
      if (fp >= 0.0) {
        dt_min = 0.0;
        break;
      }
      fpp = std::max(fpp, std::numeric_limits<double>::epsilon() * 1e-3);
      dt_min = -fp / fpp;
    }
    dt_min = std::max(dt_min, 0.0);
    if (!std::isfinite(dt_min)) dt_min = 0.0;
    const double t_cp = t_old + dt_min;
    for (Eigen::Index i = 0; i < n_; ++i)
      if (!fixed[i]) xcp(i) = std::clamp(x_(i) + t_cp * d(i), p_.lower(i), p_.upper(i));
    if (m2) c += dt_min * p;

    // Free variables at the Cauchy point.
    std::vector<Eigen::Index> free;
    free.reserve(n_);
    for (Eigen::Index i = 0; i < n_; ++i)
      if (xcp(i) > p_.lower(i) && xcp(i) < p_.upper(i)) free.push_back(i);
    if (free.empty()) return xcp;

    const Eigen::Index nf = static_cast<Eigen::Index>(free.size());
    Eigen::VectorXd rc(nf);
    Eigen::VectorXd wmc = m2 ? Eigen::VectorXd(wmat_ * (mmat_ * c)) : Eigen::VectorXd();
    for (Eigen::Index a = 0; a < nf; ++a) {
      const Eigen::Index i = free[a];
      rc(a) = g_(i) + theta_ * (xcp(i) - x_(i)) - (m2 ? wmc(i) : 0.0);
    }

    Eigen::VectorXd du(nf);
    if (m2 == 0) {
      du = -rc / theta_;
    } else {
      Eigen::MatrixXd wz(nf, m2);
      for (Eigen::Index a = 0; a < nf; ++a) wz.row(a) = wmat_.row(free[a]);
      Eigen::VectorXd v = mmat_ * (wz.transpose() * rc);
      Eigen::MatrixXd nmat = Eigen::MatrixXd::Identity(m2, m2) - (mmat_ * (wz.transpose() * wz)) / theta_;
      v = nmat.fullPivLu().solve(v);
      du = -rc / theta_ - (wz * v) / (theta_ * theta_);
    }

    // Projected subspace step; fall back to the truncated step if the
    // projection destroys descent.
    Eigen::VectorXd xbar = xcp;
    for (Eigen::Index a = 0; a < nf; ++a) {
      const Eigen::Index i = free[a];
      xbar(i) = std::clamp(xcp(i) + du(a), p_.lower(i), p_.upper(i));
    }
    if (g_.dot(xbar - x_) < 0.0) return xbar;

    double alpha = 1.0;
    for (Eigen::Index a = 0; a < nf; ++a) {
      const Eigen::Index i = free[a];
      if (du(a) < 0.0 && p_.lower(i) > -kInf) {
        alpha = std::min(alpha, (p_.lower(i) - xcp(i)) / du(a));
      } else if (du(a) > 0.0 && p_.upper(i) < kInf) {
        alpha = std::min(alpha, (p_.upper(i) - xcp(i)) / du(a));
      }
    }
    alpha = std::max(alpha, 0.0);
    xbar = xcp;
    for (Eigen::Index a = 0; a < nf; ++a) {
      const Eigen::Index i = free[a];
      xbar(i) = std::clamp(xcp(i) + alpha * du(a), p_.lower(i), p_.upper(i));
    }
    if (g_.dot(xbar - x_) < 0.0) return xbar;
    return xcp;
  }

  const BoxProblem& p_;
  Eigen::Index n_;
  bool constrained_ = false;
  Eigen::VectorXd x_, g_;
  double f_ = 0.0;
  std::deque<Eigen::VectorXd> s_, y_;
  double theta_ = 1.0;
  Eigen::MatrixXd wmat_, mmat_;
};

/// Minimizes p.objective over the box [lower, upper] starting from x0
/// (clipped into the box). Iterates never leave the box and the objective
/// never increases across accepted steps.
inline Result minimize(const BoxProblem& p, const Eigen::VectorXd& x0) {
  Solver solver(p);
  return solver.run(x0);
}

}  // namespace cheeger::lbfgsb

#endif  // CHEEGER_LBFGSB_HPP
