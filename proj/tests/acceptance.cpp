// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cheeger/cheeger.hpp"
#include "test_support.hpp"

using namespace cheeger;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double max_abs(const Eigen::MatrixXd& a) { return a.size() ? a.cwiseAbs().maxCoeff() : 0.0; }

int failures = 0;

void report(int id, const char* title, bool ok, const std::string& detail) {
  std::printf("[%s] %2d %-28s %s\n", ok ? "PASS" : "FAIL", id, title, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// ---------------------------------------------------------------------------
// Corpus
// ---------------------------------------------------------------------------

struct CorpusGraph {
  std::string name;
  Graph graph;
  double exact = 0.0;
};

std::vector<CorpusGraph> build_corpus() {
  std::vector<CorpusGraph> out;
  auto add = [&](std::string name, Graph g) {
    const double h = exact_edge_expansion(g).value;
    out.push_back({std::move(name), std::move(g), h});
  };
  for (int n = 4; n <= 12; n += 2) add("cycle-" + std::to_string(n), cycle_graph(n));
  for (int n = 5; n <= 11; n += 2) add("cycle-" + std::to_string(n), cycle_graph(n));
  for (int n = 4; n <= 12; n += 2) add("path-" + std::to_string(n), path_graph(n));
  for (int n = 4; n <= 12; n += 2) add("complete-" + std::to_string(n), complete_graph(n));
  for (int n : {5, 7}) add("complete-" + std::to_string(n), complete_graph(n));
  for (auto [a, b] : std::vector<std::pair<int, int>>{{2, 3}, {3, 3}, {2, 6}, {4, 5}, {3, 7}, {6, 6}})
    add("bipartite-" + std::to_string(a) + "-" + std::to_string(b), complete_bipartite_graph(a, b));
  int taken = 0;
  for (std::uint64_t seed = 1; taken < 12; ++seed) {
    const int n = 6 + static_cast<int>(seed % 7);
    if (auto g = connected_gnp_graph(n, 0.5, seed)) {
      add("gnp-" + std::to_string(n) + "-s" + std::to_string(seed), std::move(*g));
      ++taken;
    }
  }
  return out;
}

struct Runs {
  SolveResult basic;
  SolveResult dnnp;      // no cuts, no diagonal constraints
  SolveResult dnnp_y1;   // no cuts, diag(Y11) = y1
  SolveResult dnnpfrc;   // cuts
  // Same as above with a tight inner tolerance, so the primal iterate
  // converges along with the dual.
  SolveResult dnnp_y1_tight;
  SolveResult dnnpfrc_tight;
  double seconds = 0.0;
};

// Inner relative-reduction tolerance for primal feasibility checks.
constexpr double kTightFactr = 1e2;

Runs run_all(const Graph& g) {
  const auto t0 = Clock::now();
  Runs r;
  SolverConfig cfg;
  r.basic = solve_basic(g, cfg);
  SolverConfig nocuts = cfg;
  nocuts.cut_batch = 0;
  r.dnnp = solve(g, nocuts);
  nocuts.diag_mode = DiagMode::Y1Only;
  r.dnnp_y1 = solve(g, nocuts);
  r.dnnpfrc = solve(g, cfg);
  nocuts.inner.factr = kTightFactr;
  r.dnnp_y1_tight = solve(g, nocuts);
  SolverConfig tight = cfg;
  tight.inner.factr = kTightFactr;
  r.dnnpfrc_tight = solve(g, tight);
  r.seconds = seconds_since(t0);
  return r;
}

// ---------------------------------------------------------------------------
// Criteria
// ---------------------------------------------------------------------------

void kernel_correctness() {
  const auto t0 = Clock::now();
  double worst_mw = 0.0, worst_orth = 0.0;
  for (int n = 3; n <= 60; ++n) {
    const auto m = build_model(cycle_graph(n));
    worst_mw = std::max(worst_mw, max_abs(m.M * m.W));
    worst_orth = std::max(worst_orth, max_abs(m.W.transpose() * m.W - Eigen::MatrixXd::Identity(n + 1, n + 1)));
  }
  const double t = seconds_since(t0);
  report(1, "kernel basis", worst_mw <= 1e-10 && worst_orth <= 1e-10 && t < 5.0,
         "max|MW|=" + fmt("%.2e", worst_mw) + " max|W'W-I|=" + fmt("%.2e", worst_orth) + " time=" + fmt("%.2fs", t));
}

void face_equivalence() {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> size(3, 12);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = size(rng);
    const auto m = build_model(path_graph(n));
    const Eigen::MatrixXd yt = lift(m, fixtures::random_psd(n + 1, rng));
    const int k = 2 * n + 2;
    const Eigen::MatrixXd y = yt.topLeftCorner(k, k);
    const Eigen::VectorXd col = yt.col(k).head(k);
    const double rho = yt(k, k);
    worst = std::max(worst, max_abs(m.C * col - rho * m.d));
    worst = std::max(worst, max_abs((m.C * y * m.C.transpose()).diagonal() - rho * m.d.cwiseAbs2()));
    worst = std::max(worst, max_abs(m.M * yt * m.M.transpose()));
    worst = std::max(worst, max_abs(m.M * yt));
  }
  report(2, "face equivalence", worst <= 1e-8, "100 samples, max residual=" + fmt("%.2e", worst));
}

struct RandomDualFixture {
  ConicProblem problem;
  std::vector<LinearFunctional> ineq;
};

RandomDualFixture dual_fixture(int n, std::uint64_t seed) {
  RandomDualFixture f{lifted_problem(build_model(gnp_graph(n, 0.5, seed))), {}};
  CutPool pool(n);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> vertex(0, n - 1);
  while (static_cast<int>(pool.size()) < 2 * n) {
    int i = vertex(rng), j = vertex(rng), k = vertex(rng);
    if (j > k) std::swap(j, k);
    if (Cut c{i, j, k}; c.valid(n)) pool.add(c);
  }
  f.ineq = inequality_rows(f.problem, pool);
  return f;
}

Eigen::VectorXd random_packed(const RandomDualFixture& f, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Eigen::Index p = f.problem.num_equalities(), q = static_cast<Eigen::Index>(f.ineq.size());
  Eigen::VectorXd x(packed_size(p, q, f.problem.lifted_dim()));
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = i < p ? normal(rng) : (i < p + q ? unit(rng) : 0.3 * unit(rng));
  return x;
}

void gradient_check() {
  double worst = 0.0;
  for (int n : {4, 8, 12}) {
    const auto f = dual_fixture(n, 100 + n);
    std::mt19937_64 rng(n);
    for (int trial = 0; trial < 20; ++trial) {
      const Eigen::MatrixXd r = fixtures::random_psd(n + 1, rng);
      const double alpha = 0.5;
      const Eigen::VectorXd x = random_packed(f, rng);
      Eigen::VectorXd g, scratch;
      eval_F_alpha_packed(f.problem, f.ineq, r, alpha, x, g);
      Eigen::VectorXd fd(x.size());
      const double h = 1e-6;
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        Eigen::VectorXd xp = x, xm = x;
        xp(i) += h;
        xm(i) -= h;
        fd(i) = (eval_F_alpha_packed(f.problem, f.ineq, r, alpha, xp, scratch) -
                 eval_F_alpha_packed(f.problem, f.ineq, r, alpha, xm, scratch)) /
                (2.0 * h);
      }
      worst = std::max(worst, (g - fd).norm() / std::max(1.0, fd.norm()));
    }
  }
  report(3, "gradient", worst <= 1e-5, "60 points, max relative error=" + fmt("%.2e", worst));
}

void concavity_check() {
  const auto f = dual_fixture(8, 7);
  std::mt19937_64 rng(77);
  double worst = -1e300;
  for (int pair = 0; pair < 50; ++pair) {
    const Eigen::MatrixXd r = fixtures::random_psd(9, rng);
    const Eigen::VectorXd a = random_packed(f, rng), b = random_packed(f, rng);
    Eigen::VectorXd g;
    const double fa = eval_F_alpha_packed(f.problem, f.ineq, r, 0.3, a, g);
    const double fb = eval_F_alpha_packed(f.problem, f.ineq, r, 0.3, b, g);
    const double fm = eval_F_alpha_packed(f.problem, f.ineq, r, 0.3, 0.5 * (a + b), g);
    worst = std::max(worst, 0.5 * (fa + fb) - fm);
  }
  report(4, "concavity", worst <= 1e-9, "50 pairs, max midpoint excess=" + fmt("%.2e", worst));
}

// Feasibility of (Y11, y1, rho) for the basic relaxation; returns the worst
// violation.
double basic_violation(const LiftedBlocks& b) {
  const int n = b.n();
  const double k = n / 2;
  Eigen::MatrixXd small(n + 1, n + 1);
  small.topLeftCorner(n, n) = b.Y11();
  small.col(n).head(n) = b.y1();
  small.row(n).head(n) = b.y1().transpose();
  small(n, n) = b.rho();
  double v = std::max(0.0, -eigh(small).values(0));
  v = std::max(v, std::max(0.0, -small.minCoeff()));
  v = std::max(v, std::abs(b.y1().sum() - 1.0));
  v = std::max(v, max_abs(b.Y11().diagonal() - b.y1()));
  v = std::max(v, std::max(0.0, 1.0 / k - b.rho()));
  v = std::max(v, std::max(0.0, b.rho() - 1.0));
  const double total = b.Y11().sum();
  v = std::max(v, std::max(0.0, 1.0 - total));
  v = std::max(v, std::max(0.0, total - k));
  return v;
}

// Identities and bounds every feasible lifted matrix satisfies; returns the
// worst violation.
double lifted_violation(const LiftedBlocks& b) {
  const int n = b.n();
  const double k = n / 2;
  const double rho = b.rho();
  const Eigen::VectorXd e = Eigen::VectorXd::Ones(n);
  const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(n, n);
  double v = 0.0;
  auto above = [&](double value, double bound) { v = std::max(v, value - bound); };
  auto equal = [&](double a, double c) { v = std::max(v, std::abs(a - c)); };
  // Equality constraints of the model.
  equal(b.y1().sum(), 1.0);
  v = std::max(v, max_abs(b.Y12().diagonal()));
  // rho bounds and last-column identities.
  above(1.0 / k, rho);
  above(rho, 1.0);
  above(b.y1().maxCoeff(), rho);
  above(b.y2().maxCoeff(), rho);
  v = std::max(v, max_abs(b.y2() - (rho * e - b.y1())));
  equal(b.y3(), rho * k - 1.0);
  equal(b.y4(), 1.0 - rho);
  // Block sums.
  v = std::max(v, max_abs(b.Y11() + b.Y21() - e * b.y1().transpose()));
  v = std::max(v, max_abs(b.Y22() + b.Y12() - e * b.y2().transpose()));
  // Sum of Y11.
  above(1.0, b.Y11().sum());
  above(b.Y11().sum(), k);
  // Entry upper bounds.
  above(b.y3(), k - 1.0);
  above(b.y4(), 1.0 - 1.0 / k);
  above(b.Y33(), k * k - k);
  above(b.Y44(), k - 1.0);
  above(b.Y34(), k - 1.0);
  above(b.Y13().maxCoeff(), k - 1.0);
  above(b.Y23().maxCoeff(), k - 1.0);
  above(b.Y14().maxCoeff(), 1.0 - 1.0 / k);
  above(b.Y24().maxCoeff(), 1.0 - 1.0 / k);
  // Y22 in terms of Y11.
  v = std::max(v, max_abs(b.Y22() - (b.Y11() + rho * ones - e * b.y1().transpose() - b.y1() * e.transpose())));
  // Implied triangle families over the first 2n indices.
  const Eigen::MatrixXd yy = b.Y().topLeftCorner(2 * n, 2 * n);
  const Eigen::VectorXd yv = b.y().head(2 * n);
  for (int i = 0; i < 2 * n; ++i) {
    for (int j = 0; j < 2 * n; ++j) {
      if (i == j) continue;
      above(yy(i, j), yv(i));
      above(yv(i) + yv(j) - yy(i, j), rho);
    }
  }
  // Entrywise non-negativity.
  above(0.0, b.full().minCoeff());
  return v;
}

}  // namespace

int main() {
  kernel_correctness();
  face_equivalence();
  gradient_check();
  concavity_check();

  const auto corpus = build_corpus();
  std::vector<Runs> runs;
  const auto t_corpus = Clock::now();
  int run_errors = 0;
  for (const auto& c : corpus) {
    try {
      runs.push_back(run_all(c.graph));
    } catch (const std::exception& e) {
      std::printf("  solver error on %s: %s\n", c.name.c_str(), e.what());
      ++run_errors;
      runs.emplace_back();
    }
  }
  const double corpus_time = seconds_since(t_corpus);

  // 5: validity.
  {
    double worst = -1e300;
    std::string where;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      for (const SolveResult* r : {&runs[i].basic, &runs[i].dnnp, &runs[i].dnnp_y1, &runs[i].dnnpfrc,
                                    &runs[i].dnnp_y1_tight, &runs[i].dnnpfrc_tight}) {
        const double excess = r->certificate.certified_lb - corpus[i].exact;
        if (excess > worst) {
          worst = excess;
          where = corpus[i].name;
        }
      }
    }
    const bool ok = run_errors == 0 && corpus.size() >= 30 && worst <= 1e-9 && corpus_time < 600.0;
    report(5, "validity", ok,
           std::to_string(corpus.size()) + " graphs, max(LB-h)=" + fmt("%.2e", worst) + " (" + where +
               "), corpus time=" + fmt("%.1fs", corpus_time));
  }

  // 6: dominance over the basic relaxation.
  {
    double worst_gap = 1e300, worst_feas = 0.0, loose_feas = 0.0;
    std::string where;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      const double d = runs[i].dnnp_y1.certificate.certified_lb - runs[i].basic.certificate.certified_lb;
      if (d < worst_gap) {
        worst_gap = d;
        where = corpus[i].name;
      }
      const int n = corpus[i].graph.num_vertices();
      if (runs[i].dnnp_y1_tight.primal.Y.size())
        worst_feas = std::max(worst_feas, basic_violation(LiftedBlocks(runs[i].dnnp_y1_tight.primal.Y, n)));
      if (runs[i].dnnp_y1.primal.Y.size())
        loose_feas = std::max(loose_feas, basic_violation(LiftedBlocks(runs[i].dnnp_y1.primal.Y, n)));
    }
    report(6, "dominance", run_errors == 0 && worst_gap >= -1e-3 && worst_feas <= 1e-3,
           "min(LB_y1 - LB_basic)=" + fmt("%.2e", worst_gap) + " (" + where + "), basic feasibility=" +
               fmt("%.2e", worst_feas) + " (default inner tolerance: " + fmt("%.2e", loose_feas) + ")");
  }

  // 7: feasibility identities of converged primals with cuts.
  {
    double worst = 0.0, loose = 0.0;
    std::string where;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      const int n = corpus[i].graph.num_vertices();
      if (runs[i].dnnpfrc.primal.Y.size())
        loose = std::max(loose, lifted_violation(LiftedBlocks(runs[i].dnnpfrc.primal.Y, n)));
      if (!runs[i].dnnpfrc_tight.primal.Y.size()) continue;
      const double v = lifted_violation(LiftedBlocks(runs[i].dnnpfrc_tight.primal.Y, n));
      if (v > worst) {
        worst = v;
        where = corpus[i].name;
      }
    }
    report(7, "primal feasibility", run_errors == 0 && worst <= 1e-3,
           "max violation=" + fmt("%.2e", worst) + (where.empty() ? "" : " (" + where + ")") +
               " (default inner tolerance: " + fmt("%.2e", loose) + ")");
  }

  // 8: effect of cuts.
  {
    double worst = 1e300, best = -1e300;
    std::string best_at;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      const double d = runs[i].dnnpfrc.certificate.certified_lb - runs[i].dnnp.certificate.certified_lb;
      worst = std::min(worst, d);
      if (d > best) {
        best = d;
        best_at = corpus[i].name;
      }
    }
    report(8, "cut effect", run_errors == 0 && worst >= -1e-3 && best > 0.01,
           "min(LB_cuts - LB_nocuts)=" + fmt("%.2e", worst) + ", max improvement=" + fmt("%.3f", best) + " (" +
               best_at + ")");
  }

  // 9: post-processing.
  {
    double worst = 0.0;
    for (const auto& r : runs)
      for (const SolveResult* s : {&r.basic, &r.dnnp, &r.dnnp_y1, &r.dnnpfrc})
        worst = std::max(worst, std::abs(s->certificate.correction));
    // Synthetic dual of the basic relaxation of C5 with Zt = Diag(L + 2I, 3).
    const auto p = basic_problem(cycle_graph(5));
    Eigen::VectorXd nu = Eigen::VectorXd::Constant(6, -2.0);
    nu(0) = -5.0;
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(4);
    mu(1) = 3.0;
    const auto c = certify(p, p.inequalities, nu, mu, Eigen::MatrixXd::Zero(6, 6));
    const bool exact = c.certified_lb == p.b.dot(nu) && c.correction == 0.0;
    report(9, "post-processing", run_errors == 0 && worst < 0.01 && exact,
           "max|correction|=" + fmt("%.2e", worst) + ", psd residual gives b'nu exactly: " + (exact ? "yes" : "no"));
  }

  // 10: scale.
  {
    std::optional<Graph> g;
    std::uint64_t seed = 1;
    for (; !g; ++seed) g = connected_gnp_graph(50, 0.2, seed);
    const auto t0 = Clock::now();
    bool ok = false;
    std::string detail;
    try {
      const auto res = solve(*g, SolverConfig{});
      const double t = seconds_since(t0);
      ok = std::isfinite(res.certificate.certified_lb) && t < 300.0;
      detail = "G(50,0.2) seed " + std::to_string(seed - 1) + ": LB=" + fmt("%.4f", res.certificate.certified_lb) +
               " cuts=" + std::to_string(res.pool.size()) + " iterations=" + std::to_string(res.iterations) +
               " time=" + fmt("%.1fs", t);
    } catch (const std::exception& e) {
      detail = std::string("solver error: ") + e.what();
    }
    report(10, "scale", ok, detail);
  }

  std::printf("%s: %d criterion(s) failed\n", failures ? "FAILED" : "OK", failures);
  return failures ? 1 : 0;
}
