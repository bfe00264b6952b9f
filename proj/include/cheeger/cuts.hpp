#ifndef CHEEGER_CUTS_HPP
#define CHEEGER_CUTS_HPP

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <tuple>
#include <unordered_set>
#include <vector>

#include <Eigen/Core>

#include "cheeger/model.hpp"

namespace cheeger {

/// Scaled triangle inequality on the Y11 block of the lifted matrix:
///   Y_ij + Y_ik - Y_jk - y_i <= 0,   i not in {j, k}, j < k (0-indexed).
struct Cut {
  int i;
  int j;
  int k;

  friend auto operator<=>(const Cut&, const Cut&) = default;

  bool valid(int n) const { return i >= 0 && j >= 0 && k >= 0 && i < n && j < n && k < n && j < k && i != j && i != k; }

  /// Functional B with B(Y~) = Y_ij + Y_ik - Y_jk - Y(i, rho).
  LinearFunctional functional(int rho_index) const {
    LinearFunctional f;
    f.add(i, j, 1.0).add(i, k, 1.0).add(j, k, -1.0).add(i, rho_index, -1.0);
    return f;
  }
};

/// Positive means violated. `rho_index` locates rho in the lifted matrix;
/// the Y11 block always starts at (0, 0).
inline double violation(const Cut& c, const Eigen::MatrixXd& y, int n, int rho_index) {
  if (!c.valid(n) || rho_index >= y.rows()) throw std::out_of_range("cut index out of range");
  return y(c.i, c.j) + y(c.i, c.k) - y(c.j, c.k) - y(c.i, rho_index);
}

inline double violation(const Cut& c, const LiftedBlocks& blocks) {
  return violation(c, blocks.full(), blocks.n(), 2 * blocks.n() + 2);
}

class CutPool {
 public:
  explicit CutPool(int n = 0) : n_(n) {}

  int n() const { return n_; }
  std::size_t size() const { return cuts_.size(); }
  bool empty() const { return cuts_.empty(); }
  const std::vector<Cut>& cuts() const { return cuts_; }
  const std::vector<double>& multipliers() const { return mu_; }

  bool contains(const Cut& c) const { return keys_.count(key(c)) > 0; }

  /// Adds a cut with multiplier 0; returns false for duplicates.
  bool add(const Cut& c, double mu = 0.0) {
    if (!c.valid(n_)) throw std::out_of_range("cut index out of range");
    if (mu < 0.0) throw std::invalid_argument("negative cut multiplier");
    if (!keys_.insert(key(c)).second) return false;
    cuts_.push_back(c);
    mu_.push_back(mu);
    return true;
  }

  void set_multipliers(const std::vector<double>& mu) {
    if (mu.size() != cuts_.size()) throw std::invalid_argument("multiplier count mismatch");
    for (double v : mu)
      if (v < 0.0) throw std::invalid_argument("negative cut multiplier");
    mu_ = mu;
  }

  /// Drops cuts whose multiplier is below `dual_tol`. Returns the kept mask
  /// over the previous order.
  std::vector<bool> purge(double dual_tol) {
    if (dual_tol < 0.0) throw std::invalid_argument("dual_tol must be non-negative");
    std::vector<bool> keep(cuts_.size());
    std::vector<Cut> cuts;
    std::vector<double> mu;
    for (std::size_t q = 0; q < cuts_.size(); ++q) {
      keep[q] = !(mu_[q] < dual_tol);
      if (keep[q]) {
        cuts.push_back(cuts_[q]);
        mu.push_back(mu_[q]);
      } else {
        keys_.erase(key(cuts_[q]));
      }
    }
    cuts_ = std::move(cuts);
    mu_ = std::move(mu);
    return keep;
  }

 private:
  std::uint64_t key(const Cut& c) const {
    const auto n = static_cast<std::uint64_t>(n_);
    return (static_cast<std::uint64_t>(c.i) * n + static_cast<std::uint64_t>(c.j)) * n + static_cast<std::uint64_t>(c.k);
  }

  int n_;
  std::vector<Cut> cuts_;
  std::vector<double> mu_;
  std::unordered_set<std::uint64_t> keys_;
};

struct ScoredCut {
  Cut cut;
  double violation;

  friend bool operator==(const ScoredCut&, const ScoredCut&) = default;
};

/// Full enumeration of the triangle family over Y11. Returns at most `batch`
/// cuts with violation >= tol that are not yet in `pool`, most violated
/// first, ties broken by (i, j, k).
inline std::vector<ScoredCut> separate(const Eigen::MatrixXd& y, int n, int rho_index, const CutPool& pool, int batch,
                                       double tol) {
  if (batch < 0) throw std::invalid_argument("batch must be non-negative");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  std::vector<ScoredCut> found;
  if (batch == 0) return found;
  for (int i = 0; i < n; ++i) {
    const double yi = y(i, rho_index);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double yij = y(i, j);
      for (int k = j + 1; k < n; ++k) {
        if (k == i) continue;
        const double v = yij + y(i, k) - y(j, k) - yi;
        if (v >= tol) {
          Cut c{i, j, k};
          if (!pool.contains(c)) found.push_back({c, v});
        }
      }
    }
  }
  auto order = [](const ScoredCut& a, const ScoredCut& b) {
    if (a.violation != b.violation) return a.violation > b.violation;
    return a.cut < b.cut;
  };
  if (found.size() > static_cast<std::size_t>(batch)) {
    std::partial_sort(found.begin(), found.begin() + batch, found.end(), order);
    found.resize(batch);
  } else {
    std::sort(found.begin(), found.end(), order);
  }
  return found;
}

inline std::vector<ScoredCut> separate(const LiftedBlocks& blocks, const CutPool& pool, int batch, double tol) {
  return separate(blocks.full(), blocks.n(), 2 * blocks.n() + 2, pool, batch, tol);
}

}  // namespace cheeger

#endif  // CHEEGER_CUTS_HPP
