#ifndef CHEEGER_EXACT_ORACLE_HPP
#define CHEEGER_EXACT_ORACLE_HPP

#include <bit>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "cheeger/graph.hpp"

namespace cheeger {

struct ExactExpansion {
  long long numerator = 0;    // |cut(S)|, reduced
  long long denominator = 1;  // |S|, reduced
  double value = 0.0;
  std::vector<int> subset;  // 0-indexed, sorted
};

inline constexpr int kDefaultOracleCap = 22;

/// Edge expansion by enumeration of all S with 1 <= |S| <= floor(n/2).
/// Ratios are compared exactly; among optimal subsets the one whose sorted
/// vertex list is lexicographically smallest is reported.
inline ExactExpansion exact_edge_expansion(const Graph& g, int cap = kDefaultOracleCap) {
  const int n = g.num_vertices();
  if (n > cap || n > 62) throw std::invalid_argument("graph too large for exact enumeration");

  std::vector<std::uint64_t> adj(n, 0);
  for (auto [u, v] : g.edges()) {
    adj[u] |= std::uint64_t{1} << v;
    adj[v] |= std::uint64_t{1} << u;
  }

  const int half = n / 2;
  const std::uint64_t end = std::uint64_t{1} << n;
  long long best_cut = -1, best_size = 1;
  std::uint64_t best_mask = 0;

  // Lexicographic order on sorted vertex lists, with vertex 0 smallest.
  auto lex_less = [](std::uint64_t a, std::uint64_t b) {
    while (a && b) {
      int ia = std::countr_zero(a), ib = std::countr_zero(b);
      if (ia != ib) return ia < ib;
      a &= a - 1;
      b &= b - 1;
    }
    return a == 0 && b != 0;
  };

  for (std::uint64_t mask = 1; mask < end; ++mask) {
    const int size = std::popcount(mask);
    if (size > half) continue;
    long long cut = 0;
    for (std::uint64_t rest = mask; rest; rest &= rest - 1) {
      cut += std::popcount(adj[std::countr_zero(rest)] & ~mask);
    }
    if (best_cut < 0) {
      best_cut = cut, best_size = size, best_mask = mask;
      continue;
    }
    const long long lhs = cut * best_size, rhs = best_cut * size;
    if (lhs < rhs || (lhs == rhs && lex_less(mask, best_mask))) {
      best_cut = cut, best_size = size, best_mask = mask;
    }
  }

  ExactExpansion out;
  const long long d = std::gcd(best_cut, best_size);
  out.numerator = best_cut / d;
  out.denominator = best_size / d;
  out.value = static_cast<double>(best_cut) / static_cast<double>(best_size);
  for (int v = 0; v < n; ++v)
    if (best_mask >> v & 1) out.subset.push_back(v);
  return out;
}

}  // namespace cheeger

#endif  // CHEEGER_EXACT_ORACLE_HPP
