#ifndef CHEEGER_GRAPH_HPP
#define CHEEGER_GRAPH_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace cheeger {

/// Simple undirected graph with 0-indexed vertices.
///
/// Edges are stored canonically as (u, v) with u < v, sorted and unique.
/// Construction rejects self-loops, parallel edges and graphs with fewer
/// than three vertices.
class Graph {
 public:
  using Edge = std::pair<int, int>;

  Graph(int n, std::vector<Edge> edges) : n_(n) {
    if (n < 3) throw std::invalid_argument("graph needs at least 3 vertices");
    edges_.reserve(edges.size());
    for (auto [u, v] : edges) {
      if (u < 0 || v < 0 || u >= n || v >= n)
        throw std::invalid_argument("edge endpoint out of range");
      if (u == v) throw std::invalid_argument("self-loop");
      edges_.emplace_back(std::min(u, v), std::max(u, v));
    }
    std::sort(edges_.begin(), edges_.end());
    if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
      throw std::invalid_argument("duplicate edge");
  }

  int num_vertices() const { return n_; }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }

  std::vector<int> degrees() const {
    std::vector<int> deg(n_, 0);
    for (auto [u, v] : edges_) {
      ++deg[u];
      ++deg[v];
    }
    return deg;
  }

  std::vector<std::vector<int>> adjacency() const {
    std::vector<std::vector<int>> adj(n_);
    for (auto [u, v] : edges_) {
      adj[u].push_back(v);
      adj[v].push_back(u);
    }
    for (auto& row : adj) std::sort(row.begin(), row.end());
    return adj;
  }

  bool is_connected() const {
    auto adj = adjacency();
    std::vector<char> seen(n_, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int w : adj[v]) {
        if (!seen[w]) {
          seen[w] = 1;
          ++count;
          stack.push_back(w);
        }
      }
    }
    return count == n_;
  }

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  int n_;
  std::vector<Edge> edges_;
};

/// Dense graph Laplacian: degree on the diagonal, -1 for every edge.
inline Eigen::MatrixXd laplacian(const Graph& g) {
  const int n = g.num_vertices();
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (auto [u, v] : g.edges()) {
    L(u, v) = -1.0;
    L(v, u) = -1.0;
    L(u, u) += 1.0;
    L(v, v) += 1.0;
  }
  return L;
}

// ---------------------------------------------------------------------------
// File formats
// ---------------------------------------------------------------------------

enum class GraphFormat { EdgeList, Metis };

enum class ParseErrorKind {
  MalformedHeader,
  MalformedLine,
  VertexOutOfRange,
  SelfLoop,
  DuplicateEdge,
  TooFewVertices,
  EdgeCountMismatch,
  AsymmetricAdjacency,
};

inline const char* to_string(ParseErrorKind kind) {
  switch (kind) {
    case ParseErrorKind::MalformedHeader: return "malformed header";
    case ParseErrorKind::MalformedLine: return "malformed line";
    case ParseErrorKind::VertexOutOfRange: return "vertex index out of range";
    case ParseErrorKind::SelfLoop: return "self-loop";
    case ParseErrorKind::DuplicateEdge: return "duplicate edge";
    case ParseErrorKind::TooFewVertices: return "fewer than 3 vertices";
    case ParseErrorKind::EdgeCountMismatch: return "edge count does not match header";
    case ParseErrorKind::AsymmetricAdjacency: return "adjacency lists are not symmetric";
  }
  return "parse error";
}

class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, int line, const std::string& detail)
      : std::runtime_error("line " + std::to_string(line) + ": " + to_string(kind) +
                           (detail.empty() ? "" : " (" + detail + ")")),
        kind_(kind),
        line_(line) {}

  ParseErrorKind kind() const { return kind_; }
  int line() const { return line_; }

 private:
  ParseErrorKind kind_;
  int line_;
};

namespace detail {

inline bool is_comment(std::string_view line) {
  auto pos = line.find_first_not_of(" \t\r");
  return pos != std::string_view::npos && (line[pos] == '%' || line[pos] == '#');
}

inline bool is_blank(std::string_view line) {
  return line.find_first_not_of(" \t\r") == std::string_view::npos;
}

// Parses all whitespace separated integers; nullopt if any token is not one.
inline std::optional<std::vector<long long>> parse_ints(const std::string& line) {
  std::istringstream in(line);
  std::vector<long long> out;
  std::string tok;
  while (in >> tok) {
    std::size_t used = 0;
    long long value = 0;
    try {
      value = std::stoll(tok, &used);
    } catch (const std::exception&) {
      return std::nullopt;
    }
    if (used != tok.size()) return std::nullopt;
    out.push_back(value);
  }
  return out;
}

struct Header {
  int n = 0;
  long long m = 0;
  int line = 0;
};

inline Header parse_header(const std::vector<long long>& nums, int line, bool allow_fmt) {
  if (nums.size() < 2 || nums.size() > (allow_fmt ? 3u : 2u))
    throw ParseError(ParseErrorKind::MalformedHeader, line, "expected \"n m\"");
  if (nums[0] < 0 || nums[1] < 0)
    throw ParseError(ParseErrorKind::MalformedHeader, line, "negative count");
  if (nums.size() == 3 && nums[2] != 0)
    throw ParseError(ParseErrorKind::MalformedHeader, line, "weighted METIS graphs are not supported");
  if (nums[0] < 3) throw ParseError(ParseErrorKind::TooFewVertices, line, "n = " + std::to_string(nums[0]));
  if (nums[0] > 1'000'000'000)
    throw ParseError(ParseErrorKind::MalformedHeader, line, "vertex count too large");
  return {static_cast<int>(nums[0]), nums[1], line};
}

}  // namespace detail

/// Edge list: header "n m", then m lines "i j" with 1-indexed endpoints.
/// Blank lines and lines starting with '%' or '#' are skipped.
inline Graph parse_edge_list(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  std::optional<detail::Header> header;
  std::set<Graph::Edge> seen;
  std::vector<Graph::Edge> edges;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::is_blank(line) || detail::is_comment(line)) continue;
    auto nums = detail::parse_ints(line);
    if (!header) {
      if (!nums) throw ParseError(ParseErrorKind::MalformedHeader, lineno, "non-integer token");
      header = detail::parse_header(*nums, lineno, false);
      continue;
    }
    if (!nums || nums->size() != 2)
      throw ParseError(ParseErrorKind::MalformedLine, lineno, "expected \"i j\"");
    long long a = (*nums)[0], b = (*nums)[1];
    if (a < 1 || a > header->n || b < 1 || b > header->n)
      throw ParseError(ParseErrorKind::VertexOutOfRange, lineno, line);
    if (a == b) throw ParseError(ParseErrorKind::SelfLoop, lineno, line);
    Graph::Edge e{static_cast<int>(std::min(a, b)) - 1, static_cast<int>(std::max(a, b)) - 1};
    if (!seen.insert(e).second) throw ParseError(ParseErrorKind::DuplicateEdge, lineno, line);
    edges.push_back(e);
  }
  if (!header) throw ParseError(ParseErrorKind::MalformedHeader, lineno, "missing header");
  if (static_cast<long long>(edges.size()) != header->m)
    throw ParseError(ParseErrorKind::EdgeCountMismatch, lineno,
                     "header says " + std::to_string(header->m) + ", found " + std::to_string(edges.size()));
  return Graph(header->n, std::move(edges));
}

/// METIS adjacency format: header "n m [fmt]" then one line per vertex listing
/// its 1-indexed neighbours. Every edge must appear in both endpoint lines.
/// Only '%' comment lines are skipped; blank lines are isolated vertices.
inline Graph parse_metis(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  std::optional<detail::Header> header;
  std::vector<std::vector<int>> adj;
  std::vector<int> adj_line;
  while (std::getline(in, line)) {
    ++lineno;
    auto first = line.find_first_not_of(" \t\r");
    if (first != std::string::npos && line[first] == '%') continue;
    if (!header) {
      if (detail::is_blank(line)) continue;
      auto nums = detail::parse_ints(line);
      if (!nums) throw ParseError(ParseErrorKind::MalformedHeader, lineno, "non-integer token");
      header = detail::parse_header(*nums, lineno, true);
      adj.reserve(header->n);
      continue;
    }
    if (static_cast<int>(adj.size()) == header->n) {
      if (detail::is_blank(line)) continue;
      throw ParseError(ParseErrorKind::MalformedLine, lineno, "more vertex lines than n");
    }
    auto nums = detail::parse_ints(line);
    if (!nums) throw ParseError(ParseErrorKind::MalformedLine, lineno, "non-integer token");
    const int v = static_cast<int>(adj.size());
    std::vector<int> row;
    for (long long w : *nums) {
      if (w < 1 || w > header->n) throw ParseError(ParseErrorKind::VertexOutOfRange, lineno, std::to_string(w));
      if (w - 1 == v) throw ParseError(ParseErrorKind::SelfLoop, lineno, std::to_string(w));
      row.push_back(static_cast<int>(w) - 1);
    }
    std::vector<int> sorted = row;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw ParseError(ParseErrorKind::DuplicateEdge, lineno, "repeated neighbour");
    adj.push_back(std::move(sorted));
    adj_line.push_back(lineno);
  }
  if (!header) throw ParseError(ParseErrorKind::MalformedHeader, lineno, "missing header");
  // Trailing isolated vertices may be omitted by some writers.
  while (static_cast<int>(adj.size()) < header->n) {
    adj.emplace_back();
    adj_line.push_back(lineno);
  }

  std::vector<Graph::Edge> edges;
  for (int v = 0; v < header->n; ++v) {
    for (int w : adj[v]) {
      if (!std::binary_search(adj[w].begin(), adj[w].end(), v))
        throw ParseError(ParseErrorKind::AsymmetricAdjacency, adj_line[v],
                         std::to_string(v + 1) + " -> " + std::to_string(w + 1));
      if (v < w) edges.emplace_back(v, w);
    }
  }
  if (static_cast<long long>(edges.size()) != header->m)
    throw ParseError(ParseErrorKind::EdgeCountMismatch, lineno,
                     "header says " + std::to_string(header->m) + ", found " + std::to_string(edges.size()));
  return Graph(header->n, std::move(edges));
}

inline Graph parse_graph(std::string_view text, GraphFormat format) {
  return format == GraphFormat::Metis ? parse_metis(text) : parse_edge_list(text);
}

inline std::string write_edge_list(const Graph& g) {
  std::ostringstream out;
  out << g.num_vertices() << ' ' << g.num_edges() << '\n';
  for (auto [u, v] : g.edges()) out << u + 1 << ' ' << v + 1 << '\n';
  return out.str();
}

inline std::string write_metis(const Graph& g) {
  std::ostringstream out;
  out << g.num_vertices() << ' ' << g.num_edges() << '\n';
  for (const auto& row : g.adjacency()) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? " " : "") << row[i] + 1;
    out << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Test families
// ---------------------------------------------------------------------------

inline Graph cycle_graph(int n) {
  if (n < 3) throw std::invalid_argument("cycle needs n >= 3");
  std::vector<Graph::Edge> e;
  for (int i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
  return Graph(n, std::move(e));
}

inline Graph path_graph(int n) {
  if (n < 3) throw std::invalid_argument("path needs n >= 3");
  std::vector<Graph::Edge> e;
  for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return Graph(n, std::move(e));
}

inline Graph complete_graph(int n) {
  if (n < 3) throw std::invalid_argument("complete graph needs n >= 3");
  std::vector<Graph::Edge> e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return Graph(n, std::move(e));
}

inline Graph complete_bipartite_graph(int a, int b) {
  if (a < 1 || b < 1 || a + b < 3) throw std::invalid_argument("complete bipartite needs a, b >= 1 and a + b >= 3");
  std::vector<Graph::Edge> e;
  for (int i = 0; i < a; ++i)
    for (int j = 0; j < b; ++j) e.emplace_back(i, a + j);
  return Graph(a + b, std::move(e));
}

/// Erdos-Renyi G(n, p). Uses raw 64-bit draws so samples are identical
/// across standard library implementations.
inline Graph gnp_graph(int n, double p, std::uint64_t seed) {
  if (n < 3) throw std::invalid_argument("gnp needs n >= 3");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("gnp needs p in [0, 1]");
  std::mt19937_64 rng(seed);
  std::vector<Graph::Edge> e;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      if (u < p) e.emplace_back(i, j);
    }
  }
  return Graph(n, std::move(e));
}

/// G(n, p) sample, or nullopt when the sample is disconnected.
inline std::optional<Graph> connected_gnp_graph(int n, double p, std::uint64_t seed) {
  Graph g = gnp_graph(n, p, seed);
  if (!g.is_connected()) return std::nullopt;
  return g;
}

enum class GraphFamily { Cycle, Path, Complete, CompleteBipartite, Gnp };

struct FamilyParams {
  int n = 0;
  int n2 = 0;  // second side for complete-bipartite
  double p = 0.5;
  std::uint64_t seed = 0;
};

/// Dispatches to the family constructors. For Gnp, returns nullopt on a
/// disconnected sample; the other families always return a graph.
inline std::optional<Graph> generate_family(GraphFamily family, const FamilyParams& params) {
  switch (family) {
    case GraphFamily::Cycle: return cycle_graph(params.n);
    case GraphFamily::Path: return path_graph(params.n);
    case GraphFamily::Complete: return complete_graph(params.n);
    case GraphFamily::CompleteBipartite: return complete_bipartite_graph(params.n, params.n2);
    case GraphFamily::Gnp: return connected_gnp_graph(params.n, params.p, params.seed);
  }
  throw std::invalid_argument("unknown graph family");
}

}  // namespace cheeger

#endif  // CHEEGER_GRAPH_HPP
