#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "orhc/bitset.hpp"
#include "orhc/error.hpp"

namespace orhc {

using Vertex = std::uint32_t;

struct Edge {
  Vertex from;
  Vertex to;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Dense simple digraph on [0, n). Out- and in-neighbourhoods are both kept as
/// bitset rows so either direction is an O(n/64) query.
class Digraph {
 public:
  Digraph() = default;
  explicit Digraph(std::size_t n) : n_(n), out_(n, Bitset(n)), in_(n, Bitset(n)) {}

  static Digraph complete(std::size_t n) {
    Digraph d(n);
    for (Vertex v = 0; v < n; ++v) {
      d.out_[v] = Bitset::full(n);
      d.out_[v].reset(v);
      d.in_[v] = d.out_[v];
    }
    d.m_ = n * (n - (n ? 1 : 0));
    return d;
  }

  std::size_t size() const { return n_; }
  std::size_t edge_count() const { return m_; }

  bool has_edge(Vertex u, Vertex v) const { return u != v && out_[u].test(v); }
  bool has_edge(Edge e) const { return has_edge(e.from, e.to); }

  /// Returns false if the edge was already present.
  bool add_edge(Vertex u, Vertex v) {
    check_pair(u, v);
    if (out_[u].test(v)) return false;
    out_[u].set(v);
    in_[v].set(u);
    ++m_;
    return true;
  }
  bool add_edge(Edge e) { return add_edge(e.from, e.to); }

  bool remove_edge(Vertex u, Vertex v) {
    check_pair(u, v);
    if (!out_[u].test(v)) return false;
    out_[u].reset(v);
    in_[v].reset(u);
    --m_;
    return true;
  }
  bool remove_edge(Edge e) { return remove_edge(e.from, e.to); }

  const Bitset& out(Vertex v) const { return out_[v]; }
  const Bitset& in(Vertex v) const { return in_[v]; }
  std::size_t out_degree(Vertex v) const { return out_[v].count(); }
  std::size_t in_degree(Vertex v) const { return in_[v].count(); }

  /// All edges in lexicographic (from, to) order.
  std::vector<Edge> edges() const {
    std::vector<Edge> es;
    es.reserve(m_);
    for (Vertex u = 0; u < n_; ++u)
      out_[u].for_each([&](std::size_t v) { es.push_back({u, static_cast<Vertex>(v)}); });
    return es;
  }

  friend bool operator==(const Digraph& a, const Digraph& b) {
    return a.n_ == b.n_ && a.out_ == b.out_ && a.in_ == b.in_;
  }

 private:
  void check_pair(Vertex u, Vertex v) const {
    if (u >= n_ || v >= n_) throw std::out_of_range("vertex id out of range");
    if (u == v) throw std::invalid_argument("self-loops are not allowed");
  }

  std::size_t n_ = 0;
  std::size_t m_ = 0;
  std::vector<Bitset> out_;
  std::vector<Bitset> in_;
};

/// delta^0(D): min over vertices of min(d+(v), d-(v)).
inline std::size_t semi_degree(const Digraph& d) {
  std::size_t best = d.size();
  for (Vertex v = 0; v < d.size(); ++v) best = std::min({best, d.out_degree(v), d.in_degree(v)});
  return best;
}

inline Digraph from_edges(std::size_t n, const std::vector<Edge>& edges) {
  Digraph d(n);
  for (auto e : edges) d.add_edge(e);
  return d;
}

// Text format: "n m" on the first line, then m lines "u v" for u -> v.

inline void write_digraph(std::ostream& os, const Digraph& d) {
  os << d.size() << ' ' << d.edge_count() << '\n';
  for (auto e : d.edges()) os << e.from << ' ' << e.to << '\n';
}

inline std::string to_text(const Digraph& d) {
  std::ostringstream os;
  write_digraph(os, d);
  return os.str();
}

inline Digraph read_digraph(std::istream& is) {
  std::string line;
  std::size_t lineno = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(is, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };
  auto parse_two = [&](std::uint64_t& a, std::uint64_t& b) {
    std::istringstream ls(line);
    std::string extra;
    if (!(ls >> a >> b) || (ls >> extra)) throw MalformedInput("expected two integers", lineno);
  };

  if (!next_line()) throw MalformedInput("empty digraph file");
  std::uint64_t n = 0, m = 0;
  parse_two(n, m);
  if (m > n * (n ? n - 1 : 0)) throw MalformedInput("edge count exceeds n(n-1)", lineno);
  Digraph d(n);
  for (std::uint64_t i = 0; i < m; ++i) {
    if (!next_line()) throw MalformedInput("expected " + std::to_string(m) + " edges, got " + std::to_string(i), lineno);
    std::uint64_t u = 0, v = 0;
    parse_two(u, v);
    if (u >= n || v >= n) throw MalformedInput("vertex id out of range", lineno);
    if (u == v) throw MalformedInput("self-loop", lineno);
    if (!d.add_edge(static_cast<Vertex>(u), static_cast<Vertex>(v)))
      throw MalformedInput("duplicate edge " + std::to_string(u) + " " + std::to_string(v), lineno);
  }
  if (next_line()) throw MalformedInput("trailing content after edge list", lineno);
  return d;
}

inline Digraph parse_digraph(const std::string& text) {
  std::istringstream is(text);
  return read_digraph(is);
}

inline Digraph load_digraph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_digraph(in);
}

}  // namespace orhc
