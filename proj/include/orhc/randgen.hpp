#pragma once

#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "orhc/digraph.hpp"
#include "orhc/rng.hpp"

namespace orhc {

/// D(n, p): every ordered pair (u, v), u != v, is an edge independently with
/// probability p. Pairs are visited in lexicographic order so the result is a
/// pure function of (n, p, seed).
inline Digraph sample_dnp(std::size_t n, double p, std::uint64_t seed) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("p must lie in [0, 1]");
  Rng rng(seed);
  Digraph d(n);
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = 0; v < n; ++v)
      if (u != v && rng.bernoulli(p)) d.add_edge(u, v);
  return d;
}

/// D(D, p): keep each edge of D independently with probability p.
inline Digraph sample_subdigraph(const Digraph& d, double p, std::uint64_t seed) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("p must lie in [0, 1]");
  Rng rng(seed);
  Digraph out(d.size());
  for (auto e : d.edges())
    if (rng.bernoulli(p)) out.add_edge(e);
  return out;
}

/// Partition E(D) into k parts, each edge landing in a uniformly random part.
inline std::vector<Digraph> split_k(const Digraph& d, std::size_t k, std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  Rng rng(seed);
  std::vector<Digraph> parts(k, Digraph(d.size()));
  for (auto e : d.edges()) parts[rng.below(k)].add_edge(e);
  return parts;
}

/// Removes `count` uniformly random permutations' worth of edges v -> pi(v)
/// (fixed points skipped), so every vertex loses at most `count` out- and
/// `count` in-neighbours.
inline Digraph remove_random_permutations(Digraph d, std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Vertex> perm(d.size());
  for (std::size_t r = 0; r < count; ++r) {
    for (Vertex v = 0; v < d.size(); ++v) perm[v] = v;
    rng.shuffle(std::span<Vertex>(perm));
    for (Vertex v = 0; v < d.size(); ++v)
      if (perm[v] != v) d.remove_edge(v, perm[v]);
  }
  return d;
}

/// Lazily revealed D(n, p_ex). Each directed pair gets exactly one coin, drawn
/// on first query and memoized; later queries return the stored outcome.
/// Single-owner: not safe for concurrent use.
class ExposureOracle {
 public:
  struct Outcome {
    bool present;
    bool fresh;  // true when this query drew the coin
  };

  ExposureOracle(double p_ex, std::uint64_t seed, std::uint64_t stream = 0) : p_ex_(p_ex), rng_(seed, stream) {
    if (p_ex < 0.0 || p_ex > 1.0) throw std::invalid_argument("p_ex must lie in [0, 1]");
  }

  double p_ex() const { return p_ex_; }

  Outcome query(Vertex u, Vertex v) {
    if (u == v) throw std::invalid_argument("cannot expose a self-pair");
    auto [it, inserted] = outcomes_.try_emplace(key(u, v), false);
    if (inserted) it->second = rng_.bernoulli(p_ex_);
    return {it->second, inserted};
  }

  bool expose(Vertex u, Vertex v) { return query(u, v).present; }

  /// Number of distinct pairs whose coin has been drawn.
  std::size_t size() const { return outcomes_.size(); }

  bool known(Vertex u, Vertex v) const { return outcomes_.contains(key(u, v)); }

  /// Memoized outcomes that came up true, as a digraph on n vertices.
  Digraph revealed(std::size_t n) const {
    Digraph d(n);
    for (auto [k, present] : outcomes_)
      if (present) d.add_edge(static_cast<Vertex>(k >> 32), static_cast<Vertex>(k & 0xffffffffU));
    return d;
  }

 private:
  static std::uint64_t key(Vertex u, Vertex v) { return (std::uint64_t{u} << 32) | v; }

  double p_ex_;
  Rng rng_;
  std::unordered_map<std::uint64_t, bool> outcomes_;
};

}  // namespace orhc
