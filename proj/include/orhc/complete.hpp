#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "orhc/digraph.hpp"
#include "orhc/error.hpp"
#include "orhc/orientation.hpp"
#include "orhc/rng.hpp"

namespace orhc {

/// Find a sigma-path from a to b through every vertex of `host`.
struct CompletionInstance {
  Digraph host;  // the vertex set W, relabelled to [0, |W|)
  Vertex a = 0;
  Vertex b = 1;
  Orientation sigma;  // |W| - 1 signs

  void validate() const {
    if (host.size() < 2) throw std::invalid_argument("completion needs |W| >= 2");
    if (a >= host.size() || b >= host.size()) throw std::invalid_argument("endpoint out of range");
    if (a == b) throw std::invalid_argument("endpoints must be distinct");
    if (sigma.size() + 1 != host.size()) throw std::invalid_argument("sigma must have |W| - 1 signs");
  }
};

inline constexpr std::size_t kExactPathCap = 24;

namespace detail {

constexpr int sign_index(Sign s) { return s == Sign::plus ? 0 : 1; }

/// Subset DP over up to 23 "free" vertices. reach[mask] holds the free vertices v
/// in mask such that some sigma-walk from the start vertex visits exactly mask
/// and ends at v; the edge into the j-th free vertex (1-based) uses signs[j - 1].
/// start_next[s]: free v with the s-edge (start, v). succ[v][s]: free u with
/// the s-edge (v, u). Only reachable states are expanded.
inline std::vector<std::uint32_t> subset_reach(std::size_t free_count, const std::array<std::uint32_t, 2>& start_next,
                                               const std::vector<std::array<std::uint32_t, 2>>& succ,
                                               const std::vector<int>& signs) {
  const std::uint32_t total = std::uint32_t{1} << free_count;
  const std::uint32_t all = total - 1;
  std::vector<std::uint32_t> reach(total, 0);
  if (free_count == 0) return reach;
  for (std::uint32_t m = start_next[signs[0]] & all; m; m &= m - 1) {
    const std::uint32_t bit = m & (0 - m);
    reach[bit] |= bit;
  }
  for (std::uint32_t mask = 1; mask < all; ++mask) {
    const std::uint32_t r = reach[mask];
    if (!r) continue;
    const int s = signs[static_cast<std::size_t>(std::popcount(mask))];
    const std::uint32_t avail = all & ~mask;
    for (std::uint32_t m = r; m; m &= m - 1) {
      const auto v = static_cast<std::size_t>(std::countr_zero(m));
      for (std::uint32_t nx = succ[v][s] & avail; nx; nx &= nx - 1) {
        const std::uint32_t bit = nx & (0 - nx);
        reach[mask | bit] |= bit;
      }
    }
  }
  return reach;
}

/// Local free-vertex masks for the instance (free = everything but start and end).
struct FreeIndex {
  std::vector<Vertex> vertex_of;  // local index -> host vertex
  std::array<std::uint32_t, 2> start_next{0, 0};
  std::vector<std::array<std::uint32_t, 2>> succ;  // succ[v][s]: free u with the s-edge (v, u)
  std::vector<std::array<std::uint32_t, 2>> pred;  // pred[v][s]: free u with the s-edge (u, v)
};

inline FreeIndex index_free(const Digraph& host, Vertex start, std::optional<Vertex> end) {
  FreeIndex fi;
  for (Vertex v = 0; v < host.size(); ++v)
    if (v != start && (!end || v != *end)) fi.vertex_of.push_back(v);
  const std::size_t f = fi.vertex_of.size();
  fi.pred.assign(f, {0, 0});
  fi.succ.assign(f, {0, 0});
  for (std::size_t i = 0; i < f; ++i) {
    const Vertex v = fi.vertex_of[i];
    if (host.has_edge(start, v)) fi.start_next[0] |= std::uint32_t{1} << i;
    if (host.has_edge(v, start)) fi.start_next[1] |= std::uint32_t{1} << i;
    for (std::size_t j = 0; j < f; ++j) {
      const Vertex u = fi.vertex_of[j];
      if (host.has_edge(u, v)) fi.pred[i][0] |= std::uint32_t{1} << j;
      if (host.has_edge(v, u)) fi.pred[i][1] |= std::uint32_t{1} << j;
      if (host.has_edge(v, u)) fi.succ[i][0] |= std::uint32_t{1} << j;
      if (host.has_edge(u, v)) fi.succ[i][1] |= std::uint32_t{1} << j;
    }
  }
  return fi;
}

}  // namespace detail

/// Exact decision by subset DP anchored at a. Returns a spanning sigma-path from
/// a to b, or nullopt when none exists. Refuses |W| > 24.
inline std::optional<OrientedPath> exact_sigma_path(const CompletionInstance& inst) {
  inst.validate();
  const std::size_t w = inst.host.size();
  if (w > kExactPathCap) throw CapExceeded("exact_sigma_path supports |W| <= 24");
  const auto& h = inst.host;
  const auto& sigma = inst.sigma;

  if (w == 2) {
    if (!h.has_edge(oriented_edge(inst.a, inst.b, sigma[0]))) return std::nullopt;
    return OrientedPath{{inst.a, inst.b}, sigma};
  }

  const auto fi = detail::index_free(h, inst.a, inst.b);
  const std::size_t f = fi.vertex_of.size();
  std::vector<int> signs(f);
  for (std::size_t j = 0; j < f; ++j) signs[j] = detail::sign_index(sigma[j]);
  const auto reach = detail::subset_reach(f, fi.start_next, fi.succ, signs);

  const std::uint32_t full = (std::uint32_t{1} << f) - 1;
  const Sign last = sigma[f];
  Vertex prev_local = 0;
  bool closable = false;
  for (std::uint32_t m = reach[full]; m; m &= m - 1) {
    const auto u = static_cast<Vertex>(std::countr_zero(m));
    if (h.has_edge(oriented_edge(fi.vertex_of[u], inst.b, last))) {
      prev_local = u;
      closable = true;
      break;
    }
  }
  if (!closable) return std::nullopt;

  std::vector<Vertex> rev{inst.b};
  std::uint32_t mask = full;
  Vertex cur = prev_local;
  while (true) {
    rev.push_back(fi.vertex_of[cur]);
    const std::uint32_t rest = mask ^ (std::uint32_t{1} << cur);
    if (!rest) break;
    const int s = signs[static_cast<std::size_t>(std::popcount(mask) - 1)];
    const std::uint32_t options = reach[rest] & fi.pred[cur][s];
    cur = static_cast<Vertex>(std::countr_zero(options));
    mask = rest;
  }
  rev.push_back(inst.a);
  std::reverse(rev.begin(), rev.end());
  return OrientedPath{std::move(rev), sigma};
}

/// Randomized depth-first search with restarts. Grows a sigma-path from a,
/// keeps b for the final position, tries candidates with the fewest onward
/// sigma-compatible options first (random tie-break) and prunes when some
/// unplaced vertex can no longer get two path neighbours. Sound but incomplete:
/// returns nullopt once `budget` extension steps are spent.
inline std::optional<OrientedPath> randomized_sigma_path(const CompletionInstance& inst, std::uint64_t budget,
                                                         std::uint64_t seed) {
  inst.validate();
  const auto& h = inst.host;
  const auto& sigma = inst.sigma;
  const std::size_t w = h.size();
  Rng rng(seed);

  auto nbr = [&](Vertex v, Sign s) -> const Bitset& { return s == Sign::plus ? h.out(v) : h.in(v); };
  // Any vertex u that may precede b must have the last-sign edge (u, b).
  const Bitset& before_b = sigma[w - 2] == Sign::plus ? h.in(inst.b) : h.out(inst.b);

  Bitset unplaced = Bitset::full(w);
  unplaced.reset(inst.a);
  unplaced.reset(inst.b);

  auto feasible = [&](Vertex cur) {
    // b needs a possible predecessor among the unplaced vertices (or cur when nothing is left).
    if (unplaced.none()) return h.has_edge(oriented_edge(cur, inst.b, sigma[w - 2]));
    Bitset pre = before_b;
    pre &= unplaced;
    if (pre.none()) return false;
    Bitset pool = unplaced;
    pool.set(cur);
    pool.set(inst.b);
    bool ok = true;
    unplaced.for_each([&](std::size_t v) {
      if (!ok) return;
      Bitset around = h.out(static_cast<Vertex>(v));
      around |= h.in(static_cast<Vertex>(v));
      around &= pool;
      if (around.count() < 2) ok = false;
    });
    return ok;
  };

  struct Frame {
    std::vector<Vertex> options;
    std::size_t next = 0;
  };

  auto make_frame = [&](Vertex cur, std::size_t depth) {
    // depth = number of placed vertices; the next edge is sigma[depth - 1]
    Frame fr;
    const Sign s = sigma[depth - 1];
    if (depth == w - 1) {
      if (h.has_edge(oriented_edge(cur, inst.b, s))) fr.options.push_back(inst.b);
      return fr;
    }
    Bitset cand = nbr(cur, s);
    cand &= unplaced;
    std::vector<std::pair<std::uint64_t, Vertex>> keyed;
    const bool next_is_last = depth + 1 == w - 1;
    cand.for_each([&](std::size_t v) {
      const auto vx = static_cast<Vertex>(v);
      std::uint64_t onward;
      if (next_is_last) {
        onward = h.has_edge(oriented_edge(vx, inst.b, sigma[depth])) ? 1 : 0;
      } else {
        Bitset ahead = nbr(vx, sigma[depth]);
        ahead &= unplaced;
        onward = ahead.count();
      }
      if (onward == 0) return;  // dead end one step ahead
      keyed.emplace_back((onward << 32) | (rng() & 0xffffffffU), static_cast<Vertex>(v));
    });
    std::sort(keyed.begin(), keyed.end());
    for (auto& [k, v] : keyed) fr.options.push_back(v);
    return fr;
  };

  if (w == 2) {
    if (!h.has_edge(oriented_edge(inst.a, inst.b, sigma[0]))) return std::nullopt;
    return OrientedPath{{inst.a, inst.b}, sigma};
  }
  if (!feasible(inst.a)) return std::nullopt;

  std::uint64_t spent = 0;
  std::uint64_t restart_limit = 16 * static_cast<std::uint64_t>(w);
  while (spent < budget) {
    std::vector<Vertex> path{inst.a};
    std::vector<Frame> stack;
    stack.push_back(make_frame(inst.a, 1));
    std::uint64_t local = 0;
    while (!stack.empty() && spent < budget && local < restart_limit) {
      Frame& top = stack.back();
      if (top.next == top.options.size()) {
        stack.pop_back();
        if (path.size() > 1) {
          unplaced.set(path.back());
          path.pop_back();
        }
        continue;
      }
      const Vertex v = top.options[top.next++];
      ++spent;
      ++local;
      if (v == inst.b) {
        path.push_back(v);
        return OrientedPath{std::move(path), sigma};
      }
      unplaced.reset(v);
      path.push_back(v);
      if (!feasible(v)) {
        unplaced.set(v);
        path.pop_back();
        continue;
      }
      stack.push_back(make_frame(v, path.size()));
    }
    // reset for the next restart
    for (std::size_t i = 1; i < path.size(); ++i) unplaced.set(path[i]);
    if (stack.empty()) return std::nullopt;  // search space exhausted: no path exists
    restart_limit *= 2;
  }
  return std::nullopt;
}

/// True when `path` is a spanning sigma-path of the instance from a to b.
inline bool is_completion(const CompletionInstance& inst, const OrientedPath& path) {
  if (path.vertices.size() != inst.host.size() || path.vertices.empty()) return false;
  if (path.front() != inst.a || path.back() != inst.b) return false;
  if (path.sigma.signs() != inst.sigma.signs()) return false;
  try {
    return validate_oriented_path(inst.host, path);
  } catch (const MalformedInput&) {
    return false;
  }
}

}  // namespace orhc
