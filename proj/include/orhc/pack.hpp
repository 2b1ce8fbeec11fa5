#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "orhc/complete.hpp"
#include "orhc/digraph.hpp"
#include "orhc/embed.hpp"
#include "orhc/orientation.hpp"
#include "orhc/parallel.hpp"
#include "orhc/randgen.hpp"
#include "orhc/rng.hpp"

namespace orhc {

/// Optional overrides of the derived packing parameters.
struct PackOverrides {
  std::optional<std::size_t> t = std::nullopt;
  std::optional<std::size_t> ell = std::nullopt;
  std::optional<double> p_ex = std::nullopt;
  std::optional<double> delta = std::nullopt;
  std::optional<double> alpha = std::nullopt;
  std::optional<std::size_t> exact_cap = std::nullopt;
  std::optional<std::uint64_t> solver_budget = std::nullopt;
};

struct PackParams {
  std::size_t n = 0;
  double p = 0;
  double epsilon = 0;
  std::size_t t = 0;
  double alpha = 0;
  std::size_t ell = 0;
  double p_ex = 0;
  double delta = 0;
  double p1 = 0;  // (1 - epsilon/2) p
  double p2 = 0;  // (1 - p1)(1 - p2) = 1 - p
  std::size_t exact_cap = 22;            // exact DP for |W_i| <= exact_cap
  std::uint64_t solver_budget = 1000000;  // randomized solver steps per cycle

  double budget() const { return p1 / p_ex; }  // property (b): X_uv <= p1 / p_ex

  void validate() const {
    if (n < 3) throw ValidationError("n", "must be >= 3");
    if (!(p > 0 && p <= 1)) throw ValidationError("p", "must lie in (0, 1]");
    if (!(epsilon > 0 && epsilon < 1)) throw ValidationError("epsilon", "must lie in (0, 1)");
    if (ell < 2 || ell >= n) throw ValidationError("ell", "must lie in [2, n - 1]");
    if (!(p_ex > 0 && p_ex <= p1)) throw ValidationError("p_ex", "must lie in (0, p1]");
    if (std::abs(p1 + p2 - p1 * p2 - p) > 1e-12) throw ValidationError("p2", "coupling identity violated");
  }
};

/// Desk-scale defaults: t = floor((1-eps) n p), alpha = max(1.1, (np / ln^3 n)^{1/3}),
/// ell = n - ceil(n / (alpha ln n)), p_ex = min(alpha^2 ln^2 n / n, p1), Delta = 2t.
inline PackParams make_pack_params(std::size_t n, double p, double epsilon, const PackOverrides& o = {}) {
  PackParams pp;
  pp.n = n;
  pp.p = p;
  pp.epsilon = epsilon;
  const double nn = static_cast<double>(n);
  const double ln = std::log(nn);
  pp.t = o.t.value_or(static_cast<std::size_t>(std::floor((1 - epsilon) * nn * p + 1e-9)));
  pp.alpha = o.alpha.value_or(std::max(1.1, std::cbrt(nn * p / (ln * ln * ln))));
  pp.ell = o.ell.value_or(n - std::min<std::size_t>(n - 2, static_cast<std::size_t>(std::ceil(nn / (pp.alpha * ln)))));
  pp.p1 = (1 - epsilon / 2) * p;
  pp.p2 = pp.p1 < 1 ? (p - pp.p1) / (1 - pp.p1) : 0.0;
  pp.p_ex = o.p_ex.value_or(std::min(pp.alpha * pp.alpha * ln * ln / nn, pp.p1));
  pp.delta = o.delta.value_or(2.0 * static_cast<double>(pp.t));
  if (o.exact_cap) pp.exact_cap = *o.exact_cap;
  if (o.solver_budget) pp.solver_budget = *o.solver_budget;
  pp.validate();
  return pp;
}

/// Per-pair bookkeeping across Stage-1 rounds. With one memoized coin per
/// directed pair, X_uv counts coin draws (at most one); `queried` counts the
/// rounds in which the algorithm consulted the pair at all, memo hits included.
/// Y_{u,v} counts rounds i with {u, v} inside W_i, i.e. avoiding the interior of Q_i.
class ExposureLedger {
 public:
  ExposureLedger() = default;
  explicit ExposureLedger(std::size_t n) : n_(n), x_(n * n, 0), queried_(n * n, 0), y_(n * n, 0), last_round_(n * n, 0) {}

  std::size_t size() const { return n_; }
  std::size_t rounds() const { return rounds_; }

  void record(std::size_t round, Edge pair, bool fresh) {
    const auto k = pair.from * n_ + pair.to;
    if (fresh) ++x_[k];
    if (last_round_[k] != round) {
      last_round_[k] = static_cast<std::uint32_t>(round);
      ++queried_[k];
    }
  }
  void finish_round() { ++rounds_; }
  void add_window(const std::vector<Vertex>& w) {
    for (std::size_t i = 0; i < w.size(); ++i)
      for (std::size_t j = i + 1; j < w.size(); ++j) ++y_[key_unordered(w[i], w[j])];
  }

  std::uint32_t x(Vertex u, Vertex v) const { return x_[u * n_ + v]; }
  std::uint32_t queried(Vertex u, Vertex v) const { return queried_[u * n_ + v]; }
  std::uint32_t y(Vertex u, Vertex v) const { return y_[key_unordered(u, v)]; }

  struct Max {
    std::uint32_t value = 0;
    Edge pair{0, 0};
  };
  Max max_x() const { return max_of(x_); }
  Max max_queried() const { return max_of(queried_); }
  Max max_y() const { return max_of(y_); }

 private:
  std::size_t key_unordered(Vertex u, Vertex v) const { return u < v ? u * n_ + v : v * n_ + u; }
  Max max_of(const std::vector<std::uint32_t>& a) const {
    Max m;
    for (std::size_t k = 0; k < a.size(); ++k)
      if (a[k] > m.value) m = {a[k], {static_cast<Vertex>(k / n_), static_cast<Vertex>(k % n_)}};
    return m;
  }

  std::size_t n_ = 0;
  std::size_t rounds_ = 0;
  std::vector<std::uint32_t> x_, queried_, y_, last_round_;
};

struct Stage1Result {
  bool success = false;
  std::size_t failed_round = 0;         // 1-based, 0 if none
  std::optional<Edge> budget_breach;    // pair whose X exceeded p1 / p_ex
  std::string error;
  std::vector<OrientedPath> paths;      // Q_1..Q_t
  ExposureLedger ledger;
  Digraph exposed_true;                 // every pair whose coin came up present
};

/// Subpath P_i: the first ell vertices of the sigma_i-cycle (signs 0..ell-2).
inline Orientation stage1_pattern(const Orientation& cycle, std::size_t ell) { return cycle.slice(0, ell - 1); }

/// Stage 1: round i embeds P_i into D_n minus the edges of Q_1..Q_{i-1}, all
/// rounds sharing one exposure oracle (stream 0 of `seed`); round i's choices
/// use stream i. Fails on an embedding failure or when X_uv > p1 / p_ex.
inline Stage1Result stage1_pack(const std::vector<Orientation>& sigmas, const PackParams& params, std::uint64_t seed) {
  const std::size_t n = params.n;
  for (const auto& s : sigmas)
    if (s.size() != n) throw std::invalid_argument("each cycle pattern must have n signs");
  Stage1Result res;
  res.ledger = ExposureLedger(n);
  ExposureOracle oracle(params.p_ex, seed, 0);
  Digraph host = Digraph::complete(n);
  const double budget = params.budget();

  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    Rng rng(seed, i + 1);
    const EmbedParams ep{params.ell, params.p_ex, stage1_pattern(sigmas[i], params.ell)};
    const auto trace = embed_path(host, ep, oracle, rng);
    for (const auto& rec : trace.exposures) res.ledger.record(i + 1, rec.pair, rec.fresh);
    res.ledger.finish_round();
    if (!trace.success()) {
      res.failed_round = i + 1;
      res.error = "embedding failed in round " + std::to_string(i + 1) + " at step " + std::to_string(trace.failed_round);
      res.exposed_true = oracle.revealed(n);
      return res;
    }
    for (const auto& rec : trace.exposures) {
      if (static_cast<double>(res.ledger.x(rec.pair.from, rec.pair.to)) > budget) {
        res.failed_round = i + 1;
        res.budget_breach = rec.pair;
        res.error = "exposure budget exceeded for pair " + std::to_string(rec.pair.from) + "->" + std::to_string(rec.pair.to);
        res.exposed_true = oracle.revealed(n);
        return res;
      }
    }
    for (auto e : trace.path->edges()) {
      if (!host.remove_edge(e)) throw std::logic_error("stage 1 reused an edge");
    }
    res.paths.push_back(*trace.path);
  }
  for (const auto& q : res.paths) {
    std::vector<bool> interior(n, false);
    for (std::size_t j = 1; j + 1 < q.vertices.size(); ++j) interior[q.vertices[j]] = true;
    std::vector<Vertex> w;
    for (Vertex v = 0; v < n; ++v)
      if (!interior[v]) w.push_back(v);
    res.ledger.add_window(w);
  }
  res.exposed_true = oracle.revealed(n);
  res.success = true;
  return res;
}

struct PackingResult {
  bool success = false;
  std::string stage;  // "stage1", "stage2" or "" on success
  std::string error;
  std::size_t failed_index = 0;  // 1-based round / cycle index
  std::size_t completed = 0;     // cycles closed in Stage 2
  std::vector<OrientedCycle> cycles;
  std::vector<OrientedPath> paths;
  ExposureLedger ledger;
  std::vector<std::vector<Edge>> stage2_edges;  // F_i
  Digraph exposed_true;
  std::size_t stage2_discarded = 0;  // D_2 edges with no eligible index
  // ledger summaries
  ExposureLedger::Max max_x, max_queried, max_y;
  double x_budget = 0;          // p1 / p_ex
  double y_bound = 0;           // (1 + eps) t ((n - ell)/n)^2
  bool property_b = false;
  bool property_c = false;
  bool coupling_ok = false;
  std::vector<std::string> warnings;
  double stage1_ms = 0;
  double stage2_ms = 0;
};

namespace detail {
inline void summarize_ledger(PackingResult& r, const PackParams& params) {
  r.max_x = r.ledger.max_x();
  r.max_queried = r.ledger.max_queried();
  r.max_y = r.ledger.max_y();
  r.x_budget = params.budget();
  const double gap = (static_cast<double>(params.n) - static_cast<double>(params.ell)) / static_cast<double>(params.n);
  r.y_bound = (1 + params.epsilon) * static_cast<double>(params.t) * gap * gap;
  r.property_b = static_cast<double>(r.max_x.value) <= r.x_budget;
  r.property_c = static_cast<double>(r.max_y.value) <= r.y_bound;
  // per-pair consumption: at most X * p_ex in Stage 1, then p2; union is p
  r.coupling_ok = static_cast<double>(r.max_x.value) * params.p_ex <= params.p1 + 1e-12 &&
                  std::abs(params.p1 + params.p2 - params.p1 * params.p2 - params.p) <= 1e-12;
}
}  // namespace detail

/// Stage 2: draw D_2 ~ D(n, p2) (stream 1 of `seed`), hand each of its edges to
/// one index i chosen uniformly among those with both ends in W_i (edges of
/// any Q_j or with no eligible index are dropped), then close every Q_i with a
/// spanning sigma-path of its complement pattern from x_{i,ell} to x_{i,1} in F_i.
inline PackingResult stage2_complete(const Stage1Result& s1, const std::vector<Orientation>& sigmas,
                                     const PackParams& params, std::uint64_t seed, unsigned threads = 1) {
  if (!s1.success) throw std::invalid_argument("stage 2 needs a successful stage 1");
  const std::size_t n = params.n;
  const std::size_t t = s1.paths.size();
  PackingResult res;
  res.paths = s1.paths;
  res.ledger = s1.ledger;
  res.exposed_true = s1.exposed_true;
  detail::summarize_ledger(res, params);

  std::vector<std::vector<bool>> in_w(t, std::vector<bool>(n, true));
  Digraph path_edges(n);
  for (std::size_t i = 0; i < t; ++i) {
    const auto& q = s1.paths[i].vertices;
    for (std::size_t j = 1; j + 1 < q.size(); ++j) in_w[i][q[j]] = false;
    for (auto e : s1.paths[i].edges()) path_edges.add_edge(e);
  }

  const Digraph d2 = sample_dnp(n, params.p2, Rng(seed, 1)());
  Rng assign(seed, 2);
  res.stage2_edges.assign(t, {});
  std::vector<std::size_t> eligible;
  for (auto e : d2.edges()) {
    if (path_edges.has_edge(e)) {
      ++res.stage2_discarded;
      continue;
    }
    eligible.clear();
    for (std::size_t i = 0; i < t; ++i)
      if (in_w[i][e.from] && in_w[i][e.to]) eligible.push_back(i);
    if (eligible.empty()) {
      ++res.stage2_discarded;
      continue;
    }
    res.stage2_edges[eligible[assign.below(eligible.size())]].push_back(e);
  }

  std::vector<std::optional<OrientedCycle>> closed(t);
  parallel_for(t, threads, [&](std::size_t i) {
    const auto& q = s1.paths[i].vertices;
    std::vector<Vertex> w;
    std::vector<Vertex> local(n, 0);
    for (Vertex v = 0; v < n; ++v)
      if (in_w[i][v]) {
        local[v] = static_cast<Vertex>(w.size());
        w.push_back(v);
      }
    CompletionInstance inst;
    inst.host = Digraph(w.size());
    for (auto e : res.stage2_edges[i]) inst.host.add_edge(local[e.from], local[e.to]);
    inst.a = local[q.back()];
    inst.b = local[q.front()];
    inst.sigma = sigmas[i].slice(params.ell - 1, n - params.ell + 1);
    const auto found = w.size() <= std::min(params.exact_cap, kExactPathCap)
                           ? exact_sigma_path(inst)
                           : randomized_sigma_path(inst, params.solver_budget, Rng(seed, 3 + i)());
    if (!found) return;
    OrientedCycle c;
    c.vertices = q;
    for (std::size_t j = 1; j + 1 < found->vertices.size(); ++j) c.vertices.push_back(w[found->vertices[j]]);
    c.sigma = sigmas[i];
    closed[i] = std::move(c);
  });

  for (std::size_t i = 0; i < t; ++i) {
    if (closed[i]) {
      ++res.completed;
      res.cycles.push_back(*closed[i]);
    } else if (res.failed_index == 0) {
      res.failed_index = i + 1;
    }
  }
  if (res.failed_index) {
    res.stage = "stage2";
    res.error = "completion failed for cycle " + std::to_string(res.failed_index);
    return res;
  }
  res.success = true;
  return res;
}

struct VerifyReport {
  bool ok = true;
  std::vector<std::string> problems;
  explicit operator bool() const { return ok; }
  void fail(std::string msg) {
    ok = false;
    problems.push_back(std::move(msg));
  }
};

/// Checks a packing: one Hamilton cycle per input pattern, each a copy of its
/// input (up to rotation and reflection), pairwise edge-disjoint, and - when
/// Stage-1/Stage-2 provenance is present - built only from edges of Q_i and F_i.
inline VerifyReport verify_packing(const PackingResult& result, const std::vector<Orientation>& inputs) {
  VerifyReport rep;
  if (result.cycles.size() != inputs.size()) {
    rep.fail("expected " + std::to_string(inputs.size()) + " cycles, got " + std::to_string(result.cycles.size()));
    return rep;
  }
  std::set<Edge> seen;
  for (std::size_t i = 0; i < result.cycles.size(); ++i) {
    const auto& c = result.cycles[i];
    const std::string tag = "cycle " + std::to_string(i + 1) + ": ";
    const std::size_t n = inputs[i].size();
    if (c.vertices.size() != n || c.sigma.size() != n) {
      rep.fail(tag + "wrong length");
      continue;
    }
    std::vector<bool> hit(n, false);
    bool spanning = true;
    for (auto v : c.vertices) {
      if (v >= n || hit[v]) {
        spanning = false;
        break;
      }
      hit[v] = true;
    }
    if (!spanning) {
      rep.fail(tag + "not a Hamilton cycle");
      continue;
    }
    if (!same_cycle_pattern(c.sigma, inputs[i])) rep.fail(tag + "orientation differs from input");
    const auto edges = c.edges();
    for (auto e : edges)
      if (!seen.insert(e).second)
        rep.fail(tag + "edge " + std::to_string(e.from) + "->" + std::to_string(e.to) + " used twice");
    if (result.paths.size() == result.cycles.size() && result.stage2_edges.size() == result.cycles.size()) {
      std::set<Edge> allowed;
      for (auto e : result.paths[i].edges()) allowed.insert(e);
      for (auto e : result.stage2_edges[i]) allowed.insert(e);
      for (auto e : edges)
        if (!allowed.contains(e))
          rep.fail(tag + "edge " + std::to_string(e.from) + "->" + std::to_string(e.to) + " not in Q_i or F_i");
    }
  }
  return rep;
}

/// End-to-end packing of one cycle per pattern in D(n, p).
inline PackingResult pack_cycles(const std::vector<Orientation>& sigmas, std::size_t n, double p, double epsilon,
                                 std::uint64_t seed, PackOverrides overrides = {}, unsigned threads = 1) {
  overrides.t = sigmas.size();
  PackingResult res;
  if (sigmas.empty()) {
    res.success = true;
    return res;
  }
  const auto params = make_pack_params(n, p, epsilon, overrides);
  const double ln = std::log(static_cast<double>(n));
  std::vector<std::string> warnings;
  if (p < ln * ln * ln / static_cast<double>(n))
    warnings.push_back("p below ln^3 n / n: outside the asymptotic regime of the packing guarantee");

  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  const auto s1 = stage1_pack(sigmas, params, Rng(seed, 0)());
  const auto t1 = clock::now();
  if (!s1.success) {
    res.stage = "stage1";
    res.error = s1.error;
    res.failed_index = s1.failed_round;
    res.paths = s1.paths;
    res.ledger = s1.ledger;
    res.exposed_true = s1.exposed_true;
    detail::summarize_ledger(res, params);
  } else {
    res = stage2_complete(s1, sigmas, params, Rng(seed, 1)(), threads);
  }
  res.warnings = std::move(warnings);
  res.stage1_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  res.stage2_ms = std::chrono::duration<double, std::milli>(clock::now() - t1).count();
  return res;
}

}  // namespace orhc
