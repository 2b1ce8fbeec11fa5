#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "orhc/digraph.hpp"
#include "orhc/orientation.hpp"
#include "orhc/parallel.hpp"
#include "orhc/randgen.hpp"
#include "orhc/rng.hpp"
#include "orhc/stats.hpp"

namespace orhc {

struct EmbedParams {
  std::size_t ell = 2;  // vertices on the target path
  double p_ex = 1.0;
  Orientation sigma;    // ell - 1 signs
};

struct ExposureRecord {
  std::uint32_t round;  // 1-based
  Edge pair;            // directed pair whose coin was consulted
  bool outcome;
  bool in_host;
  bool fresh;           // false when the oracle answered from its memo
};

/// Log of one run of the randomized path embedding.
struct EmbeddingTrace {
  std::optional<OrientedPath> path;    // set on success
  std::size_t failed_round = 0;        // 1-based round that ran out of candidates, 0 on success
  std::vector<Vertex> placed;          // x_1, x_2, ... as far as the run got
  std::vector<ExposureRecord> exposures;
  std::size_t host_vertices = 0;
  std::size_t host_semi_degree = 0;

  bool success() const { return path.has_value(); }
  std::size_t rounds() const { return placed.empty() ? 0 : placed.size() - 1; }
};

/// Embeds a sigma-path with ell vertices into `host`. Start vertex is uniform; in
/// round i the unused vertices R_i are visited in uniformly random order and the
/// sigma(i)-oriented pair between x_i and each candidate is exposed through the
/// oracle until one comes up present and lies in the host. For sign -, the
/// exposed pair is (candidate, x_i). Fails when a round exhausts R_i.
inline EmbeddingTrace embed_path(const Digraph& host, const EmbedParams& params, ExposureOracle& oracle, Rng& rng) {
  const std::size_t n = host.size();
  if (params.ell > n) throw std::invalid_argument("ell exceeds the number of vertices");
  if (params.ell < 2) throw std::invalid_argument("ell must be >= 2");
  if (params.sigma.size() != params.ell - 1) throw std::invalid_argument("sigma must have ell - 1 signs");
  if (!(params.p_ex > 0.0 && params.p_ex <= 1.0)) throw std::invalid_argument("p_ex must lie in (0, 1]");

  EmbeddingTrace trace;
  trace.host_vertices = n;
  trace.host_semi_degree = semi_degree(host);
  trace.placed.reserve(params.ell);

  Bitset used(n);
  std::vector<Vertex> candidates;
  candidates.reserve(n);

  Vertex current = static_cast<Vertex>(rng.below(n));
  trace.placed.push_back(current);
  used.set(current);

  for (std::size_t i = 1; i < params.ell; ++i) {
    const Sign s = params.sigma[i - 1];
    candidates.clear();
    for (Vertex v = 0; v < n; ++v)
      if (!used.test(v)) candidates.push_back(v);
    bool found = false;
    // Fisher-Yates drawn one position at a time: each prefix is a uniform ordering prefix.
    for (std::size_t j = 0; j < candidates.size(); ++j) {
      std::swap(candidates[j], candidates[j + rng.below(candidates.size() - j)]);
      const Vertex y = candidates[j];
      const Edge pair = oriented_edge(current, y, s);
      const auto outcome = oracle.query(pair.from, pair.to);
      const bool in_host = host.has_edge(pair);
      trace.exposures.push_back({static_cast<std::uint32_t>(i), pair, outcome.present, in_host, outcome.fresh});
      if (outcome.present && in_host) {
        current = y;
        used.set(y);
        trace.placed.push_back(y);
        found = true;
        break;
      }
    }
    if (!found) {
      trace.failed_round = i;
      return trace;
    }
  }
  trace.path = OrientedPath{trace.placed, params.sigma};
  return trace;
}

/// Hypothesis window  log n / (n - ell - Delta)  <<  p_ex  <<
///   min{ (n - ell)^2 / (n^2 Delta), (n Delta)^{-1/2} }.
struct WindowReport {
  double lower = 0;
  double upper = 0;
  double ratio_lower = 0;  // p_ex / lower
  double ratio_upper = 0;  // upper / p_ex
  double slack = 4;
  bool below_lower = false;  // ratio_lower < slack
  bool above_upper = false;  // ratio_upper < slack
  bool empty = false;        // lower >= upper: no p_ex can satisfy both sides

  bool ok() const { return !below_lower && !above_upper; }
};

inline WindowReport check_param_window(double n, double ell, double delta, double p_ex, double slack = 4.0) {
  const double gap = n - ell - delta;
  if (gap <= 0) throw std::invalid_argument("n - ell - delta must be positive");
  if (p_ex <= 0) throw std::invalid_argument("p_ex must be positive");
  WindowReport r;
  r.slack = slack;
  r.lower = std::log(n) / gap;
  if (delta > 0) {
    r.upper = std::min((n - ell) * (n - ell) / (n * n * delta), 1.0 / std::sqrt(n * delta));
  } else {
    r.upper = std::numeric_limits<double>::infinity();
  }
  r.ratio_lower = p_ex / r.lower;
  r.ratio_upper = r.upper / p_ex;
  r.below_lower = r.ratio_lower < slack;
  r.above_upper = r.ratio_upper < slack;
  r.empty = r.lower >= r.upper;
  return r;
}

struct PanelEstimate {
  Edge pair{};
  std::uint64_t hits = 0;
  double probability = 0;
  Interval ci;
};

struct TrialSummary {
  bool success = false;
  std::size_t rounds = 0;
  std::size_t exposures = 0;
  std::size_t failed_round = 0;
};

/// Monte Carlo estimates for one embedding configuration: Pr[F], and for a
/// fixed random panel of directed pairs Pr[E_uv] (uv exposed during the run)
/// and Pr[A_uv] ({u,v} avoids the interior of the output path).
struct EventProbabilities {
  std::uint64_t trials = 0;
  std::uint64_t failures = 0;
  double pr_fail = 0;
  Interval fail_ci;
  std::vector<PanelEstimate> exposed;  // per panel pair, E_uv
  std::vector<PanelEstimate> avoided;  // per panel pair, A_{u,v}
  PanelEstimate max_exposed;
  PanelEstimate max_avoided;
  double mean_exposed = 0;
  double mean_avoided = 0;
  double bound_exposed = 0;  // 1 / (n p_ex)
  double bound_avoided = 0;  // ((n - ell) / n)^2
  std::vector<TrialSummary> per_trial;
};

inline std::vector<Edge> sample_pair_panel(std::size_t n, std::size_t size, Rng& rng) {
  std::vector<Edge> panel;
  std::vector<bool> taken(n * n, false);
  const std::size_t total = n * (n - 1);
  size = std::min(size, total);
  while (panel.size() < size) {
    Vertex u = static_cast<Vertex>(rng.below(n)), v = static_cast<Vertex>(rng.below(n));
    if (u == v || taken[u * n + v]) continue;
    taken[u * n + v] = true;
    panel.push_back({u, v});
  }
  return panel;
}

/// Trial t uses oracle stream 2t + 1 and algorithm stream 2t + 2 of `seed`;
/// the panel comes from stream 0. On failure, A_uv is evaluated on the partial path.
inline EventProbabilities estimate_event_probs(const Digraph& d, const EmbedParams& params, std::uint64_t trials,
                                               std::uint64_t seed, std::size_t panel_size = 200,
                                               unsigned threads = 1) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  const std::size_t n = d.size();
  Rng panel_rng(seed, 0);
  const auto panel = sample_pair_panel(n, panel_size, panel_rng);
  std::vector<std::int32_t> lookup(n * n, -1);
  for (std::size_t k = 0; k < panel.size(); ++k) lookup[panel[k].from * n + panel[k].to] = static_cast<std::int32_t>(k);

  const std::size_t P = panel.size();
  std::vector<std::uint8_t> e_hits(trials * P, 0), a_hits(trials * P, 0);
  std::vector<TrialSummary> summaries(trials);

  parallel_for(trials, threads, [&](std::size_t t) {
    ExposureOracle oracle(params.p_ex, seed, 2 * t + 1);
    Rng rng(seed, 2 * t + 2);
    const auto trace = embed_path(d, params, oracle, rng);
    auto* e = &e_hits[t * P];
    auto* a = &a_hits[t * P];
    for (const auto& rec : trace.exposures) {
      const auto k = lookup[rec.pair.from * n + rec.pair.to];
      if (k >= 0) e[k] = 1;
    }
    std::vector<bool> interior(n, false);
    for (std::size_t j = 1; j + 1 < trace.placed.size(); ++j) interior[trace.placed[j]] = true;
    for (std::size_t k = 0; k < P; ++k) a[k] = !interior[panel[k].from] && !interior[panel[k].to];
    summaries[t] = {trace.success(), trace.rounds(), trace.exposures.size(), trace.failed_round};
  });

  EventProbabilities out;
  out.trials = trials;
  out.per_trial = std::move(summaries);
  for (const auto& s : out.per_trial) out.failures += !s.success;
  out.pr_fail = static_cast<double>(out.failures) / static_cast<double>(trials);
  out.fail_ci = wilson_interval(out.failures, trials);
  out.exposed.resize(P);
  out.avoided.resize(P);
  for (std::size_t k = 0; k < P; ++k) {
    auto& e = out.exposed[k];
    auto& a = out.avoided[k];
    e.pair = a.pair = panel[k];
    for (std::uint64_t t = 0; t < trials; ++t) {
      e.hits += e_hits[t * P + k];
      a.hits += a_hits[t * P + k];
    }
    for (auto* est : {&e, &a}) {
      est->probability = static_cast<double>(est->hits) / static_cast<double>(trials);
      est->ci = wilson_interval(est->hits, trials);
    }
    out.mean_exposed += e.probability / static_cast<double>(P);
    out.mean_avoided += a.probability / static_cast<double>(P);
    if (k == 0 || e.hits > out.max_exposed.hits) out.max_exposed = e;
    if (k == 0 || a.hits > out.max_avoided.hits) out.max_avoided = a;
  }
  const double nn = static_cast<double>(n);
  out.bound_exposed = 1.0 / (nn * params.p_ex);
  const double gap = (nn - static_cast<double>(params.ell)) / nn;
  out.bound_avoided = gap * gap;
  return out;
}

}  // namespace orhc
