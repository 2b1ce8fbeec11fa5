#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "orhc/complete.hpp"
#include "orhc/digraph.hpp"
#include "orhc/orientation.hpp"
#include "orhc/parallel.hpp"
#include "orhc/rng.hpp"
#include "orhc/stats.hpp"

namespace orhc {

/// Parameters of the event E_ell: |R_j| >= (1 - epsilon)(n - j) p1 for every round j.
struct RoundsFlag {
  double epsilon = 0;
  double p1 = 0;
};

/// One draw of the sequential sampler F(D) and its importance weight
/// n * prod_i |R_i| (kept in log space).
struct SisSample {
  std::optional<OrientedPath> path;
  std::vector<std::uint32_t> round_sizes;  // |R_1|, |R_2|, ...
  double log_weight = -std::numeric_limits<double>::infinity();
  bool rounds_ok = false;

  bool success() const { return path.has_value(); }
  double weight() const { return success() ? std::exp(log_weight) : 0.0; }
};

/// Uniform x_1, then x_{i+1} uniform in R_i = N^{sigma(i)}(x_i) minus the vertices
/// already placed. Fails (weight 0) as soon as some R_i is empty.
inline SisSample sample_f_path(const Digraph& d, const Orientation& sigma, std::size_t ell, Rng& rng,
                               std::optional<RoundsFlag> flag = std::nullopt) {
  const std::size_t n = d.size();
  if (ell > n || ell < 1) throw std::invalid_argument("ell must lie in [1, n]");
  if (sigma.size() + 1 < ell) throw std::invalid_argument("sigma needs at least ell - 1 signs");
  SisSample out;
  Bitset used(n);
  std::vector<Vertex> placed;
  placed.reserve(ell);
  Vertex cur = static_cast<Vertex>(rng.below(n));
  placed.push_back(cur);
  used.set(cur);
  double logw = std::log(static_cast<double>(n));
  bool ok = true;
  for (std::size_t i = 1; i < ell; ++i) {
    const Bitset& nb = sigma[i - 1] == Sign::plus ? d.out(cur) : d.in(cur);
    const std::size_t r = Bitset::count_difference(nb, used);
    out.round_sizes.push_back(static_cast<std::uint32_t>(r));
    if (flag && static_cast<double>(r) < (1 - flag->epsilon) * static_cast<double>(n - i) * flag->p1) ok = false;
    if (r == 0) return out;
    cur = static_cast<Vertex>(Bitset::nth_of_difference(nb, used, rng.below(r)));
    used.set(cur);
    placed.push_back(cur);
    logw += std::log(static_cast<double>(r));
  }
  out.log_weight = logw;
  out.rounds_ok = ok;
  std::vector<Sign> signs(sigma.signs().begin(), sigma.signs().begin() + static_cast<std::ptrdiff_t>(ell - 1));
  out.path = OrientedPath{std::move(placed), Orientation(std::move(signs))};
  return out;
}

struct CountReport {
  double estimate = 0;
  double std_error = 0;
  std::uint64_t samples = 0;
  std::uint64_t closed = 0;  // samples whose sigma-path also closed into a sigma-cycle
  std::size_t automorphisms = 0;
  std::optional<std::uint64_t> exact;
  double expectation_formula = 0;  // n!/|Aut(C)| p^n, when p is known
};

namespace detail {

/// Weight of one cycle draw: n * prod |R_i| if the sigma-path closes, else 0.
/// Writes the log weight (or -inf) and avoids all allocation in the hot loop.
class CycleSampler {
 public:
  CycleSampler(const Digraph& d, const Orientation& sigma) : d_(d), sigma_(sigma), used_(d.size()) {}

  double draw_log_weight(Rng& rng) {
    const std::size_t n = d_.size();
    used_.clear();
    const auto first = static_cast<Vertex>(rng.below(n));
    Vertex cur = first;
    used_.set(cur);
    double logw = std::log(static_cast<double>(n));
    for (std::size_t i = 1; i < n; ++i) {
      const Bitset& nb = sigma_[i - 1] == Sign::plus ? d_.out(cur) : d_.in(cur);
      const std::size_t r = Bitset::count_difference(nb, used_);
      if (r == 0) return -std::numeric_limits<double>::infinity();
      cur = static_cast<Vertex>(Bitset::nth_of_difference(nb, used_, rng.below(r)));
      used_.set(cur);
      logw += std::log(static_cast<double>(r));
    }
    if (!d_.has_edge(oriented_edge(cur, first, sigma_[n - 1]))) return -std::numeric_limits<double>::infinity();
    return logw;
  }

 private:
  const Digraph& d_;
  const Orientation& sigma_;
  Bitset used_;
};

inline double factorial(std::size_t n) {
  double f = 1;
  for (std::size_t i = 2; i <= n; ++i) f *= static_cast<double>(i);
  return f;
}

}  // namespace detail

/// Unbiased SIS estimate of the number of copies of the sigma-cycle in D.
/// Sample i uses stream (seed, i). The mean weight estimates the number of
/// labelled sigma-cycle sequences; dividing by |Aut(C)| gives copies.
inline CountReport sis_count_cycles(const Digraph& d, const Orientation& sigma, std::uint64_t samples,
                                    std::uint64_t seed, unsigned threads = 1) {
  const std::size_t n = d.size();
  if (sigma.size() != n) throw std::invalid_argument("cycle pattern must have n signs");
  if (n < 3) throw std::invalid_argument("cycles need n >= 3");
  if (samples == 0) throw std::invalid_argument("samples must be >= 1");
  std::vector<double> logw(samples);
  constexpr std::size_t kBlock = 4096;
  const std::size_t blocks = (samples + kBlock - 1) / kBlock;
  parallel_for(blocks, threads, [&](std::size_t b) {
    detail::CycleSampler sampler(d, sigma);
    const std::size_t hi = std::min<std::size_t>(samples, (b + 1) * kBlock);
    for (std::size_t i = b * kBlock; i < hi; ++i) {
      Rng rng(seed, i);
      logw[i] = sampler.draw_log_weight(rng);
    }
  });

  CountReport rep;
  rep.samples = samples;
  rep.automorphisms = oriented_automorphism_count(sigma);
  double shift = -std::numeric_limits<double>::infinity();
  for (double lw : logw)
    if (std::isfinite(lw)) {
      shift = std::max(shift, lw);
      ++rep.closed;
    }
  if (rep.closed == 0) return rep;
  // mean and sample variance of exp(lw - shift), rescaled afterwards
  double sum = 0, sumsq = 0;
  for (double lw : logw) {
    if (!std::isfinite(lw)) continue;
    const double w = std::exp(lw - shift);
    sum += w;
    sumsq += w * w;
  }
  const double ns = static_cast<double>(samples);
  const double mean = sum / ns;
  const double var = samples > 1 ? std::max(0.0, (sumsq - ns * mean * mean) / (ns - 1)) : 0.0;
  const double scale = std::exp(shift) / static_cast<double>(rep.automorphisms);
  rep.estimate = mean * scale;
  rep.std_error = std::sqrt(var / ns) * scale;
  return rep;
}

inline constexpr std::size_t kBruteCountCap = 10;

/// Exact number of copies of the sigma-cycle in D: labelled sigma-cycle vertex
/// sequences, enumerated by DFS, divided by |Aut(C)|. Refuses n > cap.
inline std::uint64_t brute_count(const Digraph& d, const Orientation& sigma, std::size_t cap = kBruteCountCap) {
  const std::size_t n = d.size();
  if (n > cap) throw CapExceeded("brute_count supports n <= " + std::to_string(cap));
  if (sigma.size() != n) throw std::invalid_argument("cycle pattern must have n signs");
  if (n < 3) throw std::invalid_argument("cycles need n >= 3");
  std::uint64_t sequences = 0;
  std::vector<Vertex> seq(n);
  Bitset used(n);
  auto dfs = [&](auto&& self, std::size_t depth) -> void {
    const Vertex cur = seq[depth - 1];
    if (depth == n) {
      sequences += d.has_edge(oriented_edge(cur, seq[0], sigma[n - 1]));
      return;
    }
    const Bitset& nb = sigma[depth - 1] == Sign::plus ? d.out(cur) : d.in(cur);
    nb.for_each([&](std::size_t v) {
      if (used.test(v)) return;
      used.set(v);
      seq[depth] = static_cast<Vertex>(v);
      self(self, depth + 1);
      used.reset(v);
    });
  };
  for (Vertex s = 0; s < n; ++s) {
    seq[0] = s;
    used.set(s);
    dfs(dfs, 1);
    used.reset(s);
  }
  const auto aut = oriented_automorphism_count(sigma);
  if (sequences % aut != 0) throw std::logic_error("sequence count not divisible by |Aut(C)|");
  return sequences / aut;
}

/// E[# copies of C in D(n, p)] = n! / |Aut(C)| * p^n.
inline double expected_copies(std::size_t n, double p, const Orientation& sigma) {
  if (sigma.size() != n) throw std::invalid_argument("cycle pattern must have n signs");
  if (p == 0.0) return 0.0;
  const double aut = static_cast<double>(oriented_automorphism_count(sigma));
  if (n <= 170) return detail::factorial(n) / aut * std::pow(p, static_cast<double>(n));
  return std::exp(std::lgamma(static_cast<double>(n) + 1) - std::log(aut) + static_cast<double>(n) * std::log(p));
}

inline constexpr std::size_t kHamiltonDpCap = 24;

/// Exact decision: does D contain a copy of the sigma-cycle? Vertex 0 is
/// anchored at cycle position 0 and every distinct rotation of sigma is tried
/// with a subset DP over the remaining n - 1 vertices. Refuses n > 24.
inline bool exists_oriented_hc(const Digraph& d, const Orientation& sigma) {
  const std::size_t n = d.size();
  if (n > kHamiltonDpCap) throw CapExceeded("exists_oriented_hc supports n <= 24");
  if (sigma.size() != n) throw std::invalid_argument("cycle pattern must have n signs");
  if (n < 3) throw std::invalid_argument("cycles need n >= 3");
  // every vertex needs two distinct cycle neighbours
  for (Vertex v = 0; v < n; ++v) {
    Bitset around = d.out(v);
    around |= d.in(v);
    if (around.count() < 2) return false;
  }
  const auto fi = detail::index_free(d, 0, std::nullopt);
  const std::size_t f = n - 1;
  const std::uint32_t full = (std::uint32_t{1} << f) - 1;
  std::set<std::vector<Sign>> tried;
  std::vector<int> signs(f);
  for (std::size_t r = 0; r < n; ++r) {
    const Orientation rot = sigma.rotated(r);
    if (!tried.insert(rot.signs()).second) continue;
    for (std::size_t j = 0; j < f; ++j) signs[j] = detail::sign_index(rot[j]);
    const auto reach = detail::subset_reach(f, fi.start_next, fi.succ, signs);
    for (std::uint32_t m = reach[full]; m; m &= m - 1) {
      const Vertex u = fi.vertex_of[static_cast<std::size_t>(std::countr_zero(m))];
      if (d.has_edge(oriented_edge(u, 0, rot[n - 1]))) return true;
    }
  }
  return false;
}

struct ThresholdPoint {
  double c = 0;
  double p = 0;
  std::uint64_t hits = 0;
  std::uint64_t trials = 0;
  double probability = 0;
  Interval ci;
};

/// For each c, p = (ln n + c)/n clamped to [0, 1]. Trial t draws one uniform per
/// ordered pair from stream (seed, t) and includes the pair in D_c iff its
/// uniform is below p_c, so the digraphs for different c are nested.
inline std::vector<ThresholdPoint> threshold_probe(std::size_t n, const std::vector<double>& c_values,
                                                   const Orientation& sigma, std::uint64_t trials, std::uint64_t seed,
                                                   unsigned threads = 1) {
  if (n > kHamiltonDpCap) throw CapExceeded("threshold_probe supports n <= 24");
  std::vector<ThresholdPoint> pts(c_values.size());
  for (std::size_t k = 0; k < c_values.size(); ++k) {
    pts[k].c = c_values[k];
    pts[k].p = std::clamp((std::log(static_cast<double>(n)) + c_values[k]) / static_cast<double>(n), 0.0, 1.0);
    pts[k].trials = trials;
  }
  std::vector<std::uint8_t> hit(trials * c_values.size(), 0);
  parallel_for(trials, threads, [&](std::size_t t) {
    Rng rng(seed, t);
    std::vector<double> u(n * n, 1.0);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        if (a != b) u[a * n + b] = rng.uniform();
    for (std::size_t k = 0; k < pts.size(); ++k) {
      Digraph dc(n);
      for (Vertex a = 0; a < n; ++a)
        for (Vertex b = 0; b < n; ++b)
          if (a != b && u[a * n + b] < pts[k].p) dc.add_edge(a, b);
      hit[t * pts.size() + k] = exists_oriented_hc(dc, sigma);
    }
  });
  for (std::size_t k = 0; k < pts.size(); ++k) {
    for (std::uint64_t t = 0; t < trials; ++t) pts[k].hits += hit[t * pts.size() + k];
    pts[k].probability = trials ? static_cast<double>(pts[k].hits) / static_cast<double>(trials) : 0.0;
    pts[k].ci = wilson_interval(pts[k].hits, trials);
  }
  return pts;
}

}  // namespace orhc
