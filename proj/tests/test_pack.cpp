#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "orhc/pack.hpp"

using namespace orhc;

namespace {
std::vector<Orientation> mixed(std::size_t n, std::size_t t, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Orientation> out;
  for (std::size_t i = 0; i < t; ++i) {
    if (i % 3 == 0) out.push_back(Orientation::consistent(n));
    else if (i % 3 == 1) out.push_back(Orientation::antidirected(n));
    else out.push_back(Orientation::random(n, rng));
  }
  return out;
}

PackingResult dense_run(std::uint64_t seed, std::size_t n = 60, double eps = 0.95) {
  const auto params = make_pack_params(n, 1.0, eps);
  return pack_cycles(mixed(n, params.t, seed), n, 1.0, eps, seed);
}
}  // namespace

TEST(PackParams, DefaultsAndCouplingIdentity) {
  const auto pp = make_pack_params(128, 0.25, 0.5);
  const double ln = std::log(128.0);
  EXPECT_EQ(pp.t, 16u);
  EXPECT_DOUBLE_EQ(pp.alpha, std::max(1.1, std::cbrt(128 * 0.25 / (ln * ln * ln))));
  EXPECT_EQ(pp.ell, 128u - static_cast<std::size_t>(std::ceil(128 / (pp.alpha * ln))));
  EXPECT_DOUBLE_EQ(pp.p1, 0.1875);
  EXPECT_NEAR((1 - pp.p1) * (1 - pp.p2), 1 - 0.25, 1e-15);
  EXPECT_LE(pp.p_ex, pp.p1);
  EXPECT_EQ(pp.delta, 32.0);
  EXPECT_THROW(make_pack_params(128, 1.5, 0.5), ValidationError);
  EXPECT_THROW(make_pack_params(128, 0.25, 0.5, {.p_ex = 0.5}), ValidationError);
  EXPECT_THROW(make_pack_params(128, 0.25, 0.5, {.ell = 128}), ValidationError);
}

TEST(Stage1, SingleRoundIsEmbedPathOnCompleteDigraph) {
  const std::size_t n = 40;
  const auto params = make_pack_params(n, 1.0, 0.9, {.t = 1});
  Rng srng(3);
  const auto sigma = Orientation::random(n, srng);
  const auto s1 = stage1_pack({sigma}, params, 77);
  ExposureOracle oracle(params.p_ex, 77, 0);
  Rng rng(77, 1);
  const auto t = embed_path(Digraph::complete(n), {params.ell, params.p_ex, stage1_pattern(sigma, params.ell)}, oracle, rng);
  ASSERT_EQ(s1.success, t.success());
  if (t.success()) {
    EXPECT_EQ(s1.paths.at(0).vertices, t.path->vertices);
  }
}

TEST(Stage1, PathsEdgeDisjointAndLedgerInvariants) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto params = make_pack_params(60, 1.0, 0.9);
    const auto sigmas = mixed(60, params.t, seed);
    const auto s1 = stage1_pack(sigmas, params, seed);
    std::set<Edge> seen;
    for (const auto& q : s1.paths) {
      EXPECT_EQ(q.vertices.size(), params.ell);
      for (auto e : q.edges()) EXPECT_TRUE(seen.insert(e).second);
      EXPECT_TRUE(validate_oriented_path(s1.exposed_true, q));
    }
    const auto& L = s1.ledger;
    for (Vertex u = 0; u < 60; ++u)
      for (Vertex v = 0; v < 60; ++v) {
        if (u == v) continue;
        EXPECT_LE(L.x(u, v), L.rounds());
        EXPECT_LE(L.queried(u, v), L.rounds());
        EXPECT_LE(L.y(u, v), params.t);
      }
    if (s1.success) {
      EXPECT_LE(static_cast<double>(L.max_x().value), params.budget());
    }
  }
}

TEST(Stage1, BudgetBreachIsAHardFailure) {
  // p_ex at p1 leaves a budget of exactly one coin per pair; forcing p_ex above
  // p1 is rejected up front, so a breach can only come from the check itself.
  auto params = make_pack_params(30, 1.0, 0.9);
  params.p_ex = 1.0;
  params.p1 = 0.5;  // budget 0.5 < 1 coin
  const auto s1 = stage1_pack(mixed(30, 2, 1), params, 5);
  EXPECT_FALSE(s1.success);
  ASSERT_TRUE(s1.budget_breach.has_value());
  EXPECT_EQ(s1.failed_round, 1u);
}

TEST(Stage2, SingleCycleWithEveryEdgeAvailable) {
  // p = 1 gives p2 = 1: F_1 is all of W_1 minus the path edges.
  Rng rng(9);
  for (std::size_t n : {8, 12, 20, 30}) {
    for (int rep = 0; rep < 5; ++rep) {
      const auto params = make_pack_params(n, 1.0, 0.5, {.t = 1, .ell = n - 5});
      ASSERT_EQ(params.p2, 1.0);
      const std::vector<Orientation> sig{Orientation::random(n, rng)};
      const auto res = pack_cycles(sig, n, 1.0, 0.5, rng(), {.t = 1, .ell = n - 5});
      ASSERT_TRUE(res.success) << res.error;
      EXPECT_TRUE(verify_packing(res, sig).ok);
    }
  }
}

TEST(Stage2, AssignedEdgesStayInsideTheirWindow) {
  const auto res = dense_run(3);
  ASSERT_EQ(res.stage2_edges.size(), res.paths.size());
  for (std::size_t i = 0; i < res.paths.size(); ++i) {
    std::set<Vertex> interior(res.paths[i].vertices.begin() + 1, res.paths[i].vertices.end() - 1);
    for (auto e : res.stage2_edges[i]) {
      EXPECT_FALSE(interior.contains(e.from));
      EXPECT_FALSE(interior.contains(e.to));
    }
  }
  // an edge goes to at most one index
  std::set<Edge> seen;
  for (const auto& f : res.stage2_edges)
    for (auto e : f) EXPECT_TRUE(seen.insert(e).second);
}

TEST(PackCycles, EmptyInputIsEmptySuccess) {
  const auto res = pack_cycles({}, 50, 0.3, 0.5, 1);
  EXPECT_TRUE(res.success);
  EXPECT_TRUE(res.cycles.empty());
  EXPECT_TRUE(verify_packing(res, {}).ok);
}

TEST(PackCycles, DenseRegimeSucceedsAndVerifies) {
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto params = make_pack_params(60, 1.0, 0.95);
    const auto sig = mixed(60, params.t, seed);
    const auto res = pack_cycles(sig, 60, 1.0, 0.95, seed);
    if (!res.success) continue;
    ++ok;
    const auto rep = verify_packing(res, sig);
    EXPECT_TRUE(rep.ok) << (rep.problems.empty() ? "" : rep.problems.front());
    EXPECT_TRUE(res.property_b);
    EXPECT_TRUE(res.coupling_ok);
  }
  EXPECT_GE(ok, 18);
}

TEST(PackCycles, WarnsBelowTheRegime) {
  const auto res = pack_cycles(mixed(60, 1, 1), 60, 0.5, 0.5, 1);
  EXPECT_FALSE(res.warnings.empty());
}

TEST(PackCycles, Deterministic) {
  const auto a = dense_run(5), b = dense_run(5);
  ASSERT_EQ(a.cycles.size(), b.cycles.size());
  for (std::size_t i = 0; i < a.cycles.size(); ++i) EXPECT_EQ(a.cycles[i].vertices, b.cycles[i].vertices);
}

TEST(VerifyPacking, SharedEdgeIsRejected) {
  PackingResult r;
  r.cycles = {{{0, 1, 2}, Orientation::consistent(3)}, {{1, 2, 0}, Orientation::consistent(3)}};
  const auto rep = verify_packing(r, {Orientation::consistent(3), Orientation::consistent(3)});
  EXPECT_FALSE(rep.ok);
}

TEST(VerifyPacking, RotatedPatternIsTheSameCycle) {
  const auto s = Orientation::parse("++-+--+");
  PackingResult r;
  r.cycles = {{{0, 1, 2, 3, 4, 5, 6}, s.rotated(3)}};
  EXPECT_TRUE(verify_packing(r, {s}).ok);
  r.cycles[0].sigma = Orientation::parse("+++++--");
  EXPECT_FALSE(verify_packing(r, {s}).ok);
}

TEST(VerifyPacking, RejectsNonSpanningCycles) {
  PackingResult r;
  r.cycles = {{{0, 1, 1, 2}, Orientation::consistent(4)}};
  EXPECT_FALSE(verify_packing(r, {Orientation::consistent(4)}).ok);
  r.cycles = {{{0, 1, 2}, Orientation::consistent(3)}};
  EXPECT_FALSE(verify_packing(r, {Orientation::consistent(4)}).ok);
}

TEST(VerifyPacking, CorruptingOneEdgeIsAlwaysCaught) {
  std::vector<std::pair<PackingResult, std::vector<Orientation>>> valid;
  for (std::uint64_t seed = 0; valid.size() < 5 && seed < 40; ++seed) {
    const auto params = make_pack_params(60, 1.0, 0.95);
    auto sig = mixed(60, params.t, seed);
    auto res = pack_cycles(sig, 60, 1.0, 0.95, seed);
    if (res.success) valid.emplace_back(std::move(res), std::move(sig));
  }
  ASSERT_FALSE(valid.empty());
  Rng rng(31);
  for (int fuzz = 0; fuzz < 100; ++fuzz) {
    auto [res, sig] = valid[fuzz % valid.size()];
    ASSERT_TRUE(verify_packing(res, sig).ok);
    auto& c = res.cycles[rng.below(res.cycles.size())];
    const std::size_t n = c.vertices.size();
    if (fuzz % 2 == 0) {
      // reverse one edge; with n even no rotation or reflection of the input
      // has the resulting number of + signs
      std::vector<Sign> signs = c.sigma.signs();
      const std::size_t i = rng.below(n);
      signs[i] = -signs[i];
      c.sigma = Orientation(signs);
    } else {
      // reroute one edge back into the cycle, so a vertex repeats
      const std::size_t i = rng.below(n);
      c.vertices[(i + 1) % n] = c.vertices[(i + n - 1) % n];
    }
    EXPECT_FALSE(verify_packing(res, sig).ok) << "fuzz case " << fuzz;
  }
}
