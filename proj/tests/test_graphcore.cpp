#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "oracles.hpp"
#include "orhc/digraph.hpp"
#include "orhc/orientation.hpp"
#include "orhc/randgen.hpp"

using namespace orhc;

TEST(SemiDegree, SmallExamples) {
  EXPECT_EQ(semi_degree(Digraph::complete(3)), 2u);
  EXPECT_EQ(semi_degree(Digraph(3)), 0u);
  EXPECT_EQ(semi_degree(from_edges(2, {{0, 1}})), 0u);
}

TEST(Digraph, AdjacencyRowsStayConsistent) {
  auto d = sample_dnp(30, 0.3, 5);
  for (Vertex u = 0; u < 30; ++u) {
    EXPECT_FALSE(d.out(u).test(u));
    for (Vertex v = 0; v < 30; ++v) EXPECT_EQ(d.out(u).test(v), d.in(v).test(u));
  }
  EXPECT_THROW(d.add_edge(3, 3), std::invalid_argument);
  EXPECT_THROW(d.add_edge(0, 30), std::out_of_range);
}

TEST(DigraphText, RoundTrip) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto d = sample_dnp(1 + seed % 17, 0.4, seed);
    const auto back = parse_digraph(to_text(d));
    EXPECT_EQ(back, d);
    for (Vertex v = 0; v < d.size(); ++v) {
      EXPECT_EQ(back.out(v), d.out(v));
      EXPECT_EQ(back.in(v), d.in(v));
    }
  }
}

TEST(DigraphText, RejectsBadInputWithLineNumbers) {
  auto line_of = [](const std::string& text) {
    try {
      parse_digraph(text);
    } catch (const MalformedInput& e) {
      return e.line();
    }
    return std::size_t{0};
  };
  EXPECT_EQ(line_of("3 2\n0 1\n0 1\n"), 3u);  // duplicate
  EXPECT_EQ(line_of("3 1\n1 1\n"), 2u);       // self-loop
  EXPECT_EQ(line_of("3 1\n0 3\n"), 2u);       // out of range
  EXPECT_GT(line_of("3 2\n0 1\n"), 0u);       // too few edges
  EXPECT_GT(line_of("3 1\n0 1\n1 2\n"), 0u);  // trailing content
  EXPECT_GT(line_of("x\n"), 0u);
  EXPECT_NO_THROW(parse_digraph("3 0\n"));
}

TEST(Orientation, ParseAndPrint) {
  EXPECT_EQ(Orientation::parse("++-+-").to_string(), "++-+-");
  EXPECT_EQ(Orientation::parse("+\xE2\x88\x92+").to_string(), "+-+");
  EXPECT_THROW(Orientation::parse(""), MalformedInput);
  EXPECT_THROW(Orientation::parse("+x"), MalformedInput);
  EXPECT_EQ(Orientation::antidirected(4).to_string(), "+-+-");
}

TEST(ValidatePath, SmallExamples) {
  const auto d = from_edges(2, {{0, 1}});
  EXPECT_TRUE(validate_oriented_path(d, {{0, 1}, Orientation::parse("+")}));
  EXPECT_FALSE(validate_oriented_path(d, {{0, 1}, Orientation::parse("-")}));
  const auto d3 = Digraph::complete(3);
  EXPECT_THROW(validate_oriented_path(d3, {{0, 1, 0}, Orientation::parse("++")}), MalformedInput);
  EXPECT_THROW(validate_oriented_path(d3, {{0, 1, 2}, Orientation::parse("+")}), MalformedInput);
}

namespace {
bool naive_path_check(const Digraph& d, const std::vector<Vertex>& vs, const Orientation& s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    const bool need_forward = s[i] == Sign::plus;
    const bool ok = need_forward ? d.has_edge(vs[i], vs[i + 1]) : d.has_edge(vs[i + 1], vs[i]);
    if (!ok) return false;
  }
  return true;
}
}  // namespace

TEST(ValidatePath, AgreesWithNaiveLoopOnEveryDigraphOfOrderThree) {
  const std::vector<Edge> pairs{{0, 1}, {0, 2}, {1, 0}, {1, 2}, {2, 0}, {2, 1}};
  for (unsigned mask = 0; mask < 64; ++mask) {
    Digraph d(3);
    for (unsigned b = 0; b < 6; ++b)
      if (mask >> b & 1) d.add_edge(pairs[b]);
    for (std::size_t len = 2; len <= 3; ++len)
      oracle::for_each_sequence(3, len, [&](const std::vector<Vertex>& seq) {
        for (unsigned sm = 0; sm < (1u << (len - 1)); ++sm) {
          std::vector<Sign> signs;
          for (std::size_t i = 0; i + 1 < len; ++i) signs.push_back(sm >> i & 1 ? Sign::minus : Sign::plus);
          Orientation s(signs);
          EXPECT_EQ(validate_oriented_path(d, {seq, s}), naive_path_check(d, seq, s));
        }
      });
  }
}

TEST(ValidatePath, AgreesWithNaiveLoopOnRandomDigraphsUpToSix) {
  Rng rng(77);
  for (std::size_t n = 2; n <= 6; ++n) {
    for (int g = 0; g < 40; ++g) {
      const auto d = sample_dnp(n, 0.5, rng());
      oracle::for_each_sequence(n, n, [&](const std::vector<Vertex>& seq) {
        const auto s = Orientation::random(n - 1, rng);
        EXPECT_EQ(validate_oriented_path(d, {seq, s}), naive_path_check(d, seq, s));
      });
    }
  }
}

TEST(ComplementPath, ConsistentFiveCycle) {
  OrientedCycle c{{0, 1, 2, 3, 4}, Orientation::consistent(5)};
  OrientedPath p{{0, 1, 2, 3}, Orientation::consistent(3)};
  const auto pc = complement_path(c, p);
  EXPECT_EQ(pc.edge_count(), 2u);
  EXPECT_EQ(std::set<Vertex>({pc.front(), pc.back()}), std::set<Vertex>({0, 3}));
}

TEST(ComplementPath, AllButOneEdgeLeavesSingleEdge) {
  OrientedCycle c{{4, 2, 0, 1, 3}, Orientation::parse("+-++-")};
  OrientedPath p{{4, 2, 0, 1, 3}, Orientation::parse("+-++")};
  const auto pc = complement_path(c, p);
  ASSERT_EQ(pc.edge_count(), 1u);
  EXPECT_EQ(pc.edges().front(), (Edge{4, 3}));
}

TEST(ComplementPath, AlternatingFourCycleCarriesRestrictedSigma) {
  OrientedCycle c{{0, 1, 2, 3}, Orientation::parse("+-+-")};
  OrientedPath p{{0, 1, 2}, Orientation::parse("+-")};
  const auto pc = complement_path(c, p);
  EXPECT_EQ(pc.vertices, (std::vector<Vertex>{2, 3, 0}));
  EXPECT_EQ(pc.sigma.to_string(), "+-");
  const auto ce = c.edges();
  std::set<Edge> all(ce.begin(), ce.end()), got;
  for (auto e : p.edges()) got.insert(e);
  for (auto e : pc.edges()) EXPECT_TRUE(got.insert(e).second);
  EXPECT_EQ(got, all);
}

TEST(ComplementPath, PartitionsEdgesForEverySubpathBothDirections) {
  for (std::size_t k = 3; k <= 6; ++k) {
    for (unsigned sm = 0; sm < (1u << k); ++sm) {
      std::vector<Sign> signs;
      for (std::size_t i = 0; i < k; ++i) signs.push_back(sm >> i & 1 ? Sign::minus : Sign::plus);
      OrientedCycle c{{}, Orientation(signs)};
      for (Vertex v = 0; v < k; ++v) c.vertices.push_back(static_cast<Vertex>(k - 1 - v));
      const auto cyc_edges = c.edges();
      const std::set<Edge> all(cyc_edges.begin(), cyc_edges.end());
      for (std::size_t s = 0; s < k; ++s) {
        for (std::size_t len = 1; len < k; ++len) {
          for (int dir : {1, -1}) {
            OrientedPath p;
            std::vector<Sign> ps;
            for (std::size_t j = 0; j <= len; ++j)
              p.vertices.push_back(c.vertices[dir == 1 ? (s + j) % k : (s + k - j) % k]);
            for (std::size_t j = 0; j < len; ++j)
              ps.push_back(dir == 1 ? c.sigma[(s + j) % k] : -c.sigma[(s + 2 * k - j - 1) % k]);
            p.sigma = Orientation(ps);
            const auto pc = complement_path(c, p);
            EXPECT_EQ(pc.front(), p.back());
            EXPECT_EQ(pc.back(), p.front());
            EXPECT_EQ(pc.edge_count() + p.edge_count(), k);
            std::set<Edge> got;
            for (auto e : p.edges()) EXPECT_TRUE(got.insert(e).second);
            for (auto e : pc.edges()) EXPECT_TRUE(got.insert(e).second);
            EXPECT_EQ(got, all);
          }
        }
      }
    }
  }
}

TEST(ComplementPath, RejectsNonSubpath) {
  OrientedCycle c{{0, 1, 2, 3, 4}, Orientation::consistent(5)};
  EXPECT_THROW(complement_path(c, {{0, 2, 3}, Orientation::consistent(2)}), std::invalid_argument);
  EXPECT_THROW(complement_path(c, {{0, 1, 2}, Orientation::parse("+-")}), std::invalid_argument);
}

TEST(Automorphisms, MatchesExhaustivePermutationCheck) {
  EXPECT_EQ(oriented_automorphism_count(Orientation::consistent(3)), 3u);
  EXPECT_EQ(oracle::automorphisms(Orientation::consistent(3)), 3u);
  EXPECT_EQ(oriented_automorphism_count(Orientation::parse("+-+-")), 4u);
  EXPECT_EQ(oracle::automorphisms(Orientation::parse("+-+-")), 4u);
  EXPECT_EQ(oriented_automorphism_count(Orientation::parse("++-")), oracle::automorphisms(Orientation::parse("++-")));
  for (std::size_t k = 3; k <= 7; ++k) {
    for (unsigned sm = 0; sm < (1u << k); ++sm) {
      std::vector<Sign> signs;
      for (std::size_t i = 0; i < k; ++i) signs.push_back(sm >> i & 1 ? Sign::minus : Sign::plus);
      const Orientation s(signs);
      EXPECT_EQ(oriented_automorphism_count(s), oracle::automorphisms(s)) << s.to_string();
    }
  }
}

TEST(SameCyclePattern, RotationAndReflection) {
  const auto s = Orientation::parse("++-+--+");
  EXPECT_TRUE(same_cycle_pattern(s, s.rotated(3)));
  EXPECT_TRUE(same_cycle_pattern(s, s.reflected()));
  EXPECT_TRUE(same_cycle_pattern(s, s.reflected().rotated(2)));
  EXPECT_TRUE(same_cycle_pattern(s, Orientation::parse("+++-+--")));
  EXPECT_FALSE(same_cycle_pattern(s, Orientation::parse("++++---")));
  EXPECT_FALSE(same_cycle_pattern(s, Orientation::parse("+-+-+--")));
  EXPECT_FALSE(same_cycle_pattern(s, Orientation::consistent(6)));
}
