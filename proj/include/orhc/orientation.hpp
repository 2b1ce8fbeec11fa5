#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "orhc/digraph.hpp"
#include "orhc/error.hpp"
#include "orhc/rng.hpp"

namespace orhc {

enum class Sign : std::int8_t { minus = -1, plus = 1 };

constexpr Sign operator-(Sign s) { return s == Sign::plus ? Sign::minus : Sign::plus; }

/// The directed edge joining a (earlier on the walk) and b (later) under sign s:
/// a -> b for +, b -> a for -.
constexpr Edge oriented_edge(Vertex a, Vertex b, Sign s) {
  return s == Sign::plus ? Edge{a, b} : Edge{b, a};
}

/// Sign pattern sigma in {+,-}^k.
class Orientation {
 public:
  Orientation() = default;
  explicit Orientation(std::vector<Sign> signs) : signs_(std::move(signs)) {}

  /// Accepts '+' and '-' (ASCII) as well as the Unicode minus sign.
  static Orientation parse(std::string_view text) {
    std::vector<Sign> s;
    for (std::size_t i = 0; i < text.size(); ++i) {
      char c = text[i];
      if (c == '+') {
        s.push_back(Sign::plus);
      } else if (c == '-') {
        s.push_back(Sign::minus);
      } else if (text.substr(i, 3) == "\xE2\x88\x92") {
        s.push_back(Sign::minus);
        i += 2;
      } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        continue;
      } else {
        throw MalformedInput(std::string("invalid orientation character '") + c + "'");
      }
    }
    if (s.empty()) throw MalformedInput("orientation must have length >= 1");
    return Orientation(std::move(s));
  }

  static Orientation consistent(std::size_t k) { return Orientation(std::vector<Sign>(k, Sign::plus)); }
  static Orientation antidirected(std::size_t k) {
    std::vector<Sign> s(k);
    for (std::size_t i = 0; i < k; ++i) s[i] = i % 2 ? Sign::minus : Sign::plus;
    return Orientation(std::move(s));
  }
  static Orientation random(std::size_t k, Rng& rng) {
    std::vector<Sign> s(k);
    for (auto& x : s) x = (rng() >> 63) ? Sign::plus : Sign::minus;
    return Orientation(std::move(s));
  }

  std::size_t size() const { return signs_.size(); }
  bool empty() const { return signs_.empty(); }
  Sign operator[](std::size_t i) const { return signs_[i]; }
  const std::vector<Sign>& signs() const { return signs_; }

  std::string to_string() const {
    std::string out;
    out.reserve(signs_.size());
    for (auto s : signs_) out.push_back(s == Sign::plus ? '+' : '-');
    return out;
  }

  /// Entries [first, first + count), indices taken cyclically.
  Orientation slice(std::size_t first, std::size_t count) const {
    std::vector<Sign> s(count);
    for (std::size_t i = 0; i < count; ++i) s[i] = signs_[(first + i) % signs_.size()];
    return Orientation(std::move(s));
  }

  /// Cycle pattern read starting r positions later.
  Orientation rotated(std::size_t r) const { return slice(r % std::max<std::size_t>(size(), 1), size()); }

  /// Cycle pattern read in the opposite direction from the same start vertex:
  /// entry j becomes -sigma(k-1-j).
  Orientation reflected() const {
    std::vector<Sign> s(size());
    for (std::size_t j = 0; j < size(); ++j) s[j] = -signs_[size() - 1 - j];
    return Orientation(std::move(s));
  }

  /// Path pattern read from the other end: entry j becomes -sigma(k-1-j).
  Orientation reversed_path() const { return reflected(); }

  friend bool operator==(const Orientation&, const Orientation&) = default;

 private:
  std::vector<Sign> signs_;
};

/// True iff the two cycle patterns describe the same oriented cycle, i.e. one
/// is a rotation of the other or of its reflection.
inline bool same_cycle_pattern(const Orientation& a, const Orientation& b) {
  if (a.size() != b.size()) return false;
  const std::size_t k = a.size();
  const Orientation br = b.reflected();
  for (std::size_t r = 0; r < k; ++r) {
    bool rot = true, ref = true;
    for (std::size_t j = 0; j < k && (rot || ref); ++j) {
      rot = rot && a[j] == b[(j + r) % k];
      ref = ref && a[j] == br[(j + r) % k];
    }
    if (rot || ref) return true;
  }
  return false;
}

/// Number of dihedral position maps (rotations and reflections of the k-cycle)
/// that carry the sigma-cycle onto itself as a digraph. For k >= 3 these are all
/// of its automorphisms.
inline std::size_t oriented_automorphism_count(const Orientation& sigma) {
  const std::size_t k = sigma.size();
  if (k < 3) throw std::invalid_argument("automorphism count needs a cycle of length >= 3");
  std::size_t count = 0;
  for (std::size_t r = 0; r < k; ++r) {
    // rotation j -> j + r keeps edge j pointing the same way
    bool ok = true;
    for (std::size_t j = 0; j < k && ok; ++j) ok = sigma[j] == sigma[(j + r) % k];
    count += ok;
    // reflection j -> r - j sends edge j to edge r - j - 1, reversed
    ok = true;
    for (std::size_t j = 0; j < k && ok; ++j) ok = sigma[(r + 2 * k - j - 1) % k] == -sigma[j];
    count += ok;
  }
  return count;
}

struct OrientedPath {
  std::vector<Vertex> vertices;  // k + 1 vertices
  Orientation sigma;             // k signs

  std::size_t edge_count() const { return sigma.size(); }
  Vertex front() const { return vertices.front(); }
  Vertex back() const { return vertices.back(); }

  std::vector<Edge> edges() const {
    std::vector<Edge> es;
    es.reserve(sigma.size());
    for (std::size_t i = 0; i < sigma.size(); ++i)
      es.push_back(oriented_edge(vertices[i], vertices[i + 1], sigma[i]));
    return es;
  }
};

struct OrientedCycle {
  std::vector<Vertex> vertices;  // k vertices
  Orientation sigma;             // sign i governs the edge v_i v_{i+1 mod k}

  std::size_t size() const { return vertices.size(); }

  std::vector<Edge> edges() const {
    std::vector<Edge> es;
    const std::size_t k = vertices.size();
    es.reserve(k);
    for (std::size_t i = 0; i < k; ++i) es.push_back(oriented_edge(vertices[i], vertices[(i + 1) % k], sigma[i]));
    return es;
  }
};

namespace detail {
inline void require_distinct(const std::vector<Vertex>& vs, std::size_t n) {
  std::vector<bool> seen(n, false);
  for (auto v : vs) {
    if (v >= n) throw MalformedInput("vertex " + std::to_string(v) + " out of range");
    if (seen[v]) throw MalformedInput("repeated vertex " + std::to_string(v));
    seen[v] = true;
  }
}
}  // namespace detail

/// Whether P is a sigma-path of D. Throws MalformedInput when |vertices| != |sigma| + 1
/// or a vertex repeats.
inline bool validate_oriented_path(const Digraph& d, const OrientedPath& p) {
  if (p.vertices.size() != p.sigma.size() + 1)
    throw MalformedInput("path has " + std::to_string(p.vertices.size()) + " vertices but " +
                         std::to_string(p.sigma.size()) + " signs");
  detail::require_distinct(p.vertices, d.size());
  for (auto e : p.edges())
    if (!d.has_edge(e)) return false;
  return true;
}

inline bool validate_oriented_cycle(const Digraph& d, const OrientedCycle& c) {
  if (c.vertices.size() != c.sigma.size() || c.vertices.size() < 2)
    throw MalformedInput("cycle has " + std::to_string(c.vertices.size()) + " vertices but " +
                         std::to_string(c.sigma.size()) + " signs");
  detail::require_distinct(c.vertices, d.size());
  for (auto e : c.edges())
    if (!d.has_edge(e)) return false;
  return true;
}

/// P^c: the path formed by the edges of C not on P, running from P's last
/// vertex around the cycle back to P's first vertex. P may follow C in either
/// direction.
inline OrientedPath complement_path(const OrientedCycle& c, const OrientedPath& p) {
  const std::size_t k = c.vertices.size();
  const std::size_t len = p.sigma.size();
  if (p.vertices.size() != len + 1) throw MalformedInput("path vertex/sign length mismatch");
  if (len == 0 || len >= k) throw std::invalid_argument("path must use between 1 and k-1 cycle edges");
  auto it = std::find(c.vertices.begin(), c.vertices.end(), p.vertices.front());
  if (it == c.vertices.end()) throw std::invalid_argument("path start is not on the cycle");
  const std::size_t s = static_cast<std::size_t>(it - c.vertices.begin());

  bool forward = true, backward = true;
  for (std::size_t j = 0; j < len; ++j) {
    forward = forward && p.vertices[j + 1] == c.vertices[(s + j + 1) % k] && p.sigma[j] == c.sigma[(s + j) % k];
    backward = backward && p.vertices[j + 1] == c.vertices[(s + 2 * k - j - 1) % k] &&
               p.sigma[j] == -c.sigma[(s + 2 * k - j - 1) % k];
  }
  if (!forward && !backward) throw std::invalid_argument("path is not a subpath of the cycle");

  OrientedPath out;
  std::vector<Sign> signs;
  const std::size_t rest = k - len;
  if (forward) {
    for (std::size_t j = 0; j <= rest; ++j) out.vertices.push_back(c.vertices[(s + len + j) % k]);
    for (std::size_t j = 0; j < rest; ++j) signs.push_back(c.sigma[(s + len + j) % k]);
  } else {
    // continue walking backwards from P's end
    for (std::size_t j = 0; j <= rest; ++j) out.vertices.push_back(c.vertices[(s + 2 * k - len - j) % k]);
    for (std::size_t j = 0; j < rest; ++j) signs.push_back(-c.sigma[(s + 2 * k - len - j - 1) % k]);
  }
  out.sigma = Orientation(std::move(signs));
  return out;
}

}  // namespace orhc
