#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "orhc/error.hpp"
#include "orhc/parallel.hpp"
#include "orhc/rng.hpp"

namespace orhc {

struct Interval {
  double lower = 0.0;
  double upper = 1.0;
};

/// Wilson score interval for a binomial proportion.
inline Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = 1.96) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double centre = (phat + z2 / (2 * n)) / (1 + z2 / n);
  const double half = z * std::sqrt(phat * (1 - phat) / n + z2 / (4 * n * n)) / (1 + z2 / n);
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

/// Parameters of the submartingale tail inequality
///   Pr(X_N >= m) <= exp(-m^2 / (2 (N var_bound + M m / 3))).
/// var_bound bounds each conditional variance, M each upward deviation.
struct SubmartingaleBoundParams {
  double steps = 1;      // N
  double var_bound = 0;  // per-step conditional variance bound
  double max_step = 1;   // M
  double offset = 0;     // m
};

inline double submartingale_tail_bound(const SubmartingaleBoundParams& p) {
  if (p.offset < 0) throw std::invalid_argument("tail offset m must be >= 0");
  if (p.steps < 1) throw std::invalid_argument("N must be >= 1");
  if (p.max_step <= 0) throw std::invalid_argument("M must be > 0");
  if (p.var_bound < 0) throw std::invalid_argument("variance bound must be >= 0");
  if (p.offset == 0) return 1.0;
  const double denom = 2.0 * (p.steps * p.var_bound + p.max_step * p.offset / 3.0);
  return std::exp(-(p.offset * p.offset) / denom);
}

/// Bound on Pr(at least qN + m of A_1..A_N occur) when each A_i has conditional
/// probability at most q given the past. Same as the submartingale bound with
/// var_bound = q and M = 1.
inline double corollary_tail_bound(double steps, double q, double offset) {
  if (q < 0 || q > 1) throw std::invalid_argument("q must lie in [0, 1]");
  return submartingale_tail_bound({steps, q, 1.0, offset});
}

/// History-dependent Bernoulli process with q_i <= q at every step.
struct TailModel {
  enum class Trigger { ahead, behind, alternate };
  bool adaptive = false;
  double low_factor = 0.5;   // q_i = low_factor * q when the trigger is off
  double high_factor = 1.0;  // q_i = high_factor * q when the trigger is on
  Trigger trigger = Trigger::ahead;

  static TailModel iid() { return {}; }
  static TailModel adaptive_default() { return {true, 0.5, 1.0, Trigger::ahead}; }

  std::string name() const {
    if (!adaptive) return "iid";
    std::ostringstream os;
    os << "adaptive(" << low_factor << "," << high_factor << ","
       << (trigger == Trigger::ahead ? "ahead" : trigger == Trigger::behind ? "behind" : "alternate") << ")";
    return os.str();
  }

  /// Conditional probability for step i (0-based) after `successes` successes.
  double step_probability(double q, std::uint64_t i, std::uint64_t successes) const {
    if (!adaptive) return q;
    bool on = false;
    switch (trigger) {
      case Trigger::ahead: on = static_cast<double>(successes) >= q * static_cast<double>(i); break;
      case Trigger::behind: on = static_cast<double>(successes) < q * static_cast<double>(i); break;
      case Trigger::alternate: on = i % 2 == 0; break;
    }
    return (on ? high_factor : low_factor) * q;
  }

  /// Adaptive schedule file: key = value lines with keys low_factor,
  /// high_factor, trigger (ahead | behind | alternate). '#' starts a comment.
  static TailModel load_adaptive(std::istream& in) {
    TailModel m = adaptive_default();
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      auto eq = line.find('=');
      if (eq == std::string::npos) throw MalformedInput("expected key = value", lineno);
      auto trim = [](std::string s) {
        s.erase(0, s.find_first_not_of(" \t\r"));
        s.erase(s.find_last_not_of(" \t\r") + 1);
        return s;
      };
      std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
      try {
        if (key == "low_factor") {
          m.low_factor = std::stod(value);
        } else if (key == "high_factor") {
          m.high_factor = std::stod(value);
        } else if (key == "trigger") {
          if (value == "ahead") m.trigger = Trigger::ahead;
          else if (value == "behind") m.trigger = Trigger::behind;
          else if (value == "alternate") m.trigger = Trigger::alternate;
          else throw MalformedInput("unknown trigger '" + value + "'", lineno);
        } else {
          throw MalformedInput("unknown key '" + key + "'", lineno);
        }
      } catch (const std::invalid_argument&) {
        throw MalformedInput("bad number for " + key, lineno);
      }
    }
    for (double f : {m.low_factor, m.high_factor})
      if (f < 0 || f > 1) throw ValidationError("factor", "must lie in [0, 1] so that q_i <= q");
    return m;
  }
};

struct TailReport {
  std::string model;
  std::uint64_t steps = 0;
  double q = 0;
  double offset = 0;
  std::uint64_t runs = 0;
  std::uint64_t exceed = 0;  // runs with at least qN + m successes
  double fraction = 0;
  Interval wilson;
  double bound = 0;
  double tolerance = 0;  // bound + 3 sqrt(bound / runs)
  bool within_bound = false;
};

/// Runs the process `runs` times, each on its own stream (seed, run index), and
/// compares the frequency of {at least qN + m successes} with the corollary bound.
inline TailReport empirical_tail_check(const TailModel& model, std::uint64_t steps, double q, double offset,
                                       std::uint64_t runs, std::uint64_t seed, unsigned threads = 1) {
  if (q < 0 || q > 1) throw std::invalid_argument("q must lie in [0, 1]");
  const double threshold = q * static_cast<double>(steps) + offset - 1e-9;
  std::vector<std::uint8_t> hit(runs, 0);
  parallel_for(runs, threads, [&](std::size_t r) {
    Rng rng(seed, r);
    std::uint64_t successes = 0;
    for (std::uint64_t i = 0; i < steps; ++i) successes += rng.uniform() < model.step_probability(q, i, successes);
    hit[r] = static_cast<double>(successes) >= threshold;
  });
  TailReport rep;
  rep.model = model.name();
  rep.steps = steps;
  rep.q = q;
  rep.offset = offset;
  rep.runs = runs;
  for (auto h : hit) rep.exceed += h;
  rep.fraction = runs ? static_cast<double>(rep.exceed) / static_cast<double>(runs) : 0.0;
  rep.wilson = wilson_interval(rep.exceed, runs);
  rep.bound = corollary_tail_bound(static_cast<double>(steps), q, offset);
  rep.tolerance = rep.bound + 3.0 * std::sqrt(rep.bound / static_cast<double>(std::max<std::uint64_t>(runs, 1)));
  rep.within_bound = rep.fraction <= rep.tolerance;
  return rep;
}

}  // namespace orhc
