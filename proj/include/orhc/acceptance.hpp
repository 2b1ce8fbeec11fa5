#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "orhc/complete.hpp"
#include "orhc/count.hpp"
#include "orhc/embed.hpp"
#include "orhc/io.hpp"
#include "orhc/pack.hpp"
#include "orhc/randgen.hpp"
#include "orhc/stats.hpp"

namespace orhc {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

struct AcceptanceOptions {
  std::filesystem::path dir = "acceptance_out";
  std::uint64_t seed = 20240611;
  unsigned threads = 1;
  std::vector<int> only;  // empty: all criteria
};

namespace accept {

using std::filesystem::path;

inline std::string fmt(double x) { return format_double(x); }

inline std::string fixed(double x, int digits = 4) {
  std::ostringstream os;
  os << std::setprecision(digits) << x;
  return os.str();
}

inline std::ofstream open(const path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  return f;
}

inline std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t stream) { return Rng(seed, stream)(); }

// Exact counting oracle vs SIS.
inline CriterionResult sis_vs_brute(const path& dir, std::uint64_t seed, unsigned threads) {
  auto f = open(dir / "c1_sis_vs_brute.csv");
  CsvWriter csv(f, {"n", "sigma_index", "sigma", "graph_index", "exact", "estimate", "std_error", "within_3se"});
  std::uint64_t total = 0, good = 0;
  for (std::size_t n = 3; n <= 7; ++n) {
    Rng sigma_rng(seed, 100 + n);
    std::vector<Orientation> sigmas;
    for (int j = 0; j < 20; ++j) sigmas.push_back(Orientation::random(n, sigma_rng));
    for (std::uint64_t g = 0; g < 20; ++g) {
      const auto d = sample_dnp(n, 0.5, sub_seed(seed, 1000 + 100 * n + g));
      for (std::size_t j = 0; j < sigmas.size(); ++j) {
        const auto exact = brute_count(d, sigmas[j]);
        const auto rep = sis_count_cycles(d, sigmas[j], 100000, sub_seed(seed, 100000 + 10000 * n + 100 * g + j), threads);
        const double diff = std::abs(rep.estimate - static_cast<double>(exact));
        const bool within = diff <= 3 * rep.std_error + 1e-9 * std::max(1.0, static_cast<double>(exact));
        ++total;
        good += within;
        csv.row({std::to_string(n), std::to_string(j), sigmas[j].to_string(), std::to_string(g), std::to_string(exact),
                 fmt(rep.estimate), fmt(rep.std_error), within ? "1" : "0"});
      }
    }
  }
  const double frac = static_cast<double>(good) / static_cast<double>(total);
  return {1, "SIS estimate within 3 SE of brute_count", frac >= 0.95,
          std::to_string(good) + "/" + std::to_string(total) + " pairs within 3 SE (" + fixed(100 * frac) +
              "%, need >= 95%)"};
}

// Expectation formula at n = 6.
inline CriterionResult expectation_formula(const path& dir, std::uint64_t seed) {
  auto f = open(dir / "c2_expectation.csv");
  CsvWriter csv(f, {"graph_index", "count"});
  const auto sigma = Orientation::consistent(6);
  double sum = 0;
  for (std::uint64_t g = 0; g < 500; ++g) {
    const auto c = brute_count(sample_dnp(6, 0.5, sub_seed(seed, 2000 + g)), sigma);
    sum += static_cast<double>(c);
    csv.row({std::to_string(g), std::to_string(c)});
  }
  const double mean = sum / 500, formula = expected_copies(6, 0.5, sigma);
  const double rel = std::abs(mean - formula) / formula;
  csv.row({"mean", fmt(mean)});
  csv.row({"formula", fmt(formula)});
  return {2, "mean brute_count vs n!/|Aut| p^n", rel <= 0.10,
          "mean " + fixed(mean) + " vs formula " + fixed(formula) + " (rel. error " + fixed(100 * rel, 3) +
              "%, need <= 10%)"};
}

// Embedding-lemma event probabilities.
inline CriterionResult embedding_events(const path& dir, std::uint64_t seed, unsigned threads) {
  const std::size_t n = 400, ell = 360, delta = 5;
  const auto host = remove_random_permutations(Digraph::complete(n), delta - 1, sub_seed(seed, 3000));
  const double lower = std::log(static_cast<double>(n)) / static_cast<double>(n - ell - delta);
  const auto window = check_param_window(n, ell, delta, lower);
  Rng srng(seed, 3001);
  const EmbedParams params{ell, lower, Orientation::random(ell - 1, srng)};
  const auto ev = estimate_event_probs(host, params, 2000, sub_seed(seed, 3002), 200, threads);
  const double b_fail = 0.02, b_e = 1.25 * ev.bound_exposed, b_a = 1.25 * ev.bound_avoided;
  const bool ok_f = ev.pr_fail <= b_fail, ok_e = ev.max_exposed.probability <= b_e,
             ok_a = ev.max_avoided.probability <= b_a;
  {
    auto f = open(dir / "c3_embedding.csv");
    CsvWriter csv(f, {"metric", "value", "bound", "pass"});
    csv.row({"semi_degree", std::to_string(semi_degree(host)), std::to_string(n - delta), "1"});
    csv.row({"window_lower", fmt(window.lower), "", ""});
    csv.row({"window_upper", fmt(window.upper), "", window.empty ? "empty" : ""});
    csv.row({"p_ex", fmt(lower), "", ""});
    csv.row({"pr_fail", fmt(ev.pr_fail), fmt(b_fail), ok_f ? "1" : "0"});
    csv.row({"max_pr_exposed", fmt(ev.max_exposed.probability), fmt(b_e), ok_e ? "1" : "0"});
    csv.row({"mean_pr_exposed", fmt(ev.mean_exposed), fmt(ev.bound_exposed), ""});
    csv.row({"max_pr_avoided", fmt(ev.max_avoided.probability), fmt(b_a), ok_a ? "1" : "0"});
    csv.row({"mean_pr_avoided", fmt(ev.mean_avoided), fmt(ev.bound_avoided), ""});
  }
  {
    auto f = open(dir / "c3_panel.csv");
    CsvWriter csv(f, {"u", "v", "pr_exposed", "pr_avoided"});
    for (std::size_t k = 0; k < ev.exposed.size(); ++k)
      csv.row({std::to_string(ev.exposed[k].pair.from), std::to_string(ev.exposed[k].pair.to),
               fmt(ev.exposed[k].probability), fmt(ev.avoided[k].probability)});
  }
  std::string detail = "Pr[F]=" + fixed(ev.pr_fail) + (ok_f ? " ok" : " FAIL") + "; max Pr[E]=" +
                       fixed(ev.max_exposed.probability) + " vs " + fixed(b_e) + (ok_e ? " ok" : " FAIL") +
                       "; max Pr[A]=" + fixed(ev.max_avoided.probability) + " vs " + fixed(b_a) +
                       (ok_a ? " ok" : " FAIL") + "; p_ex=" + fixed(lower) +
                       (window.empty ? " (window empty, lower endpoint used)" : "");
  return {3, "embedding failure/exposure/avoidance rates", ok_f && ok_e && ok_a, detail};
}

inline std::vector<Orientation> mixed_suite(std::size_t n, std::size_t t, Rng& rng) {
  std::vector<Orientation> out;
  for (std::size_t i = 0; i < t; ++i) {
    if (i % 3 == 0) out.push_back(Orientation::consistent(n));
    else if (i % 3 == 1) out.push_back(Orientation::antidirected(n));
    else out.push_back(Orientation::random(n, rng));
  }
  return out;
}

// Packing pipeline plus property (c) statistics from the same runs.
inline std::vector<CriterionResult> packing(const path& dir, std::uint64_t seed, unsigned threads) {
  const std::size_t n = 128, runs = 20;
  const double p = 0.25, eps = 0.5;
  auto f = open(dir / "c4_packing.csv");
  CsvWriter csv(f, {"run", "success", "stage", "failed_index", "completed", "verified", "max_x", "x_budget",
                    "max_queried", "max_y", "y_bound", "property_c"});
  std::size_t ok = 0, verified = 0, x_ok = 0, stage1_ok = 0, c_ok = 0, c_stage1 = 0;
  for (std::size_t r = 0; r < runs; ++r) {
    Rng srng(seed, 4000 + r);
    const auto params = make_pack_params(n, p, eps);
    const auto sigmas = mixed_suite(n, params.t, srng);
    const auto res = pack_cycles(sigmas, n, p, eps, sub_seed(seed, 4100 + r), {}, threads);
    const bool v = res.success && verify_packing(res, sigmas).ok;
    if (res.success) {
      ++ok;
      verified += v;
      x_ok += res.property_b;
      c_ok += res.property_c;
    }
    if (res.success || res.stage == "stage2") {
      ++stage1_ok;
      c_stage1 += res.property_c;
    }
    csv.row({std::to_string(r), res.success ? "1" : "0", res.stage, std::to_string(res.failed_index),
             std::to_string(res.completed), v ? "1" : "0", std::to_string(res.max_x.value), fmt(res.x_budget),
             std::to_string(res.max_queried.value), std::to_string(res.max_y.value), fmt(res.y_bound),
             res.stage == "stage1" ? "" : (res.property_c ? "1" : "0")});
  }
  const double rate = static_cast<double>(ok) / runs;
  CriterionResult c4{4, "packing pipeline success and verification",
                     rate >= 0.85 && verified == ok && x_ok == ok,
                     std::to_string(ok) + "/" + std::to_string(runs) + " runs succeeded (need >= 85%); " +
                         std::to_string(verified) + " verified, " + std::to_string(x_ok) +
                         " within X budget; stage 1 completed in " + std::to_string(stage1_ok) + " runs"};
  CriterionResult c5{5, "property (c): max Y within (1+eps) t ((n-ell)/n)^2", false, ""};
  if (ok == 0) {
    c5.detail = "no successful runs to evaluate; over the " + std::to_string(stage1_ok) +
                " runs that finished stage 1, " + std::to_string(c_stage1) + " met the bound";
  } else {
    const double fc = static_cast<double>(c_ok) / static_cast<double>(ok);
    c5.pass = fc >= 0.95;
    c5.detail = std::to_string(c_ok) + "/" + std::to_string(ok) + " successful runs within bound (need >= 95%)";
  }
  return {c4, c5};
}

// Completion lemma rendering with exact and randomized solvers.
inline CriterionResult completion(const path& dir, std::uint64_t seed) {
  auto f = open(dir / "c6_completion.csv");
  CsvWriter csv(f, {"w", "instance", "semi_degree", "edges", "exact_found", "randomized_found", "randomized_valid"});
  bool all_pass = true, sound = true;
  std::string detail;
  for (std::size_t w : {16, 20}) {
    const double q = std::min(1.0, 6 * std::log(static_cast<double>(w)) / static_cast<double>(w));
    std::size_t found = 0;
    for (std::uint64_t i = 0; i < 300; ++i) {
      Rng rng(seed, 6000 + 1000 * w + i);
      const auto g = remove_random_permutations(Digraph::complete(w), 2, rng());
      CompletionInstance inst;
      inst.host = sample_subdigraph(g, q, rng());
      inst.a = static_cast<Vertex>(rng.below(w));
      do inst.b = static_cast<Vertex>(rng.below(w));
      while (inst.b == inst.a);
      inst.sigma = Orientation::random(w - 1, rng);
      const auto ex = exact_sigma_path(inst);
      const auto rz = randomized_sigma_path(inst, 1000000, rng());
      const bool ex_ok = ex && is_completion(inst, *ex);
      const bool rz_valid = !rz || (is_completion(inst, *rz) && ex);
      found += ex_ok;
      sound = sound && rz_valid && (!ex || ex_ok);
      csv.row({std::to_string(w), std::to_string(i), std::to_string(semi_degree(g)),
               std::to_string(inst.host.edge_count()), ex_ok ? "1" : "0", rz ? "1" : "0", rz_valid ? "1" : "0"});
    }
    const double rate = found / 300.0;
    all_pass = all_pass && rate >= 0.95;
    detail += "|W|=" + std::to_string(w) + ": " + std::to_string(found) + "/300 exact; ";
  }
  detail += sound ? "every returned path validated" : "an invalid path was returned";
  return {6, "completion lemma: exact DP success, solver soundness", all_pass && sound, detail};
}

// Concentration bound harness.
inline CriterionResult concentration(const path& dir, std::uint64_t seed, unsigned threads) {
  auto f = open(dir / "c7_concentration.csv");
  CsvWriter csv(f, {"model", "N", "q", "m", "runs", "exceed", "fraction", "bound", "tolerance", "pass"});
  bool all = true;
  std::uint64_t stream = 7000;
  for (const auto& model : {TailModel::iid(), TailModel::adaptive_default()}) {
    for (double m : {25.0, 50.0, 100.0}) {
      const auto rep = empirical_tail_check(model, 10000, 0.01, m, 10000, sub_seed(seed, stream++), threads);
      all = all && rep.within_bound;
      csv.row({rep.model, "10000", "0.01", fmt(m), "10000", std::to_string(rep.exceed), fmt(rep.fraction),
               fmt(rep.bound), fmt(rep.tolerance), rep.within_bound ? "1" : "0"});
    }
  }
  const double spot = submartingale_tail_bound({100, 0.1, 1, 10});
  const double want = std::exp(-3.75);
  const bool spot_ok = std::abs(spot - want) <= 1e-12 * want;
  const bool equal = corollary_tail_bound(100, 0.1, 10) == spot;
  csv.row({"spot", "100", "0.1", "10", "", "", "", fmt(spot), fmt(want), spot_ok && equal ? "1" : "0"});
  return {7, "corollary tail bound holds empirically; spot value", all && spot_ok && equal,
          std::string(all ? "all 6 cells within bound + 3 sqrt(bound/runs)" : "a cell exceeded its tolerance") +
              "; spot " + fmt(spot) + (spot_ok && equal ? " == exp(-3.75)" : " != exp(-3.75)")};
}

// Threshold probe monotonicity.
inline CriterionResult threshold(const path& dir, std::uint64_t seed, unsigned threads) {
  Rng srng(seed, 9000);
  const auto sigma = Orientation::random(16, srng);
  const auto pts = threshold_probe(16, {-2, 0, 2, 4}, sigma, 500, sub_seed(seed, 9001), threads);
  auto f = open(dir / "c9_threshold.csv");
  CsvWriter csv(f, {"c", "p", "trials", "hits", "probability", "ci_lower", "ci_upper"});
  bool mono = true;
  std::string detail = "sigma " + sigma.to_string() + ":";
  for (std::size_t k = 0; k < pts.size(); ++k) {
    if (k && pts[k].probability < pts[k - 1].probability) mono = false;
    csv.row({fmt(pts[k].c), fmt(pts[k].p), std::to_string(pts[k].trials), std::to_string(pts[k].hits),
             fmt(pts[k].probability), fmt(pts[k].ci.lower), fmt(pts[k].ci.upper)});
    detail += " c=" + fmt(pts[k].c) + ":" + fixed(pts[k].probability, 3);
  }
  return {9, "threshold probe nondecreasing in c", mono, detail};
}

inline bool wanted(const AcceptanceOptions& o, int id) {
  return o.only.empty() || std::find(o.only.begin(), o.only.end(), id) != o.only.end();
}

// Runs criteria 1-7 (those selected) writing into `dir`.
inline std::vector<CriterionResult> run_core(const AcceptanceOptions& o, const path& dir,
                                             const std::function<void(const CriterionResult&)>& report) {
  std::filesystem::create_directories(dir);
  std::vector<CriterionResult> out;
  auto timed = [&](auto&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<CriterionResult> rs;
    if constexpr (std::is_same_v<decltype(fn()), CriterionResult>) rs.push_back(fn());
    else rs = fn();
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (auto& r : rs) {
      r.seconds = s;
      if (report) report(r);
      out.push_back(r);
    }
  };
  if (wanted(o, 1)) timed([&] { return sis_vs_brute(dir, o.seed, o.threads); });
  if (wanted(o, 2)) timed([&] { return expectation_formula(dir, o.seed); });
  if (wanted(o, 3)) timed([&] { return embedding_events(dir, o.seed, o.threads); });
  if (wanted(o, 4) || wanted(o, 5)) timed([&] { return packing(dir, o.seed, o.threads); });
  if (wanted(o, 6)) timed([&] { return completion(dir, o.seed); });
  if (wanted(o, 7)) timed([&] { return concentration(dir, o.seed, o.threads); });
  return out;
}

inline std::string slurp(const path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace accept

inline std::string format_criterion(const CriterionResult& r) {
  std::ostringstream os;
  os << (r.pass ? "PASS" : "FAIL") << "  [" << r.id << "] " << r.name << " -- " << r.detail << " ("
     << std::fixed << std::setprecision(1) << r.seconds << " s)";
  return os.str();
}

/// Runs the acceptance criteria, printing one line per criterion to `log` as
/// each finishes. Output files carry no timings, so reruns compare byte-for-byte.
inline std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& o, std::ostream& log) {
  auto print = [&](const CriterionResult& r) { log << format_criterion(r) << std::endl; };
  std::filesystem::create_directories(o.dir / "run1");
  auto results = accept::run_core(o, o.dir / "run1", print);
  std::vector<CriterionResult> tail;
  if (accept::wanted(o, 9)) {
    const auto t0 = std::chrono::steady_clock::now();
    auto r = accept::threshold(o.dir / "run1", o.seed, o.threads);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    tail.push_back(r);
  }
  if (accept::wanted(o, 8)) {
    AcceptanceOptions again = o;
    again.only.clear();
    for (const auto& r : results) again.only.push_back(r.id);
    const auto t0 = std::chrono::steady_clock::now();
    accept::run_core(again, o.dir / "run2", nullptr);
    std::size_t same = 0, total = 0;
    std::string diffs;
    for (const auto& entry : std::filesystem::directory_iterator(o.dir / "run1")) {
      const auto name = entry.path().filename();
      if (name.string().starts_with("c9_")) continue;
      ++total;
      if (accept::slurp(entry.path()) == accept::slurp(o.dir / "run2" / name)) ++same;
      else diffs += " " + name.string();
    }
    CriterionResult r{8, "determinism: rerun of criteria 1-7 is byte-identical", total > 0 && same == total,
                      std::to_string(same) + "/" + std::to_string(total) + " files identical" +
                          (diffs.empty() ? "" : "; differing:" + diffs)};
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    print(r);
    results.push_back(r);
  }
  for (auto& r : tail) {
    print(r);
    results.push_back(r);
  }
  return results;
}

}  // namespace orhc
