#pragma once

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "orhc/acceptance.hpp"
#include "orhc/complete.hpp"
#include "orhc/config.hpp"
#include "orhc/count.hpp"
#include "orhc/embed.hpp"
#include "orhc/io.hpp"
#include "orhc/pack.hpp"
#include "orhc/parallel.hpp"
#include "orhc/randgen.hpp"
#include "orhc/stats.hpp"

namespace orhc {

inline constexpr const char* kVersion = "orhc 0.1.0";

enum ExitCode : int { kOk = 0, kAlgorithmFailed = 1, kUsage = 2 };

namespace cli {

inline const std::map<std::string, std::string>& flag_help() {
  static const std::map<std::string, std::string> h = {
      {"n", "vertex count"},
      {"p", "edge probability"},
      {"epsilon", "packing slack in (0, 1)"},
      {"t", "number of cycles to pack, or auto"},
      {"ell", "path length in vertices, or auto"},
      {"p_ex", "exposure probability, or auto"},
      {"delta", "semi-degree deficit of the embedding host, or auto"},
      {"alpha", "packing scale parameter, or auto"},
      {"sigma", "orientation: consistent, antidirected, random, a +/- string, or a file"},
      {"seed", "master seed"},
      {"threads", "worker threads (0: ORHC_THREADS or all cores)"},
      {"samples", "SIS samples"},
      {"trials", "independent trials"},
      {"runs", "independent runs"},
      {"exact_cap", "largest |W| handled by the exact DP"},
      {"budget", "randomized solver step budget"},
      {"c_list", "comma-separated offsets c in p = (ln n + c)/n"},
      {"N", "number of steps"},
      {"q", "per-step probability bound"},
      {"m", "tail offset"},
      {"model", "iid, adaptive or adaptive:<file>"},
      {"a", "first endpoint"},
      {"b", "last endpoint"},
      {"graph", "digraph file (n m header, then u v lines)"},
      {"out", "output path (default stdout)"},
  };
  return h;
}

inline std::string dashed(std::string key) {
  for (auto& c : key)
    if (c == '_') c = '-';
  return key;
}

/// Per-subcommand flag values kept as raw text and applied through the config
/// setter, so flags and config files share one parser and one validator.
struct Bindings {
  std::string config_path;
  std::string save_config;
  std::map<std::string, std::string> raw;
  std::map<std::string, CLI::Option*> opts;
  bool exact = false;
  CLI::Option* exact_opt = nullptr;

  ExperimentConfig resolve() const {
    ExperimentConfig cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    for (const auto& [key, opt] : opts)
      if (opt->count()) set_config_value(cfg, key, raw.at(key));
    if (exact_opt && exact_opt->count()) cfg.exact = exact;
    validate_config(cfg);
    if (!save_config.empty()) save_config_file(cfg);
    return cfg;
  }

 private:
  void save_config_file(const ExperimentConfig& cfg) const { orhc::save_config(save_config, cfg); }
};

inline void bind(CLI::App* sub, Bindings& b, const std::vector<std::string>& keys,
                 const std::map<std::string, std::string>& aliases = {}) {
  sub->add_option("--config", b.config_path, "key = value config file; flags override it");
  sub->add_option("--save-config", b.save_config, "write the effective config to this path");
  for (const auto& k : keys) {
    std::string name = "--" + dashed(k);
    if (auto it = aliases.find(k); it != aliases.end()) name += ",--" + it->second;
    b.opts[k] = sub->add_option(name, b.raw[k], flag_help().at(k));
  }
}

inline unsigned threads_of(const ExperimentConfig& c) {
  return c.threads ? static_cast<unsigned>(c.threads) : default_threads();
}

inline std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t stream) { return Rng(seed, stream)(); }

inline bool is_pattern(const std::string& s) {
  if (s.empty()) return false;
  try {
    Orientation::parse(s);
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

inline std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open sigma file " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    lines.push_back(line);
  }
  return lines;
}

/// Orientation patterns of length k. Keywords generate `count` patterns; a
/// literal pattern is repeated; a file supplies one pattern per line.
inline std::vector<Orientation> resolve_sigmas(const std::string& spec, std::size_t k, std::size_t count, Rng& rng) {
  std::vector<Orientation> out;
  if (spec == "consistent" || spec == "antidirected" || spec == "random" || spec == "mixed") {
    for (std::size_t i = 0; i < count; ++i) {
      const std::string kind = spec != "mixed" ? spec : (i % 3 == 0 ? "consistent" : i % 3 == 1 ? "antidirected" : "random");
      if (kind == "consistent") out.push_back(Orientation::consistent(k));
      else if (kind == "antidirected") out.push_back(Orientation::antidirected(k));
      else out.push_back(Orientation::random(k, rng));
    }
    return out;
  }
  std::vector<std::string> texts;
  if (is_pattern(spec)) texts.assign(count, spec);
  else texts = read_lines(spec);
  for (const auto& t : texts) {
    auto s = Orientation::parse(t);
    if (s.size() != k)
      throw ValidationError("sigma", "pattern has " + std::to_string(s.size()) + " signs, expected " + std::to_string(k));
    out.push_back(std::move(s));
  }
  return out;
}

inline Orientation resolve_sigma(const std::string& spec, std::size_t k, Rng& rng) {
  auto v = resolve_sigmas(spec, k, 1, rng);
  if (v.empty()) throw ValidationError("sigma", "no pattern found");
  return v.front();
}

inline nlohmann::json edge_list(const std::vector<Edge>& es) {
  auto j = nlohmann::json::array();
  for (auto e : es) j.push_back({e.from, e.to});
  return j;
}

inline int cmd_gen(const ExperimentConfig& c, std::ostream&) {
  const auto d = sample_dnp(c.n, c.p, c.seed);
  OutputSink sink(c.out);
  write_digraph(sink.stream(), d);
  return kOk;
}

inline int cmd_embed(const ExperimentConfig& c, std::ostream& log) {
  const std::size_t n = c.n;
  const double ln = std::log(static_cast<double>(n));
  const std::size_t ell = c.ell ? *c.ell : n - static_cast<std::size_t>(std::ceil(static_cast<double>(n) / ln));
  const double delta = c.delta.value_or(0);
  if (ell > n) throw ValidationError("ell", "must be <= n");
  Digraph host = Digraph::complete(n);
  if (delta >= 1) host = remove_random_permutations(std::move(host), static_cast<std::size_t>(delta) - 1, sub_seed(c.seed, 1));
  double p_ex = 1.0;
  if (c.p_ex) {
    p_ex = *c.p_ex;
  } else if (static_cast<double>(n) - static_cast<double>(ell) - delta > 0) {
    const auto w = check_param_window(static_cast<double>(n), static_cast<double>(ell), delta, 1.0);
    p_ex = std::min(1.0, w.empty ? w.lower : w.slack * w.lower);
  }
  Rng srng(c.seed, 2);
  const EmbedParams params{ell, p_ex, resolve_sigma(c.sigma, ell - 1, srng)};
  const auto ev = estimate_event_probs(host, params, c.trials, sub_seed(c.seed, 3), 200, threads_of(c));
  OutputSink sink(c.out);
  CsvWriter csv(sink.stream(), {"trial", "result", "rounds", "exposures", "failed_round"});
  for (std::size_t t = 0; t < ev.per_trial.size(); ++t) {
    const auto& s = ev.per_trial[t];
    csv.row({std::to_string(t), s.success ? "success" : "failure", std::to_string(s.rounds),
             std::to_string(s.exposures), std::to_string(s.failed_round)});
  }
  log << "n=" << n << " ell=" << ell << " delta=" << delta << " p_ex=" << format_double(p_ex)
      << " Pr[F]=" << format_double(ev.pr_fail) << " max Pr[E]=" << format_double(ev.max_exposed.probability)
      << " (1/(n p_ex)=" << format_double(ev.bound_exposed) << ") max Pr[A]="
      << format_double(ev.max_avoided.probability) << " (((n-ell)/n)^2=" << format_double(ev.bound_avoided)
      << ")\n";
  return kOk;
}

inline int cmd_pack(const ExperimentConfig& c, std::ostream& log) {
  PackOverrides o;
  if (c.ell) o.ell = *c.ell;
  o.p_ex = c.p_ex;
  o.delta = c.delta;
  o.alpha = c.alpha;
  o.exact_cap = c.exact_cap;
  o.solver_budget = c.budget;
  const std::size_t t_auto = static_cast<std::size_t>(
      std::floor((1 - c.epsilon) * static_cast<double>(c.n) * c.p + 1e-9));
  const std::size_t t = c.t ? *c.t : t_auto;
  OutputSink sink(c.out);
  int code = kOk;
  std::size_t ok = 0;
  for (std::uint64_t r = 0; r < c.runs; ++r) {
    Rng srng(c.seed, 2 * r);
    auto sigmas = resolve_sigmas(c.sigma, c.n, t, srng);
    if (sigmas.size() > t) sigmas.resize(t);
    const std::uint64_t run_seed = sub_seed(c.seed, 2 * r + 1);
    const auto res = pack_cycles(sigmas, c.n, c.p, c.epsilon, run_seed, o, threads_of(c));
    const auto rep = verify_packing(res, sigmas);
    const bool success = res.success && rep.ok;
    ok += success;
    if (!success) code = kAlgorithmFailed;
    nlohmann::json j;
    j["version"] = kVersion;
    j["run"] = r;
    j["seed"] = run_seed;
    j["success"] = success;
    j["t"] = sigmas.size();
    j["stage_failed"] = res.stage;
    j["error"] = res.error;
    j["failed_index"] = res.failed_index;
    j["verify_problems"] = rep.ok || !res.success ? nlohmann::json::array() : nlohmann::json(rep.problems);
    auto cycles = nlohmann::json::array();
    for (const auto& cyc : res.cycles)
      cycles.push_back({{"sigma", cyc.sigma.to_string()}, {"vertices", cyc.vertices}, {"edges", edge_list(cyc.edges())}});
    j["cycles"] = cycles;
    j["ledger"] = {{"max_x", res.max_x.value},
                   {"x_budget", res.x_budget},
                   {"max_queried", res.max_queried.value},
                   {"max_y", res.max_y.value},
                   {"y_bound", res.y_bound},
                   {"property_b", res.property_b},
                   {"property_c", res.property_c},
                   {"coupling_ok", res.coupling_ok}};
    j["warnings"] = res.warnings;
    j["timing_ms"] = {{"stage1", res.stage1_ms}, {"stage2", res.stage2_ms}};
    write_json_line(sink.stream(), j);
  }
  log << ok << "/" << c.runs << " runs packed " << t << " cycles\n";
  return code;
}

inline int cmd_count(const ExperimentConfig& c, std::ostream&) {
  const Digraph d = c.graph.empty() ? sample_dnp(c.n, c.p, sub_seed(c.seed, 1)) : load_digraph(c.graph);
  Rng srng(c.seed, 2);
  const auto sigma = resolve_sigma(c.sigma, d.size(), srng);
  const auto rep = sis_count_cycles(d, sigma, c.samples, sub_seed(c.seed, 3), threads_of(c));
  std::string exact;
  if (c.exact) exact = std::to_string(brute_count(d, sigma));
  OutputSink sink(c.out);
  CsvWriter csv(sink.stream(), {"n", "p", "sigma", "samples", "estimate", "stderr", "exact", "formula"});
  csv.row({std::to_string(d.size()), c.graph.empty() ? format_double(c.p) : "", sigma.to_string(),
           std::to_string(c.samples), format_double(rep.estimate), format_double(rep.std_error), exact,
           c.graph.empty() ? format_double(expected_copies(d.size(), c.p, sigma)) : ""});
  return kOk;
}

inline int cmd_complete(const ExperimentConfig& c, std::ostream&) {
  if (c.graph.empty()) throw ValidationError("graph", "a digraph file is required");
  CompletionInstance inst;
  inst.host = load_digraph(c.graph);
  inst.a = static_cast<Vertex>(c.a);
  inst.b = static_cast<Vertex>(c.b);
  if (!is_pattern(c.sigma)) throw ValidationError("sigma", "expected a +/- pattern of |W| - 1 signs");
  inst.sigma = Orientation::parse(c.sigma);
  inst.validate();
  const auto path = inst.host.size() <= std::min<std::size_t>(c.exact_cap, kExactPathCap)
                        ? exact_sigma_path(inst)
                        : randomized_sigma_path(inst, c.budget, c.seed);
  OutputSink sink(c.out);
  if (!path) {
    sink.stream() << "NONE\n";
    return kAlgorithmFailed;
  }
  for (std::size_t i = 0; i < path->vertices.size(); ++i) sink.stream() << (i ? " " : "") << path->vertices[i];
  sink.stream() << '\n';
  return kOk;
}

inline int cmd_threshold(const ExperimentConfig& c, std::ostream&) {
  Rng srng(c.seed, 1);
  const auto sigma = resolve_sigma(c.sigma, c.n, srng);
  const auto pts = threshold_probe(c.n, c.c_list, sigma, c.trials, sub_seed(c.seed, 2), threads_of(c));
  OutputSink sink(c.out);
  CsvWriter csv(sink.stream(), {"c", "p", "trials", "hits", "probability", "ci_lower", "ci_upper"});
  for (const auto& pt : pts)
    csv.row({format_double(pt.c), format_double(pt.p), std::to_string(pt.trials), std::to_string(pt.hits),
             format_double(pt.probability), format_double(pt.ci.lower), format_double(pt.ci.upper)});
  return kOk;
}

inline int cmd_bound_check(const ExperimentConfig& c, std::ostream&) {
  TailModel model;
  if (c.model == "adaptive") {
    model = TailModel::adaptive_default();
  } else if (c.model.starts_with("adaptive:")) {
    std::ifstream in(c.model.substr(9));
    if (!in) throw std::runtime_error("cannot open model file " + c.model.substr(9));
    model = TailModel::load_adaptive(in);
  }
  const auto rep = empirical_tail_check(model, c.N, c.q, c.m, c.runs, c.seed, threads_of(c));
  OutputSink sink(c.out);
  CsvWriter csv(sink.stream(), {"model", "N", "q", "m", "runs", "exceed", "fraction", "wilson_lower", "wilson_upper",
                                "bound", "tolerance", "within_bound"});
  csv.row({rep.model, std::to_string(rep.steps), format_double(rep.q), format_double(rep.offset),
           std::to_string(rep.runs), std::to_string(rep.exceed), format_double(rep.fraction),
           format_double(rep.wilson.lower), format_double(rep.wilson.upper), format_double(rep.bound),
           format_double(rep.tolerance), rep.within_bound ? "1" : "0"});
  return rep.within_bound ? kOk : kAlgorithmFailed;
}

}  // namespace cli

/// Entry point for the orhc command line. Returns 0 on success, 1 when the
/// algorithm ran but failed (or a check did not hold), 2 on usage errors.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  using namespace cli;
  CLI::App app{"Oriented Hamilton cycles in random digraphs: generate, embed, pack, count, complete, probe."};
  app.name("orhc");
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  std::map<std::string, Bindings> b;
  std::map<std::string, std::function<int(const ExperimentConfig&, std::ostream&)>> handlers;
  auto sub = [&](const std::string& name, const std::string& desc, const std::vector<std::string>& keys,
                 std::function<int(const ExperimentConfig&, std::ostream&)> h,
                 const std::map<std::string, std::string>& aliases = {}) {
    auto* s = app.add_subcommand(name, desc);
    bind(s, b[name], keys, aliases);
    handlers[name] = std::move(h);
    return s;
  };

  sub("gen", "sample D(n, p) and write it in the text format", {"n", "p", "seed", "out"}, cmd_gen);
  sub("embed", "run the path embedding algorithm and report per-trial outcomes",
      {"n", "p_ex", "ell", "delta", "sigma", "trials", "seed", "threads", "out"}, cmd_embed);
  sub("pack", "pack edge-disjoint oriented Hamilton cycles, one JSON record per run",
      {"n", "p", "epsilon", "t", "sigma", "seed", "runs", "threads", "ell", "p_ex", "delta", "alpha", "exact_cap",
       "budget", "out"},
      cmd_pack, {{"sigma", "sigmas"}});
  auto* count = sub("count", "estimate the number of copies of an oriented Hamilton cycle",
                    {"n", "p", "sigma", "samples", "seed", "graph", "threads", "out"}, cmd_count);
  b["count"].exact_opt = count->add_flag("--exact", b["count"].exact, "also run the brute-force counter (n <= 10)");
  sub("complete", "find a spanning sigma-path between two vertices of a digraph",
      {"graph", "a", "b", "sigma", "budget", "exact_cap", "seed", "out"}, cmd_complete);
  sub("threshold", "probe Pr[copy exists] at p = (ln n + c)/n",
      {"n", "c_list", "sigma", "trials", "seed", "threads", "out"}, cmd_threshold);
  sub("bound-check", "compare empirical tails with the martingale bound",
      {"model", "N", "q", "m", "runs", "seed", "threads", "out"}, cmd_bound_check);

  auto* acc = app.add_subcommand("acceptance", "run the acceptance suite and print a pass/fail table");
  AcceptanceOptions aopt;
  std::string acc_dir = "acceptance_out";
  std::uint64_t acc_threads = 0;
  std::vector<int> only;
  acc->add_option("--out", acc_dir, "directory for result files");
  acc->add_option("--seed", aopt.seed, "master seed");
  acc->add_option("--threads", acc_threads, "worker threads (0: ORHC_THREADS or all cores)");
  acc->add_option("--only", only, "run only these criteria")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (acc->parsed()) {
      aopt.dir = acc_dir;
      aopt.threads = acc_threads ? static_cast<unsigned>(acc_threads) : default_threads();
      aopt.only = only;
      const auto results = run_acceptance(aopt, out);
      std::size_t pass = 0;
      for (const auto& r : results) pass += r.pass;
      out << pass << "/" << results.size() << " criteria passed\n";
      return pass == results.size() ? kOk : kAlgorithmFailed;
    }
    for (auto& [name, h] : handlers) {
      if (!app.got_subcommand(name)) continue;
      const auto cfg = b[name].resolve();
      return h(cfg, err);
    }
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const CapExceeded& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace orhc
