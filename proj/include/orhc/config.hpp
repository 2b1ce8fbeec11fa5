#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "orhc/error.hpp"
#include "orhc/io.hpp"

namespace orhc {

/// Flat experiment configuration shared by all subcommands. Each subcommand
/// reads the keys it needs; unset optionals mean "derive the default".
struct ExperimentConfig {
  std::uint64_t n = 16;
  double p = 0.5;
  double epsilon = 0.5;
  std::optional<std::uint64_t> t;
  std::optional<std::uint64_t> ell;
  std::optional<double> p_ex;
  std::optional<double> delta;
  std::optional<double> alpha;
  std::string sigma = "consistent";
  std::uint64_t seed = 1;
  std::uint64_t threads = 0;  // 0: ORHC_THREADS or hardware concurrency
  std::uint64_t samples = 100000;
  std::uint64_t trials = 200;
  std::uint64_t runs = 20;
  std::uint64_t exact_cap = 22;
  std::uint64_t budget = 1000000;
  std::vector<double> c_list{-2, 0, 2, 4};
  std::uint64_t N = 10000;
  double q = 0.01;
  double m = 50;
  std::string model = "iid";
  std::uint64_t a = 0;
  std::uint64_t b = 1;
  std::string graph;
  bool exact = false;
  std::string out;

  bool operator==(const ExperimentConfig&) const = default;
};

namespace detail {

template <class T>
bool parse_number(std::string_view s, T& out) {
  if (s.empty()) return false;
  if constexpr (std::is_floating_point_v<T>) {
    if (s.front() == '+') s.remove_prefix(1);
  }
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

struct ConfigField {
  std::string key;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

inline std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t x = 0;
  if (!parse_number(v, x)) throw ValidationError(key, "expected a non-negative integer, got '" + v + "'");
  return x;
}

inline double to_real(const std::string& key, const std::string& v) {
  double x = 0;
  if (!parse_number(v, x) || !std::isfinite(x)) throw ValidationError(key, "expected a finite number, got '" + v + "'");
  return x;
}

inline void check_text(const std::string& key, const std::string& v) {
  if (v.find_first_of("#\r\n") != std::string::npos) throw ValidationError(key, "must not contain '#' or line breaks");
  if (!v.empty() && (std::isspace(static_cast<unsigned char>(v.front())) || std::isspace(static_cast<unsigned char>(v.back()))))
    throw ValidationError(key, "must not start or end with whitespace");
}

#define ORHC_U64(name) \
  {#name, [](ExperimentConfig& c, const std::string& v) { c.name = to_u64(#name, v); }, \
   [](const ExperimentConfig& c) { return std::to_string(c.name); }}
#define ORHC_REAL(name) \
  {#name, [](ExperimentConfig& c, const std::string& v) { c.name = to_real(#name, v); }, \
   [](const ExperimentConfig& c) { return format_double(c.name); }}
#define ORHC_OPT_U64(name) \
  {#name, \
   [](ExperimentConfig& c, const std::string& v) { \
     if (v == "auto") c.name.reset(); else c.name = to_u64(#name, v); \
   }, \
   [](const ExperimentConfig& c) { return c.name ? std::to_string(*c.name) : std::string("auto"); }}
#define ORHC_OPT_REAL(name) \
  {#name, \
   [](ExperimentConfig& c, const std::string& v) { \
     if (v == "auto") c.name.reset(); else c.name = to_real(#name, v); \
   }, \
   [](const ExperimentConfig& c) { return c.name ? format_double(*c.name) : std::string("auto"); }}
#define ORHC_TEXT(name) \
  {#name, [](ExperimentConfig& c, const std::string& v) { check_text(#name, v); c.name = v; }, \
   [](const ExperimentConfig& c) { return c.name; }}

inline const std::vector<ConfigField>& config_fields() {
  static const std::vector<ConfigField> fields = {
      ORHC_U64(n), ORHC_REAL(p), ORHC_REAL(epsilon), ORHC_OPT_U64(t), ORHC_OPT_U64(ell), ORHC_OPT_REAL(p_ex),
      ORHC_OPT_REAL(delta), ORHC_OPT_REAL(alpha), ORHC_TEXT(sigma), ORHC_U64(seed), ORHC_U64(threads),
      ORHC_U64(samples), ORHC_U64(trials), ORHC_U64(runs), ORHC_U64(exact_cap), ORHC_U64(budget),
      {"c_list",
       [](ExperimentConfig& c, const std::string& v) {
         std::vector<double> xs;
         std::string item;
         std::istringstream in(v);
         while (std::getline(in, item, ',')) {
           item.erase(0, item.find_first_not_of(' '));
           item.erase(item.find_last_not_of(' ') + 1);
           xs.push_back(to_real("c_list", item));
         }
         c.c_list = std::move(xs);
       },
       [](const ExperimentConfig& c) {
         std::string s;
         for (std::size_t i = 0; i < c.c_list.size(); ++i) s += (i ? "," : "") + format_double(c.c_list[i]);
         return s;
       }},
      ORHC_U64(N), ORHC_REAL(q), ORHC_REAL(m), ORHC_TEXT(model), ORHC_U64(a), ORHC_U64(b), ORHC_TEXT(graph),
      {"exact",
       [](ExperimentConfig& c, const std::string& v) {
         if (v == "true" || v == "1") c.exact = true;
         else if (v == "false" || v == "0") c.exact = false;
         else throw ValidationError("exact", "expected true or false, got '" + v + "'");
       },
       [](const ExperimentConfig& c) { return std::string(c.exact ? "true" : "false"); }},
      ORHC_TEXT(out),
  };
  return fields;
}

#undef ORHC_U64
#undef ORHC_REAL
#undef ORHC_OPT_U64
#undef ORHC_OPT_REAL
#undef ORHC_TEXT

inline std::string trim(std::string s) {
  s.erase(0, s.find_first_not_of(" \t\r"));
  s.erase(s.find_last_not_of(" \t\r") + 1);
  return s;
}

}  // namespace detail

/// Sets one key from its text form. Keys accept '-' in place of '_'.
inline void set_config_value(ExperimentConfig& cfg, std::string key, const std::string& value) {
  for (auto& ch : key)
    if (ch == '-') ch = '_';
  for (const auto& f : detail::config_fields())
    if (f.key == key) return f.set(cfg, value);
  throw ValidationError(key, "unknown configuration key");
}

inline void validate_config(const ExperimentConfig& c) {
  auto prob = [](const char* k, double x) {
    if (!(x >= 0 && x <= 1)) throw ValidationError(k, "must lie in [0, 1]");
  };
  if (c.n < 1) throw ValidationError("n", "must be >= 1");
  prob("p", c.p);
  prob("q", c.q);
  if (!(c.epsilon > 0 && c.epsilon < 1)) throw ValidationError("epsilon", "must lie in (0, 1)");
  if (c.p_ex && !(*c.p_ex > 0 && *c.p_ex <= 1)) throw ValidationError("p_ex", "must lie in (0, 1]");
  if (c.ell && *c.ell < 2) throw ValidationError("ell", "must be >= 2");
  if (c.delta && *c.delta < 0) throw ValidationError("delta", "must be >= 0");
  if (c.alpha && *c.alpha <= 0) throw ValidationError("alpha", "must be > 0");
  if (c.m < 0) throw ValidationError("m", "must be >= 0");
  for (auto [k, v] : {std::pair{"samples", c.samples}, {"trials", c.trials}, {"runs", c.runs}, {"N", c.N}, {"budget", c.budget}})
    if (v < 1) throw ValidationError(k, "must be >= 1");
  if (c.sigma.empty()) throw ValidationError("sigma", "must not be empty");
  if (c.model != "iid" && c.model != "adaptive" && !c.model.starts_with("adaptive:"))
    throw ValidationError("model", "expected iid, adaptive or adaptive:<file>");
  if (c.c_list.empty()) throw ValidationError("c_list", "must not be empty");
}

/// Reads key = value lines; '#' starts a comment. Later keys override earlier ones.
inline ExperimentConfig read_config(std::istream& in, ExperimentConfig cfg = {}) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw MalformedInput("expected key = value", lineno);
    const auto key = detail::trim(line.substr(0, eq));
    if (key.empty()) throw MalformedInput("missing key", lineno);
    try {
      set_config_value(cfg, key, detail::trim(line.substr(eq + 1)));
    } catch (const ValidationError& e) {
      throw MalformedInput(std::string(e.what()), lineno);
    }
  }
  validate_config(cfg);
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path, ExperimentConfig defaults = {}) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  return read_config(in, std::move(defaults));
}

inline void write_config(std::ostream& out, const ExperimentConfig& cfg) {
  for (const auto& f : detail::config_fields()) out << f.key << " = " << f.get(cfg) << '\n';
}

inline std::string config_to_text(const ExperimentConfig& cfg) {
  std::ostringstream os;
  write_config(os, cfg);
  return os.str();
}

inline void save_config(const std::string& path, const ExperimentConfig& cfg) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_config(out, cfg);
}

}  // namespace orhc
