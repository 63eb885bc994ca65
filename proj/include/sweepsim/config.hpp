#pragma once

#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "sweepsim/errors.hpp"
#include "sweepsim/model.hpp"

namespace sweepsim {

enum class RunMode { Simulate, Analytic, Compare, Diagnostics };

inline const char* to_string(RunMode m) {
  switch (m) {
    case RunMode::Simulate: return "simulate";
    case RunMode::Analytic: return "analytic";
    case RunMode::Compare: return "compare";
    case RunMode::Diagnostics: return "diagnostics";
  }
  return "?";
}

/// Everything one experiment needs: model parameters, sampling/replication
/// sizes, seeding, and output paths.
struct ExperimentConfig {
  EcoParams params;
  std::int64_t d = 1;
  std::int64_t n_fixed = 0;
  std::uint64_t master_seed = 0;
  double eps_diag = 0.1;
  std::string out_csv;   // empty: no per-replicate CSV
  std::string out_json;  // empty: summary to stdout
  std::optional<RunMode> mode;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(std::string_view value, int line, const char* key) {
  T out{};
  const char* first = value.data();
  const char* last = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last)
    throw ConfigError(line, std::string("key '") + key + "': expected " +
                                (std::is_integral_v<T> ? "an integer" : "a number") +
                                ", got '" + std::string(value) + "'");
  return out;
}

}  // namespace detail

/// Parses the flat key-value experiment config (one `key = value` per line,
/// `#` comments). Unknown keys, duplicates, conflicting alternatives (r1 vs
/// r1_logK), missing required keys, and malformed values are each rejected
/// with the offending line.
inline ExperimentConfig parse_config(std::string_view text) {
  struct Entry {
    std::string value;
    int line;
  };
  std::map<std::string, Entry, std::less<>> seen;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos
                                                                           : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(line_no, "expected 'key = value', got '" + std::string(line) + "'");
    const std::string key{detail::trim(line.substr(0, eq))};
    const std::string value{detail::trim(line.substr(eq + 1))};
    if (key.empty()) throw ConfigError(line_no, "empty key");
    if (value.empty()) throw ConfigError(line_no, "key '" + key + "' has no value");
    if (seen.count(key)) throw ConfigError(line_no, "duplicate key '" + key + "'");
    seen.emplace(key, Entry{value, line_no});
  }

  static constexpr const char* known[] = {
      "f_A", "f_a", "D_A", "D_a", "C_AA", "C_Aa", "C_aA", "C_aa", "K",
      "r1", "r1_logK", "r2", "r2_logK", "geometry", "d", "n_fixed",
      "master_seed", "eps_diag", "out_csv", "out_json", "mode"};
  for (const auto& [key, entry] : seen) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw ConfigError(entry.line, "unknown key '" + key + "'");
  }

  auto get = [&](const char* key) -> const Entry* {
    const auto it = seen.find(key);
    return it == seen.end() ? nullptr : &it->second;
  };
  auto require = [&](const char* key) -> const Entry& {
    const Entry* e = get(key);
    if (!e) throw ConfigError("missing required key '" + std::string(key) + "'");
    return *e;
  };
  auto number = [&](const Entry& e, const char* key) {
    return detail::parse_number<double>(e.value, e.line, key);
  };

  ExperimentConfig cfg;
  cfg.params.f_A = number(require("f_A"), "f_A");
  cfg.params.f_a = number(require("f_a"), "f_a");
  cfg.params.D_A = number(require("D_A"), "D_A");
  cfg.params.D_a = number(require("D_a"), "D_a");
  cfg.params.C[0][0] = number(require("C_AA"), "C_AA");
  cfg.params.C[0][1] = number(require("C_Aa"), "C_Aa");
  cfg.params.C[1][0] = number(require("C_aA"), "C_aA");
  cfg.params.C[1][1] = number(require("C_aa"), "C_aa");
  cfg.params.K = detail::parse_number<std::int64_t>(require("K").value, require("K").line, "K");

  for (auto [direct, scaled, slot] :
       {std::tuple{"r1", "r1_logK", &cfg.params.r1}, std::tuple{"r2", "r2_logK", &cfg.params.r2}}) {
    const Entry* e_direct = get(direct);
    const Entry* e_scaled = get(scaled);
    if (e_direct && e_scaled)
      throw ConfigError(e_scaled->line, std::string("conflicting keys '") + direct + "' and '" +
                                            scaled + "'");
    if (!e_direct && !e_scaled)
      throw ConfigError(std::string("missing required key '") + direct + "' (or '" + scaled + "')");
    if (e_direct) {
      *slot = number(*e_direct, direct);
    } else {
      const double product = number(*e_scaled, scaled);
      if (cfg.params.K < 2)
        throw ConfigError(e_scaled->line,
                          std::string("key '") + scaled + "' requires K >= 2 (log K = 0 otherwise)");
      *slot = r_from_log_k(product, cfg.params.K);
    }
  }

  {
    const Entry& e = require("geometry");
    if (e.value == "adjacent") cfg.params.geometry = Geometry::Adjacent;
    else if (e.value == "separated") cfg.params.geometry = Geometry::Separated;
    else throw ConfigError(e.line, "key 'geometry': expected 'adjacent' or 'separated', got '" +
                                       e.value + "'");
  }
  if (const Entry* e = get("mode")) {
    if (e->value == "simulate") cfg.mode = RunMode::Simulate;
    else if (e->value == "analytic") cfg.mode = RunMode::Analytic;
    else if (e->value == "compare") cfg.mode = RunMode::Compare;
    else if (e->value == "diagnostics") cfg.mode = RunMode::Diagnostics;
    else throw ConfigError(e->line, "key 'mode': expected one of simulate|analytic|compare|diagnostics, got '" +
                                        e->value + "'");
  }

  if (const Entry* e = get("d")) cfg.d = detail::parse_number<std::int64_t>(e->value, e->line, "d");
  if (const Entry* e = get("n_fixed"))
    cfg.n_fixed = detail::parse_number<std::int64_t>(e->value, e->line, "n_fixed");
  if (const Entry* e = get("master_seed"))
    cfg.master_seed = detail::parse_number<std::uint64_t>(e->value, e->line, "master_seed");
  if (const Entry* e = get("eps_diag")) cfg.eps_diag = number(*e, "eps_diag");
  if (const Entry* e = get("out_csv")) cfg.out_csv = e->value;
  if (const Entry* e = get("out_json")) cfg.out_json = e->value;

  try {
    cfg.params.check();
  } catch (const std::invalid_argument& err) {
    throw ConfigError(err.what());
  }
  if (cfg.d < 1) throw ConfigError("d must be at least 1");
  if (!(cfg.eps_diag > 0 && cfg.eps_diag < 1)) throw ConfigError("eps_diag must lie in (0,1)");
  return cfg;
}

/// Mode-dependent completeness checks, applied once the effective mode is
/// known (the file's `mode` key or the CLI subcommand).
inline void finalize_config(const ExperimentConfig& cfg, RunMode mode) {
  const bool needs_replicates =
      mode == RunMode::Simulate || mode == RunMode::Compare || mode == RunMode::Diagnostics;
  if (needs_replicates && cfg.n_fixed < 1)
    throw ConfigError(std::string("n_fixed must be at least 1 in ") + to_string(mode) + " mode");
}

}  // namespace sweepsim
