#pragma once

#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sweepsim/analytic.hpp"
#include "sweepsim/config.hpp"
#include "sweepsim/engine.hpp"
#include "sweepsim/errors.hpp"
#include "sweepsim/genealogy.hpp"
#include "sweepsim/harness.hpp"
#include "sweepsim/model.hpp"
#include "sweepsim/oracles.hpp"
#include "sweepsim/rng.hpp"

namespace sweepsim {

struct ExperimentOptions {
  int threads = 1;
  std::uint64_t attempt_cap = 0;             // 0: harness default
  std::uint64_t event_cap = 0;               // 0: engine default
  std::vector<std::int64_t> diag_levels;     // diagnostics mode; empty: {5,10,20}
};

/// Empirical per-individual class tallies plus the outside-Delta_d bucket.
struct ClassStats {
  std::array<std::uint64_t, 5> counts{};
  std::uint64_t outside = 0;
  std::uint64_t total = 0;

  double freq(std::size_t k) const {
    return total ? static_cast<double>(counts[k]) / static_cast<double>(total) : 0.0;
  }
  double outside_freq() const {
    return total ? static_cast<double>(outside) / static_cast<double>(total) : 0.0;
  }
  double se(std::size_t k) const {
    if (total == 0) return 0.0;
    const double p = freq(k);
    return std::sqrt(p * (1.0 - p) / static_cast<double>(total));
  }
};

struct UpcrossingDiagnostic {
  std::int64_t level = 0;
  double mean = 0;
  double expected = 0;  // NaN when the level falls outside [1, epsK)
  std::uint64_t runs = 0;
};

/// Everything run_experiment measures, compared against the analytic limit.
struct ComparisonSummary {
  RunMode mode = RunMode::Compare;
  // analytic side
  DerivedEco derived;
  AnalyticQs qs;
  AnalyticPs ps;
  std::array<double, 5> class_weights{};  // p's (adjacent) or Theorem-2 weights (separated)
  // empirical side
  std::uint64_t n_fixed = 0;
  std::uint64_t attempts = 0;
  double fixation_freq = 0;
  ClassStats marginal;                       // per-individual classes, all replicates pooled
  std::map<std::string, std::uint64_t> mvector_hist;  // d > 1: "m1,m2,m3,m4,m5" -> count
  std::uint64_t partitions_outside_delta = 0;
  double emp_escape1 = 0, emp_escape2 = 0, emp_both_escape = 0;
  // comparison
  double tv_distance = 0;
  std::array<double, 5> z_scores{};
  // diagnostics mode
  std::vector<UpcrossingDiagnostic> upcrossings;
  // bookkeeping
  bool truncated = false;
  double runtime_seconds = 0;
  int threads = 1;
};

namespace detail {

inline void write_replicate_row(std::ostream& os, std::uint64_t replicate,
                                const SweepOutcome& outcome, const ClassCounts& cls) {
  std::string line;
  line += std::to_string(replicate);
  line += ',';
  line += std::to_string(outcome.seed);
  line += ',';
  line += outcome.fixed ? '1' : '0';
  line += ',';
  append_double(line, outcome.t_ext);
  line += ',';
  line += std::to_string(outcome.event_count);
  for (std::int64_t m : {cls.m1, cls.m2, cls.m3, cls.m4, cls.m5}) {
    line += ',';
    line += std::to_string(m);
  }
  line += ',';
  line += cls.in_delta ? '1' : '0';
  line += '\n';
  os << line;
}

inline std::string mvector_key(const ClassCounts& cls) {
  std::string key;
  for (std::int64_t m : {cls.m1, cls.m2, cls.m3, cls.m4, cls.m5}) {
    if (!key.empty()) key += ',';
    key += std::to_string(m);
  }
  return key;
}

inline void finish_comparison(ComparisonSummary& sum) {
  const double n = static_cast<double>(sum.marginal.total);
  if (n == 0) return;
  double tv = sum.marginal.outside_freq();  // analytic outside mass is 0
  for (std::size_t k = 0; k < 5; ++k) {
    const double phat = sum.marginal.freq(k);
    const double w = sum.class_weights[k];
    tv += std::abs(phat - w);
    double se = std::sqrt(w * (1.0 - w) / n);
    if (se == 0) se = sum.marginal.se(k);
    sum.z_scores[k] = se > 0 ? (phat - w) / se : 0.0;
  }
  sum.tv_distance = tv / 2.0;
}

}  // namespace detail

/// Runs the conditioned experiment described by the config in the given mode.
/// Per-replicate CSV rows stream to cfg.out_csv while running; the summary
/// JSON is written to cfg.out_json at the end when set. On an attempt or
/// event cap the partial results are kept and the summary is marked
/// truncated. Deterministic for a fixed (config, master_seed), whatever the
/// worker count.
inline ComparisonSummary run_experiment(const ExperimentConfig& cfg, RunMode mode,
                                        const ExperimentOptions& opts = {});

inline nlohmann::json summary_json(const ExperimentConfig& cfg, const ComparisonSummary& sum);

namespace detail {

inline void run_simulation_part(const ExperimentConfig& cfg, const ExperimentOptions& opts,
                                ComparisonSummary& sum, std::ostream* csv) {
  HarnessOptions harness;
  harness.threads = opts.threads;
  harness.attempt_cap = opts.attempt_cap;
  harness.run.event_cap = opts.event_cap;
  harness.run.eps_diag = cfg.eps_diag;

  if (csv) *csv << "replicate,seed,fixed,t_ext,event_count,m1,m2,m3,m4,m5,in_delta\n";

  auto consume = [&](std::uint64_t replicate, SweepOutcome&& outcome) {
    Rng sample_rng(derive_seed(outcome.seed, 0x53414d50ULL));
    const MarkedPartition part = sample_partition(*outcome.final_pop, cfg.d, sample_rng);
    const ClassCounts cls = classify(part);
    if (csv) write_replicate_row(*csv, replicate, outcome, cls);

    ++sum.n_fixed;
    if (!cls.in_delta) ++sum.partitions_outside_delta;
    if (cfg.d > 1) ++sum.mvector_hist[mvector_key(cls)];
    for (const IndividualAncestry& anc : individual_ancestries(part)) {
      ++sum.marginal.total;
      if (anc.cls >= 1)
        ++sum.marginal.counts[static_cast<std::size_t>(anc.cls - 1)];
      else
        ++sum.marginal.outside;
      if (!anc.marked1) sum.emp_escape1 += 1;
      if (!anc.marked2) sum.emp_escape2 += 1;
      if (!anc.marked1 && !anc.marked2) sum.emp_both_escape += 1;
    }
  };

  try {
    const ConditionedStats stats =
        run_conditioned(cfg.params, cfg.n_fixed, cfg.master_seed, harness, consume);
    sum.attempts = stats.attempts;
  } catch (const AttemptCapExceeded& e) {
    sum.attempts = e.attempts();
    sum.truncated = true;
  } catch (const EventCapExceeded&) {
    sum.truncated = true;
  }

  if (sum.marginal.total > 0) {
    const double n = static_cast<double>(sum.marginal.total);
    sum.emp_escape1 /= n;
    sum.emp_escape2 /= n;
    sum.emp_both_escape /= n;
  }
  if (sum.attempts > 0)
    sum.fixation_freq = static_cast<double>(sum.n_fixed) / static_cast<double>(sum.attempts);
  finish_comparison(sum);
}

inline void run_diagnostics_part(const ExperimentConfig& cfg, const ExperimentOptions& opts,
                                 ComparisonSummary& sum) {
  std::vector<std::int64_t> levels = opts.diag_levels;
  if (levels.empty()) levels = {5, 10, 20};
  const auto eps_k = static_cast<std::int64_t>(
      std::floor(cfg.eps_diag * static_cast<double>(cfg.params.K)));

  std::map<std::int64_t, std::uint64_t> totals;
  for (std::int64_t k : levels) totals[k] = 0;
  std::uint64_t attempts = 0;

  auto work = [&](std::uint64_t run) {
    return count_upcrossings(cfg.params, levels, cfg.eps_diag, derive_seed(cfg.master_seed, run));
  };
  auto fold = [&](std::uint64_t, UpcrossResult&& res) {
    attempts += res.attempts;
    for (const auto& [k, c] : res.counts) totals[k] += c;
    return true;
  };
  map_fold_ordered<UpcrossResult>(static_cast<std::uint64_t>(cfg.n_fixed), opts.threads, work, fold);

  sum.attempts = attempts;
  sum.n_fixed = static_cast<std::uint64_t>(cfg.n_fixed);
  sum.fixation_freq = attempts ? static_cast<double>(cfg.n_fixed) / static_cast<double>(attempts) : 0;
  for (std::int64_t k : levels) {
    UpcrossingDiagnostic diag;
    diag.level = k;
    diag.runs = static_cast<std::uint64_t>(cfg.n_fixed);
    diag.mean = static_cast<double>(totals[k]) / static_cast<double>(cfg.n_fixed);
    diag.expected = (k >= 1 && k < eps_k && sum.derived.s > 0 && sum.derived.s < 1)
                        ? expected_upcrossings(sum.derived.s, eps_k, k)
                        : std::numeric_limits<double>::quiet_NaN();
    sum.upcrossings.push_back(diag);
  }
}

}  // namespace detail

inline ComparisonSummary run_experiment(const ExperimentConfig& cfg, RunMode mode,
                                        const ExperimentOptions& opts) {
  finalize_config(cfg, mode);
  require_sweep_regime(cfg.params);
  const auto t0 = std::chrono::steady_clock::now();

  ComparisonSummary sum;
  sum.mode = mode;
  sum.threads = std::max(1, opts.threads);
  sum.derived = derive(cfg.params);
  sum.qs = compute_qs(cfg.params, sum.derived);
  sum.ps = compute_ps(sum.qs);
  sum.class_weights =
      cfg.params.geometry == Geometry::Adjacent ? sum.ps.p : theorem2_weights(sum.qs);

  if (mode == RunMode::Simulate || mode == RunMode::Compare) {
    std::ofstream csv_file;
    std::ostream* csv = nullptr;
    if (!cfg.out_csv.empty()) {
      csv_file.open(cfg.out_csv, std::ios::binary | std::ios::trunc);
      if (!csv_file) throw std::runtime_error("cannot open out_csv path: " + cfg.out_csv);
      csv = &csv_file;
    }
    detail::run_simulation_part(cfg, opts, sum, csv);
  } else if (mode == RunMode::Diagnostics) {
    detail::run_diagnostics_part(cfg, opts, sum);
  }

  sum.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (!cfg.out_json.empty()) {
    std::ofstream json_file(cfg.out_json, std::ios::binary | std::ios::trunc);
    if (!json_file) throw std::runtime_error("cannot open out_json path: " + cfg.out_json);
    json_file << summary_json(cfg, sum).dump(2) << '\n';
  }
  return sum;
}

inline nlohmann::json summary_json(const ExperimentConfig& cfg, const ComparisonSummary& sum) {
  nlohmann::json j;
  j["config_echo"] = {
      {"f_A", cfg.params.f_A},       {"f_a", cfg.params.f_a},
      {"D_A", cfg.params.D_A},       {"D_a", cfg.params.D_a},
      {"C_AA", cfg.params.C[0][0]},  {"C_Aa", cfg.params.C[0][1]},
      {"C_aA", cfg.params.C[1][0]},  {"C_aa", cfg.params.C[1][1]},
      {"K", cfg.params.K},           {"r1", cfg.params.r1},
      {"r2", cfg.params.r2},
      {"geometry", cfg.params.geometry == Geometry::Adjacent ? "adjacent" : "separated"},
      {"d", cfg.d},                  {"n_fixed", cfg.n_fixed},
      {"master_seed", cfg.master_seed},
      {"eps_diag", cfg.eps_diag},    {"mode", to_string(sum.mode)},
  };
  j["analytic"] = {
      {"q1", sum.qs.q1},       {"q2", sum.qs.q2},       {"qbar2", sum.qs.qbar2},
      {"q3", sum.qs.q3},       {"p1", sum.ps.p[0]},     {"p2", sum.ps.p[1]},
      {"p3", sum.ps.p[2]},     {"p4", sum.ps.p[3]},     {"p5", sum.ps.p[4]},
      {"s", sum.derived.s},    {"sbar", sum.derived.sbar},
      {"nbar_A", sum.derived.nbar_A}, {"nbar_a", sum.derived.nbar_a},
      {"S_aA", sum.derived.S_aA},     {"S_Aa", sum.derived.S_Aa},
  };
  if (cfg.params.geometry == Geometry::Separated) {
    const auto w = theorem2_weights(sum.qs);
    j["analytic"]["theorem2_weights"] = w;
  }

  if (sum.mode == RunMode::Simulate || sum.mode == RunMode::Compare) {
    nlohmann::json emp;
    emp["n_fixed"] = sum.n_fixed;
    emp["attempts"] = sum.attempts;
    emp["fixation_freq"] = sum.fixation_freq;
    emp["class_counts"] = sum.marginal.counts;
    emp["outside_count"] = sum.marginal.outside;
    emp["class_freq"] = {sum.marginal.freq(0), sum.marginal.freq(1), sum.marginal.freq(2),
                         sum.marginal.freq(3), sum.marginal.freq(4)};
    emp["class_se"] = {sum.marginal.se(0), sum.marginal.se(1), sum.marginal.se(2),
                       sum.marginal.se(3), sum.marginal.se(4)};
    emp["outside_freq"] = sum.marginal.outside_freq();
    emp["partitions_outside_delta"] = sum.partitions_outside_delta;
    if (cfg.d > 1) emp["mvector_hist"] = sum.mvector_hist;
    j["empirical"] = emp;
  }
  if (sum.mode == RunMode::Compare) {
    const bool adjacent = cfg.params.geometry == Geometry::Adjacent;
    const double esc1 = adjacent ? sum.ps.p[2] + sum.ps.p[3] + sum.ps.p[4] : 1.0 - sum.qs.q1;
    const double esc2 = adjacent ? sum.ps.p[1] + sum.ps.p[3] + sum.ps.p[4] : 1.0 - sum.qs.q2;
    const double both = adjacent ? sum.ps.p[3] + sum.ps.p[4]
                                 : (1.0 - sum.qs.q1) * (1.0 - sum.qs.q2);
    j["comparison"] = {
        {"class_weights", sum.class_weights},
        {"tv_distance", sum.tv_distance},
        {"z_scores", sum.z_scores},
        {"escape", {{"empirical", {{"locus1", sum.emp_escape1},
                                   {"locus2", sum.emp_escape2},
                                   {"both", sum.emp_both_escape}}},
                    {"analytic", {{"locus1", esc1}, {"locus2", esc2}, {"both", both}}}}},
    };
  }
  if (sum.mode == RunMode::Diagnostics) {
    nlohmann::json diag = nlohmann::json::array();
    for (const UpcrossingDiagnostic& u : sum.upcrossings) {
      nlohmann::json entry = {{"level", u.level}, {"mean", u.mean}, {"runs", u.runs}};
      if (std::isfinite(u.expected)) {
        entry["expected"] = u.expected;
        entry["ratio"] = u.expected != 0 ? u.mean / u.expected : 0.0;
      }
      diag.push_back(entry);
    }
    j["empirical"] = {{"upcrossings", diag},
                      {"n_runs", sum.n_fixed},
                      {"attempts", sum.attempts}};
  }
  j["runtime"] = {{"seconds", sum.runtime_seconds},
                  {"threads", sum.threads},
                  {"truncated", sum.truncated}};
  return j;
}

}  // namespace sweepsim
