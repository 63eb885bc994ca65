#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "sweepsim/errors.hpp"
#include "sweepsim/individual.hpp"
#include "sweepsim/model.hpp"
#include "sweepsim/rng.hpp"

namespace sweepsim {

/// Living population: per-trait dense arrays with swap-remove deletion, so
/// uniform picks and deletions are O(1). Ids increase monotonically and are
/// never reused.
struct PopulationState {
  std::vector<Individual> pop[2];  // indexed by Allele
  double t = 0;
  std::uint64_t next_id = 0;

  std::vector<Individual>& trait(Allele x) { return pop[static_cast<int>(x)]; }
  const std::vector<Individual>& trait(Allele x) const { return pop[static_cast<int>(x)]; }
  std::int64_t n_A() const { return static_cast<std::int64_t>(pop[0].size()); }
  std::int64_t n_a() const { return static_cast<std::int64_t>(pop[1].size()); }
  std::int64_t size() const { return n_A() + n_a(); }
};

/// Monomorphic A-population at its equilibrium size floor(nbar_A*K), each
/// founder i carrying labels (Resident(i), Resident(i)), plus the single
/// mutant with labels (Mutant, Mutant); t = 0.
inline PopulationState init_population(const EcoParams& params) {
  require_sweep_regime(params);
  const DerivedEco d = derive(params);
  const auto n_a0 = static_cast<std::int64_t>(
      std::floor(d.nbar_A * static_cast<double>(params.K)));

  PopulationState state;
  state.trait(Allele::A).reserve(static_cast<std::size_t>(n_a0) + 1);
  for (std::int64_t i = 1; i <= n_a0; ++i)
    state.trait(Allele::A).push_back(Individual{state.next_id++, Allele::A,
                                                FounderRef::resident(static_cast<std::uint64_t>(i)),
                                                FounderRef::resident(static_cast<std::uint64_t>(i))});
  state.trait(Allele::a).push_back(
      Individual{state.next_id++, Allele::a, FounderRef::mutant(), FounderRef::mutant()});
  return state;
}

/// Per-trait birth and death rate totals: b_alpha = f_alpha n_alpha and
/// d_alpha = (D_alpha + C_{alpha,A} n_A/K + C_{alpha,a} n_a/K) n_alpha.
struct TraitRates {
  double b_A = 0, b_a = 0, d_A = 0, d_a = 0;
  double total() const { return b_A + b_a + d_A + d_a; }
};

inline TraitRates total_rates(const PopulationState& state, const EcoParams& params) {
  const double n_A = static_cast<double>(state.n_A());
  const double n_a = static_cast<double>(state.n_a());
  const double k = static_cast<double>(params.K);
  TraitRates r;
  r.b_A = params.f_A * n_A;
  r.b_a = params.f_a * n_a;
  r.d_A = (params.D_A + params.comp(Allele::A, Allele::A) * n_A / k +
           params.comp(Allele::A, Allele::a) * n_a / k) * n_A;
  r.d_a = (params.D_a + params.comp(Allele::a, Allele::A) * n_A / k +
           params.comp(Allele::a, Allele::a) * n_a / k) * n_a;
  return r;
}

enum class EventKind { Birth, Death };

struct Event {
  EventKind kind;
  Allele trait;
};

/// Maps a uniform draw to the event category, splitting [0,1) proportionally
/// to the four trait rates.
inline Event select_event(const TraitRates& r, double u01) {
  const double x = u01 * r.total();
  if (x < r.b_A) return {EventKind::Birth, Allele::A};
  if (x < r.b_A + r.b_a) return {EventKind::Birth, Allele::a};
  if (x < r.b_A + r.b_a + r.d_A) return {EventKind::Death, Allele::A};
  return {EventKind::Death, Allele::a};
}

/// Father trait: A with probability f_A n_A / (f_A n_A + f_a n_a).
inline Allele select_father_trait(double weight_A, double weight_a, double u01) {
  return u01 * (weight_A + weight_a) < weight_A ? Allele::A : Allele::a;
}

/// Neutral-label routing for one birth given the recombination flags
/// R1 ~ Ber(r1), R2 ~ Ber(r2); the newborn's selected allele always comes
/// from the mother.
///   Adjacent SL-N1-N2:  N1 from mother unless R1; R2 flips N2 to the parent
///                       N1 did NOT come from (crossover between N1 and N2).
///   Separated N1-SL-N2: N1 and N2 drawn from mother/father independently.
inline std::pair<FounderRef, FounderRef> inherit_labels(Geometry geometry, bool flip1,
                                                        bool flip2, const Individual& mother,
                                                        const Individual& father) {
  const bool n1_from_father = flip1;
  bool n2_from_father;
  if (geometry == Geometry::Adjacent)
    n2_from_father = flip2 ? !n1_from_father : n1_from_father;
  else
    n2_from_father = flip2;
  return {n1_from_father ? father.label1 : mother.label1,
          n2_from_father ? father.label2 : mother.label2};
}

/// Advances the population by one event, in place.
///
/// Waiting time is exponential with the total rate; a death removes a uniform
/// individual of the chosen trait; a birth copies the mother's selected
/// allele, samples the father fertility-proportionally among ALL living
/// individuals with replacement (the mother may be her own father), and routes
/// each neutral label by the recombination flags R1 ~ Ber(r1), R2 ~ Ber(r2):
///   adjacent SL-N1-N2:  N1 from mother unless R1, N2 from N1's source unless
///                       R2 flips it to the other parent (crossover),
///   separated N1-SL-N2: N1 and N2 drawn from mother/father independently.
inline Event step(PopulationState& state, const EcoParams& params, Rng& rng) {
  const TraitRates rates = total_rates(state, params);
  const double total = rates.total();
  if (!(total > 0)) throw std::logic_error("step: empty population has no events");

  state.t += rng.exponential(total);
  const Event ev = select_event(rates, rng.uniform());
  std::vector<Individual>& members = state.trait(ev.trait);

  if (ev.kind == EventKind::Death) {
    const std::uint64_t victim = rng.below(members.size());
    members[victim] = members.back();
    members.pop_back();
    return ev;
  }

  const Individual mother = members[rng.below(members.size())];
  Individual child{state.next_id++, ev.trait, mother.label1, mother.label2};

  const bool flip1 = params.r1 > 0 && rng.bernoulli(params.r1);
  const bool flip2 = params.r2 > 0 && rng.bernoulli(params.r2);
  if (flip1 || flip2) {
    const Allele father_trait = select_father_trait(
        params.f_A * static_cast<double>(state.n_A()),
        params.f_a * static_cast<double>(state.n_a()), rng.uniform());
    const std::vector<Individual>& pool = state.trait(father_trait);
    const Individual& father = pool[rng.below(pool.size())];
    std::tie(child.label1, child.label2) =
        inherit_labels(params.geometry, flip1, flip2, mother, father);
  }
  members.push_back(child);
  return ev;
}

struct RunOptions {
  double eps_diag = 0.1;                    // first-phase boundary floor(eps*K)
  std::vector<std::int64_t> upcross_levels; // record k -> k+1 counts for these k
  bool record_trajectory = false;
  std::uint64_t trajectory_stride = 1;      // events between recorded points
  std::uint64_t event_cap = 0;              // 0: default 500*K*(1+ln K)
  bool keep_final_pop = true;
};

inline std::uint64_t default_event_cap(std::int64_t K) {
  const double k = static_cast<double>(K);
  return static_cast<std::uint64_t>(std::ceil(500.0 * k * (1.0 + std::log(k))));
}

struct TrajectoryPoint {
  double t;
  std::int64_t n_A, n_a;
};

/// Per-replicate record of a sweep run to absorption.
struct SweepOutcome {
  bool fixed = false;            // A extinct while a survives
  double t_ext = 0;              // extinction time of the losing allele
  std::uint64_t event_count = 0;
  std::optional<PopulationState> final_pop;  // present only when fixed
  std::map<std::int64_t, std::uint64_t> upcross_counts;  // per requested level
  std::uint64_t seed = 0;
  std::vector<TrajectoryPoint> trajectory;
};

namespace detail {

/// Tracks k -> k+1 transitions of n_a strictly before its first hit of
/// floor(eps*K). Levels are direct-indexed for O(1) lookup per birth.
class UpcrossTracker {
 public:
  UpcrossTracker(const std::vector<std::int64_t>& levels, std::int64_t target,
                 std::int64_t n_a_initial)
      : levels_(levels), active_(target > n_a_initial), target_(target) {
    if (levels_.empty()) {
      active_ = false;
      return;
    }
    const std::int64_t top = *std::max_element(levels_.begin(), levels_.end());
    slot_.assign(static_cast<std::size_t>(std::max<std::int64_t>(top + 1, 1)), -1);
    counts_.assign(levels_.size(), 0);
    for (std::size_t idx = 0; idx < levels_.size(); ++idx)
      if (levels_[idx] >= 0) slot_[static_cast<std::size_t>(levels_[idx])] = static_cast<std::int64_t>(idx);
  }

  bool active() const { return active_; }

  /// Call after an a-birth with the pre-birth count; deactivates on arrival.
  void on_a_birth(std::int64_t n_a_before) {
    if (!active_) return;
    if (n_a_before < static_cast<std::int64_t>(slot_.size())) {
      const std::int64_t idx = slot_[static_cast<std::size_t>(n_a_before)];
      if (idx >= 0) ++counts_[static_cast<std::size_t>(idx)];
    }
    if (n_a_before + 1 >= target_) active_ = false;
  }

  std::map<std::int64_t, std::uint64_t> to_map() const {
    std::map<std::int64_t, std::uint64_t> out;
    for (std::size_t idx = 0; idx < levels_.size(); ++idx) out[levels_[idx]] = counts_[idx];
    return out;
  }

 private:
  std::vector<std::int64_t> levels_;
  std::vector<std::int64_t> slot_;
  std::vector<std::uint64_t> counts_;
  bool active_ = false;
  std::int64_t target_ = 0;
};

}  // namespace detail

/// Runs the sweep to absorption (n_A = 0 or n_a = 0). Deterministic given
/// (params, seed). Throws EventCapExceeded past the cap.
inline SweepOutcome run_sweep(const EcoParams& params, std::uint64_t seed,
                              const RunOptions& opts = {}) {
  PopulationState state = init_population(params);
  Rng rng(seed);
  const std::uint64_t cap = opts.event_cap ? opts.event_cap : default_event_cap(params.K);
  const auto eps_target = static_cast<std::int64_t>(
      std::floor(opts.eps_diag * static_cast<double>(params.K)));
  detail::UpcrossTracker upcross(opts.upcross_levels, eps_target, state.n_a());

  SweepOutcome out;
  out.seed = seed;
  if (opts.record_trajectory)
    out.trajectory.push_back({state.t, state.n_A(), state.n_a()});

  while (state.n_A() > 0 && state.n_a() > 0) {
    if (out.event_count >= cap) throw EventCapExceeded(out.event_count, cap);
    const std::int64_t n_a_before = state.n_a();
    const Event ev = step(state, params, rng);
    ++out.event_count;
    if (ev.kind == EventKind::Birth && ev.trait == Allele::a) upcross.on_a_birth(n_a_before);
    if (opts.record_trajectory && out.event_count % opts.trajectory_stride == 0)
      out.trajectory.push_back({state.t, state.n_A(), state.n_a()});
  }

  out.fixed = state.n_A() == 0 && state.n_a() > 0;
  out.t_ext = state.t;
  if (opts.record_trajectory && (out.trajectory.empty() || out.trajectory.back().t != state.t))
    out.trajectory.push_back({state.t, state.n_A(), state.n_a()});
  if (!opts.upcross_levels.empty()) out.upcross_counts = upcross.to_map();
  if (out.fixed && opts.keep_final_pop) out.final_pop = std::move(state);
  return out;
}

/// Per-level upcrossing counts of one first phase, conditioned on the
/// a-population reaching floor(eps*K): attempts where it dies first are
/// discarded and resampled with the next derived seed.
struct UpcrossResult {
  std::map<std::int64_t, std::uint64_t> counts;
  std::uint64_t attempts = 0;  // total attempts including discarded ones
};

inline UpcrossResult count_upcrossings(const EcoParams& params,
                                       const std::vector<std::int64_t>& levels,
                                       double eps, std::uint64_t seed,
                                       std::uint64_t attempt_cap = 1u << 20) {
  require_sweep_regime(params);
  if (!(eps > 0 && eps < 1)) throw std::invalid_argument("count_upcrossings: eps must lie in (0,1)");
  const auto target = static_cast<std::int64_t>(std::floor(eps * static_cast<double>(params.K)));
  const std::uint64_t cap = default_event_cap(params.K);

  UpcrossResult res;
  if (target <= 1) {
    // phase over on arrival: the initial mutant already meets the boundary
    res.attempts = 1;
    res.counts = detail::UpcrossTracker(levels, target, 1).to_map();
    return res;
  }
  for (std::uint64_t attempt = 0;; ++attempt) {
    if (attempt >= attempt_cap) throw AttemptCapExceeded(attempt, 0, 1);
    ++res.attempts;
    PopulationState state = init_population(params);
    Rng rng(derive_seed(seed, attempt));
    detail::UpcrossTracker upcross(levels, target, state.n_a());
    std::uint64_t events = 0;
    while (state.n_a() > 0 && state.n_a() < target) {
      if (events >= cap) throw EventCapExceeded(events, cap);
      const std::int64_t n_a_before = state.n_a();
      const Event ev = step(state, params, rng);
      ++events;
      if (ev.kind == EventKind::Birth && ev.trait == Allele::a) upcross.on_a_birth(n_a_before);
    }
    if (state.n_a() >= target) {
      res.counts = upcross.to_map();
      return res;
    }
  }
}

// ---------------------------------------------------------------------------
// CSV writers (formats shared with external tooling)

namespace detail {
inline void append_double(std::string& line, double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  line.append(buf, ptr);
}
}  // namespace detail

inline void write_trajectory_csv(std::ostream& os, std::span<const TrajectoryPoint> points) {
  os << "t,n_A,n_a\n";
  std::string line;
  for (const TrajectoryPoint& p : points) {
    line.clear();
    detail::append_double(line, p.t);
    line += ',';
    line += std::to_string(p.n_A);
    line += ',';
    line += std::to_string(p.n_a);
    line += '\n';
    os << line;
  }
}

struct OutcomeRow {
  std::uint64_t replicate = 0;
  std::uint64_t seed = 0;
  bool fixed = false;
  double t_ext = 0;
  std::uint64_t event_count = 0;
  std::uint64_t attempts = 0;  // attempts consumed up to and including this row
};

inline void write_outcomes_csv(std::ostream& os, std::span<const OutcomeRow> rows) {
  os << "replicate,seed,fixed,t_ext,event_count,attempts\n";
  std::string line;
  for (const OutcomeRow& r : rows) {
    line.clear();
    line += std::to_string(r.replicate);
    line += ',';
    line += std::to_string(r.seed);
    line += ',';
    line += r.fixed ? '1' : '0';
    line += ',';
    detail::append_double(line, r.t_ext);
    line += ',';
    line += std::to_string(r.event_count);
    line += ',';
    line += std::to_string(r.attempts);
    line += '\n';
    os << line;
  }
}

}  // namespace sweepsim
