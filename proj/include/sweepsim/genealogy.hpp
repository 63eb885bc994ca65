#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sweepsim/engine.hpp"
#include "sweepsim/errors.hpp"
#include "sweepsim/individual.hpp"
#include "sweepsim/rng.hpp"

namespace sweepsim {

/// One of the 2d sampled neutral-allele slots: (individual, locus) with the
/// sampled individual 1-based and locus 1 or 2.
struct SlotRef {
  std::int64_t individual = 0;
  int locus = 1;

  friend auto operator<=>(const SlotRef&, const SlotRef&) = default;
};

/// Partition of the 2d slots by time-0 founder, with the mutant-descended
/// block (if any slot traces to the mutant) carrying the mark.
struct MarkedPartition {
  std::int64_t d = 0;
  std::vector<std::vector<SlotRef>> blocks;  // slots sorted; blocks sorted by smallest slot
  std::optional<std::size_t> marked;         // index into blocks
};

/// Per-individual ancestry classes:
///   m1 both slots in the marked block,
///   m2 (i,1) marked and {(i,2)} an unmarked singleton,
///   m3 (i,2) marked and {(i,1)} an unmarked singleton,
///   m4 {(i,1),(i,2)} an unmarked block,
///   m5 {(i,1)} and {(i,2)} two distinct unmarked singletons.
/// in_delta: every unmarked block is a singleton or a same-individual pair.
struct ClassCounts {
  std::int64_t m1 = 0, m2 = 0, m3 = 0, m4 = 0, m5 = 0;
  bool in_delta = false;

  std::int64_t sum() const { return m1 + m2 + m3 + m4 + m5; }
  friend bool operator==(const ClassCounts&, const ClassCounts&) = default;
};

/// Builds the marked partition from the label pairs of sampled individuals,
/// grouping slots by equal founder (Definition 1.1's equivalence realized as
/// founder-label grouping; no event log needed).
inline MarkedPartition partition_from_labels(
    std::span<const std::pair<FounderRef, FounderRef>> sampled) {
  MarkedPartition part;
  part.d = static_cast<std::int64_t>(sampled.size());
  std::map<std::uint64_t, std::vector<SlotRef>> by_founder;
  for (std::int64_t i = 0; i < part.d; ++i) {
    const auto& [l1, l2] = sampled[static_cast<std::size_t>(i)];
    by_founder[l1.code()].push_back({i + 1, 1});
    by_founder[l2.code()].push_back({i + 1, 2});
  }
  std::vector<std::pair<std::uint64_t, std::vector<SlotRef>>> blocks;
  blocks.reserve(by_founder.size());
  for (auto& [code, slots] : by_founder) {
    std::sort(slots.begin(), slots.end());
    blocks.emplace_back(code, std::move(slots));
  }
  std::sort(blocks.begin(), blocks.end(),
            [](const auto& a, const auto& b) { return a.second.front() < b.second.front(); });
  const std::uint64_t mutant_code = FounderRef::mutant().code();
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (blocks[b].first == mutant_code) part.marked = b;
    part.blocks.push_back(std::move(blocks[b].second));
  }
  return part;
}

/// Samples d distinct a-individuals uniformly without replacement from a
/// fixed population and groups their 2d neutral slots by founder.
inline MarkedPartition sample_partition(const PopulationState& final_pop,
                                        std::int64_t d, Rng& rng) {
  if (final_pop.n_A() != 0)
    throw std::invalid_argument("sample_partition: population must be fixed (n_A = 0)");
  const std::int64_t n = final_pop.n_a();
  if (d < 0) throw std::invalid_argument("sample_partition: d must be non-negative");
  if (d > n)
    throw SampleTooLarge("sample_partition: d = " + std::to_string(d) +
                         " exceeds the a-population size " + std::to_string(n));

  // partial Fisher-Yates over an index vector: first d entries are an exact
  // uniform sample without replacement
  std::vector<std::uint64_t> index(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < index.size(); ++i) index[i] = i;
  std::vector<std::pair<FounderRef, FounderRef>> sampled;
  sampled.reserve(static_cast<std::size_t>(d));
  const auto& pool = final_pop.trait(Allele::a);
  for (std::int64_t j = 0; j < d; ++j) {
    const auto pick = static_cast<std::size_t>(j) +
                      rng.below(static_cast<std::uint64_t>(n - j));
    std::swap(index[static_cast<std::size_t>(j)], index[pick]);
    const Individual& ind = pool[index[static_cast<std::size_t>(j)]];
    sampled.emplace_back(ind.label1, ind.label2);
  }
  return partition_from_labels(sampled);
}

/// Ancestry of one sampled individual: its class (0 when it fits none of the
/// five patterns, which only happens outside Delta_d) and whether each of its
/// slots sits in the marked block (locus k escaped the sweep iff !marked_k).
struct IndividualAncestry {
  int cls = 0;
  bool marked1 = false, marked2 = false;
};

inline std::vector<IndividualAncestry> individual_ancestries(const MarkedPartition& part) {
  std::map<SlotRef, std::size_t> block_of;
  for (std::size_t b = 0; b < part.blocks.size(); ++b)
    for (const SlotRef& s : part.blocks[b]) block_of[s] = b;
  auto is_marked = [&](std::size_t b) { return part.marked && *part.marked == b; };

  std::vector<IndividualAncestry> out(static_cast<std::size_t>(part.d));
  for (std::int64_t i = 1; i <= part.d; ++i) {
    const std::size_t b1 = block_of.at({i, 1});
    const std::size_t b2 = block_of.at({i, 2});
    IndividualAncestry& anc = out[static_cast<std::size_t>(i - 1)];
    anc.marked1 = is_marked(b1);
    anc.marked2 = is_marked(b2);
    const bool single1 = part.blocks[b1].size() == 1;
    const bool single2 = part.blocks[b2].size() == 1;
    if (anc.marked1 && anc.marked2)
      anc.cls = 1;
    else if (anc.marked1 && !anc.marked2 && single2)
      anc.cls = 2;
    else if (anc.marked2 && !anc.marked1 && single1)
      anc.cls = 3;
    else if (!anc.marked1 && !anc.marked2 && b1 == b2 && part.blocks[b1].size() == 2)
      anc.cls = 4;
    else if (!anc.marked1 && !anc.marked2 && b1 != b2 && single1 && single2)
      anc.cls = 5;
    // anything else (cross-individual unmarked grouping) stays unclassified
  }
  return out;
}

/// Classifies a partition into the five per-individual ancestry classes and
/// checks membership in Delta_d. Pure function.
inline ClassCounts classify(const MarkedPartition& part) {
  ClassCounts out;
  out.in_delta = true;
  for (std::size_t b = 0; b < part.blocks.size(); ++b) {
    if (part.marked && *part.marked == b) continue;
    const auto& slots = part.blocks[b];
    const bool singleton = slots.size() == 1;
    const bool same_individual_pair =
        slots.size() == 2 && slots[0].individual == slots[1].individual;
    if (!singleton && !same_individual_pair) out.in_delta = false;
  }
  for (const IndividualAncestry& anc : individual_ancestries(part)) {
    switch (anc.cls) {
      case 1: ++out.m1; break;
      case 2: ++out.m2; break;
      case 3: ++out.m3; break;
      case 4: ++out.m4; break;
      case 5: ++out.m5; break;
      default: break;
    }
  }
  return out;
}

/// Audit format: one line per block, slots as `i.k` in slot order, blocks
/// sorted by smallest slot, marked block suffixed ` *`.
inline std::string serialize(const MarkedPartition& part) {
  std::string out;
  for (std::size_t b = 0; b < part.blocks.size(); ++b) {
    bool first = true;
    for (const SlotRef& s : part.blocks[b]) {
      if (!first) out += ' ';
      out += std::to_string(s.individual);
      out += '.';
      out += std::to_string(s.locus);
      first = false;
    }
    if (part.marked && *part.marked == b) out += " *";
    out += '\n';
  }
  return out;
}

}  // namespace sweepsim
