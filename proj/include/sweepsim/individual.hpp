#pragma once

#include <compare>
#include <cstdint>

#include "sweepsim/model.hpp"

namespace sweepsim {

/// Origin of a neutral allele: the initial mutant, or one of the initial
/// A-founders (1-based index). Two alleles with equal FounderRef descend from
/// the same individual alive at time 0.
class FounderRef {
 public:
  FounderRef() = default;
  static FounderRef mutant() { return FounderRef{0}; }
  static FounderRef resident(std::uint64_t index) { return FounderRef{index}; }

  bool is_mutant() const { return code_ == 0; }
  std::uint64_t resident_index() const { return code_; }
  std::uint64_t code() const { return code_; }

  friend auto operator<=>(FounderRef, FounderRef) = default;

 private:
  explicit FounderRef(std::uint64_t code) : code_(code) {}
  std::uint64_t code_ = 0;
};

/// Agent: selected allele plus the founder origins of its two neutral alleles.
struct Individual {
  std::uint64_t id = 0;
  Allele alpha = Allele::A;
  FounderRef label1;  // neutral allele at N1
  FounderRef label2;  // neutral allele at N2
};

}  // namespace sweepsim
