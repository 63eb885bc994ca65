#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace sweepsim {

/// Alleles at the selected locus: resident A, mutant a.
enum class Allele : int { A = 0, a = 1 };

inline Allele other(Allele x) { return x == Allele::A ? Allele::a : Allele::A; }

/// Locus order on the chromosome: SL-N1-N2 (both neutral loci on the same
/// side of the selected one) or N1-SL-N2 (selected locus in between).
enum class Geometry { Adjacent, Separated };

/// Full parameterization of the three-locus birth-death model.
///
/// The competition matrix is indexed (affected, affecting): comp(x, y) is the
/// per-capita impact an individual of type y has on an individual of type x.
struct EcoParams {
  double f_A = 0, f_a = 0;  // fertilities, per unit time
  double D_A = 0, D_a = 0;  // intrinsic death rates, per unit time
  std::array<std::array<double, 2>, 2> C{{{0, 0}, {0, 0}}};
  std::int64_t K = 1;       // carrying-capacity scale
  double r1 = 0, r2 = 0;    // recombination probabilities per birth event
  Geometry geometry = Geometry::Adjacent;

  double fertility(Allele x) const { return x == Allele::A ? f_A : f_a; }
  double intrinsic_death(Allele x) const { return x == Allele::A ? D_A : D_a; }
  double comp(Allele affected, Allele affecting) const {
    return C[static_cast<int>(affected)][static_cast<int>(affecting)];
  }

  /// Structural domain checks; NaN/Inf and out-of-range values are rejected
  /// here, regime conditions (signs of the fitnesses) are not.
  void check() const {
    auto need = [](bool ok, const char* what) {
      if (!ok) throw std::invalid_argument(std::string("EcoParams: ") + what);
    };
    for (double v : {f_A, f_a, D_A, D_a, C[0][0], C[0][1], C[1][0], C[1][1], r1, r2})
      need(std::isfinite(v), "all rates must be finite");
    need(f_A > 0 && f_a > 0, "fertilities must be positive");
    need(D_A >= 0 && D_a >= 0, "intrinsic death rates must be non-negative");
    for (auto& row : C)
      for (double v : row) need(v >= 0, "competition entries must be non-negative");
    need(K >= 1, "K must be a positive integer");
    need(r1 >= 0 && r1 <= 1 && r2 >= 0 && r2 <= 1, "r1, r2 must lie in [0,1]");
  }

  static EcoParams make(double f_A, double f_a, double D_A, double D_a,
                        const std::array<std::array<double, 2>, 2>& C,
                        std::int64_t K, double r1, double r2, Geometry geometry) {
    EcoParams p{f_A, f_a, D_A, D_a, C, K, r1, r2, geometry};
    p.check();
    return p;
  }
};

/// Recombination probability from an r*log K product.
inline double r_from_log_k(double r_log_k, std::int64_t K) {
  if (K < 2) throw std::invalid_argument("r*logK form needs K >= 2 (log K = 0 otherwise)");
  return r_log_k / std::log(static_cast<double>(K));
}

/// Quantities derived exactly from the parameters: equilibrium densities,
/// invasion fitnesses and their rescaled forms.
struct DerivedEco {
  double nbar_A = 0, nbar_a = 0;  // (f - D)/C_diag
  double S_aA = 0, S_Aa = 0;      // invasion fitnesses, per unit time
  double s = 0;                   // S_aA / f_a
  double sbar = 0;                // |S_Aa| / f_A
};

inline DerivedEco derive(const EcoParams& p) {
  p.check();
  if (p.comp(Allele::A, Allele::A) <= 0 || p.comp(Allele::a, Allele::a) <= 0)
    throw std::invalid_argument("derive: diagonal competition must be positive");
  DerivedEco d;
  d.nbar_A = (p.f_A - p.D_A) / p.comp(Allele::A, Allele::A);
  d.nbar_a = (p.f_a - p.D_a) / p.comp(Allele::a, Allele::a);
  d.S_aA = p.f_a - p.D_a - p.comp(Allele::a, Allele::A) * d.nbar_A;
  d.S_Aa = p.f_A - p.D_A - p.comp(Allele::A, Allele::a) * d.nbar_a;
  d.s = d.S_aA / p.f_a;
  d.sbar = std::abs(d.S_Aa) / p.f_A;
  return d;
}

/// Outcome of the sweep-regime check: hard violations (any one makes the
/// parameterization unusable for a sweep) and advisory warnings.
struct ValidationReport {
  bool ok = false;
  std::vector<std::string> violations;
  std::vector<std::string> warnings;
  double r1_log_k = 0, r2_log_k = 0;

  std::string to_string() const {
    std::ostringstream os;
    os << (ok ? "OK" : "INVALID");
    for (const auto& v : violations) os << "\n  violation: " << v;
    for (const auto& w : warnings) os << "\n  warning: " << w;
    return os.str();
  }
};

/// Checks the coexistence/fitness conditions for a hard sweep of a against A:
/// positive equilibrium densities and S_Aa < 0 < S_aA. Also reports the
/// weak-recombination scale r_j*log K (advisory only).
inline ValidationReport validate_sweep_regime(const EcoParams& p) {
  ValidationReport rep;
  auto fail = [&rep](const std::string& msg) { rep.violations.push_back(msg); };

  try {
    p.check();
  } catch (const std::invalid_argument& e) {
    fail(e.what());
    return rep;
  }

  const double log_k = std::log(static_cast<double>(p.K));
  rep.r1_log_k = p.r1 * log_k;
  rep.r2_log_k = p.r2 * log_k;

  if (p.comp(Allele::A, Allele::A) <= 0 || p.comp(Allele::a, Allele::a) <= 0) {
    std::ostringstream os;
    os << "diagonal competition must be positive (C_AA = " << p.C[0][0]
       << ", C_aa = " << p.C[1][1] << ")";
    fail(os.str());
    return rep;
  }

  const DerivedEco d = derive(p);
  auto check_pos = [&](double v, const char* name, const char* cond) {
    if (!(v > 0)) {
      std::ostringstream os;
      os << name << " must be " << cond << " (got " << v << ")";
      fail(os.str());
    }
  };
  check_pos(d.nbar_A, "nbar_A", "positive");
  check_pos(d.nbar_a, "nbar_a", "positive");
  check_pos(d.S_aA, "S_aA", "positive");
  if (!(d.S_Aa < 0)) {
    std::ostringstream os;
    os << "S_Aa must be negative (got " << d.S_Aa << ")";
    fail(os.str());
  }

  for (auto [v, name] : {std::pair{rep.r1_log_k, "r1"}, std::pair{rep.r2_log_k, "r2"}}) {
    if (v > 5) {
      std::ostringstream os;
      os << name << "*log K = " << v << " > 5: weak-recombination scaling is strained";
      rep.warnings.push_back(os.str());
    }
  }

  rep.ok = rep.violations.empty();
  return rep;
}

/// Convenience: throw with the full report when the regime is invalid.
inline void require_sweep_regime(const EcoParams& p) {
  const ValidationReport rep = validate_sweep_regime(p);
  if (!rep.ok)
    throw std::invalid_argument("parameters fail sweep-regime validation: " + rep.to_string());
}

}  // namespace sweepsim
