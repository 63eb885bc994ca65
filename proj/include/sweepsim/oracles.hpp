#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "sweepsim/individual.hpp"
#include "sweepsim/model.hpp"
#include "sweepsim/rng.hpp"

namespace sweepsim {

/// Birth-death walk with absorbing levels i < k and start j in between.
struct BDWalkParams {
  double b = 1, d = 1;          // individual birth and death rates
  std::int64_t i = 0, j = 0, k = 1;
};

/// P_j(T_k < T_i) for the walk above. Closed form
/// (1-(d/b)^{j-i})/(1-(d/b)^{k-i}); the b = d case is the continuity limit
/// (j-i)/(k-i). Evaluated through expm1 to stay accurate for d/b near 1.
inline double bd_hitting_prob(const BDWalkParams& w) {
  if (!(w.b > 0) || !(w.d > 0)) throw std::invalid_argument("bd_hitting_prob: rates must be positive");
  if (!(w.i <= w.j && w.j <= w.k && w.k > w.i))
    throw std::invalid_argument("bd_hitting_prob: need i <= j <= k, k > i");
  if (w.j == w.i) return 0.0;
  if (w.j == w.k) return 1.0;
  if (w.d == w.b)
    return static_cast<double>(w.j - w.i) / static_cast<double>(w.k - w.i);
  const double log_ratio = std::log(w.d / w.b);
  return std::expm1(static_cast<double>(w.j - w.i) * log_ratio) /
         std::expm1(static_cast<double>(w.k - w.i) * log_ratio);
}

/// Geometric pmf on {1,2,...}: P(G = n) = p(1-p)^{n-1}.
inline double geometric_pmf(double p, std::int64_t n) {
  if (n < 1) return 0.0;
  return p * std::pow(1.0 - p, static_cast<double>(n - 1));
}

/// pmf table of Z = sum_{i<=V} G_i on {1..n_max}, with V ~ Geom(pa) and
/// G_i ~ Geom(pb) iid, by exact convolution: entry [n-1] is P(Z = n).
/// The v-fold convolution of the G pmf is built iteratively; V is then mixed
/// in with its geometric weights (v <= n terms contribute at level n).
inline std::vector<double> geometric_compound_pmf_table(double pa, double pb,
                                                        std::int64_t n_max) {
  if (!(pa > 0 && pa <= 1 && pb > 0 && pb <= 1))
    throw std::invalid_argument("geometric_compound: pa, pb must lie in (0,1]");
  if (n_max < 1) return {};
  const auto n = static_cast<std::size_t>(n_max);
  std::vector<double> g(n);
  for (std::size_t m = 1; m <= n; ++m) g[m - 1] = geometric_pmf(pb, static_cast<std::int64_t>(m));

  std::vector<double> out(n, 0.0);
  std::vector<double> conv = g;  // conv[m-1] = P(G_1+...+G_v = m)
  double weight_v = pa;          // P(V = v)
  for (std::size_t v = 1; v <= n; ++v) {
    for (std::size_t m = v; m <= n; ++m) out[m - 1] += weight_v * conv[m - 1];
    weight_v *= (1.0 - pa);
    if (v == n) break;
    // next convolution: supports start at v+1
    std::vector<double> next(n, 0.0);
    for (std::size_t m = v; m <= n - 1; ++m) {
      const double cm = conv[m - 1];
      if (cm == 0.0) continue;
      for (std::size_t l = 1; m + l <= n; ++l) next[m + l - 1] += cm * g[l - 1];
    }
    conv.swap(next);
  }
  return out;
}

inline double geometric_compound_pmf(double pa, double pb, std::int64_t n) {
  if (n < 1) return 0.0;
  return geometric_compound_pmf_table(pa, pb, n).back();
}

/// Max deviation over n <= n_max between the convolution pmf of Z and the
/// closed-form Geom(pa*pb) pmf.
inline double check_geometric_compound(double pa, double pb, std::int64_t n_max) {
  const std::vector<double> table = geometric_compound_pmf_table(pa, pb, n_max);
  double worst = 0.0;
  for (std::int64_t m = 1; m <= n_max; ++m) {
    const double dev = std::abs(table[static_cast<std::size_t>(m - 1)] -
                                geometric_pmf(pa * pb, m));
    worst = std::max(worst, dev);
  }
  return worst;
}

/// Residual of the sum-integral comparison
///   sum_{l=1}^{k-1} e^{(cN/log N) log l}/(l+1) - (log N/cN)(e^{(cN/log N) log k} - 1),
/// bounded by a constant uniformly in k <= N; cN = 0 uses the limit form log k.
inline double sum_integral_residual(double c_n, double n, std::int64_t k) {
  if (!(n >= 2)) throw std::invalid_argument("sum_integral_residual: N >= 2 required");
  if (k < 1) throw std::invalid_argument("sum_integral_residual: k >= 1 required");
  const double rho = c_n / std::log(n);
  double sum = 0.0;
  for (std::int64_t l = 1; l < k; ++l)
    sum += std::pow(static_cast<double>(l), rho) / static_cast<double>(l + 1);
  const double log_k = std::log(static_cast<double>(k));
  const double integral = (c_n == 0.0) ? log_k : std::expm1(rho * log_k) / rho;
  return sum - integral;
}

/// Largest |residual| over all k <= N, accumulated incrementally in O(N).
inline double sum_integral_residual_max(double c_n, double n) {
  if (!(n >= 2)) throw std::invalid_argument("sum_integral_residual_max: N >= 2 required");
  const double rho = c_n / std::log(n);
  const auto n_int = static_cast<std::int64_t>(n);
  double sum = 0.0;
  double worst = 0.0;
  for (std::int64_t k = 1; k <= n_int; ++k) {
    const double log_k = std::log(static_cast<double>(k));
    const double integral = (c_n == 0.0) ? log_k : std::expm1(rho * log_k) / rho;
    worst = std::max(worst, std::abs(sum - integral));
    sum += std::pow(static_cast<double>(k), rho) / static_cast<double>(k + 1);
  }
  return worst;
}

/// Constant-size Moran process of type alpha with recombination r2:
/// replacement events at exponential rate f_alpha*nbar_alpha*K; at each event
/// three individuals are drawn uniformly with replacement, the first dies, the
/// second reproduces (the newborn carries its alleles at SL and N1), and a
/// Bernoulli(r2) recombination decides whether N2 comes from the second or the
/// third individual.
struct MoranResult {
  std::uint64_t event_count = 0;
  std::vector<Individual> final_state;
};

inline MoranResult moran_birth_count(const EcoParams& p, Allele alpha,
                                     double t_end, std::uint64_t seed) {
  require_sweep_regime(p);
  const DerivedEco d = derive(p);
  const double nbar = alpha == Allele::A ? d.nbar_A : d.nbar_a;
  const double rate = p.fertility(alpha) * nbar * static_cast<double>(p.K);
  const auto size = static_cast<std::uint64_t>(std::floor(nbar * static_cast<double>(p.K)));
  if (size == 0) throw std::invalid_argument("moran_birth_count: empty equilibrium population");

  MoranResult res;
  res.final_state.reserve(size);
  for (std::uint64_t i = 0; i < size; ++i)
    res.final_state.push_back(Individual{i, alpha, FounderRef::resident(i + 1),
                                         FounderRef::resident(i + 1)});

  Rng rng(seed);
  std::uint64_t next_id = size;
  double t = rng.exponential(rate);
  while (t <= t_end) {
    const std::uint64_t dies = rng.below(size);
    const std::uint64_t parent = rng.below(size);
    const std::uint64_t second_parent = rng.below(size);
    const bool recombined = p.r2 > 0 && rng.bernoulli(p.r2);
    // labels read before the replacement: any of the three may be the slot
    // being overwritten
    const FounderRef n1 = res.final_state[parent].label1;
    const FounderRef n2 = recombined ? res.final_state[second_parent].label2
                                     : res.final_state[parent].label2;
    res.final_state[dies] = Individual{next_id++, alpha, n1, n2};
    ++res.event_count;
    t += rng.exponential(rate);
  }
  return res;
}

/// Main term of the expected number of upcrossings from k to k+1 of the
/// mutant count during the first phase, conditioned on reaching floor(eps*K):
/// (1 - (1-s)^{epsK-k} - (1-s)^{k+1})/s.
inline double expected_upcrossings(double s, std::int64_t eps_k, std::int64_t k) {
  if (!(s > 0 && s < 1)) throw std::invalid_argument("expected_upcrossings: need 0 < s < 1");
  if (!(k >= 1 && k < eps_k)) throw std::invalid_argument("expected_upcrossings: need 1 <= k < epsK");
  const double q = 1.0 - s;
  return (1.0 - std::pow(q, static_cast<double>(eps_k - k)) -
          std::pow(q, static_cast<double>(k + 1))) / s;
}

}  // namespace sweepsim
