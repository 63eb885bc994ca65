#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "sweepsim/errors.hpp"
#include "sweepsim/genealogy.hpp"
#include "sweepsim/model.hpp"
#include "sweepsim/ode.hpp"

namespace sweepsim {

/// Escape probabilities of the sampling formula. q1 (resp. q2) is the chance
/// that the neutral allele at N1 (resp. N2) does not recombine out of the
/// mutant background during the first phase, qbar2 the analogous quantity for
/// N1-N2 separation during the third phase, and q3 the both-loci-to-one-founder
/// channel.
struct AnalyticQs {
  double q1 = 1, q2 = 1, qbar2 = 1, q3 = 0;
};

/// Class probabilities of the partition law in the adjacent geometry.
struct AnalyticPs {
  std::array<double, 5> p{};  // p[0] = p1, ..., p[4] = p5
};

inline AnalyticQs compute_qs(const EcoParams& params, const DerivedEco& d) {
  const double log_k = std::log(static_cast<double>(params.K));
  AnalyticQs q;
  q.q1 = std::exp(-params.f_a * params.r1 * log_k / d.S_aA);
  q.q2 = std::exp(-params.f_a * params.r2 * log_k / d.S_aA);
  q.qbar2 = std::exp(-params.f_a * params.r2 * log_k / std::abs(d.S_Aa));

  if (params.r1 == 0) {
    q.q3 = 0;
    return q;
  }
  const double ratio = params.f_A / params.f_a;
  const double x = params.r1 + params.r2 * (1.0 - ratio);
  if (std::abs(x) < 1e-9 * (params.r1 + params.r2)) {
    // removable singularity: q3 -> r1 * (f_a log K / S_aA) * q2^{f_A/f_a}
    q.q3 = params.r1 * (params.f_a * log_k / d.S_aA) * std::pow(q.q2, ratio);
  } else {
    q.q3 = params.r1 * (std::pow(q.q2, ratio) - q.q1 * q.q2) / x;
  }
  return q;
}

inline AnalyticPs compute_ps(const AnalyticQs& q) {
  const double q1 = q.q1, q2 = q.q2, qb2 = q.qbar2, q3 = q.q3;
  AnalyticPs out;
  out.p[0] = q1 * q2 * (1.0 - (1.0 - q1) * (1.0 - qb2));
  out.p[1] = q1 * ((1.0 - q1 * q2) - q2 * qb2 * (1.0 - q1));
  out.p[2] = q1 * q2 * (1.0 - qb2) * (1.0 - q1);
  out.p[3] = qb2 * q3;
  out.p[4] = (1.0 - q1) * (1.0 - q1 * q2 * (1.0 - qb2)) - qb2 * q3;
  for (double pk : out.p)
    if (pk < -1e-12)
      throw NegativeProbability("compute_ps: inconsistent q inputs give p_k = " + std::to_string(pk));
  return out;
}

/// P(fixation of a single mutant) in the large-K limit: s = S_aA/f_a.
inline double fixation_prob(const DerivedEco& d) { return d.s; }

namespace detail {
inline double multinomial_coefficient(std::int64_t d, std::span<const std::int64_t> m) {
  // exact in double for the d used here (d! < 2^53 up to d = 18)
  double coef = 1;
  std::int64_t placed = 0;
  for (std::int64_t mk : m)
    for (std::int64_t j = 1; j <= mk; ++j) {
      ++placed;
      coef *= static_cast<double>(placed) / static_cast<double>(j);
    }
  (void)d;
  return coef;
}

inline double class_multinomial_pmf(const std::array<double, 5>& w, std::int64_t d,
                                    const ClassCounts& m) {
  const std::array<std::int64_t, 5> counts = {m.m1, m.m2, m.m3, m.m4, m.m5};
  for (std::int64_t mk : counts)
    if (mk < 0) throw std::invalid_argument("class counts must be non-negative");
  if (m.m1 + m.m2 + m.m3 + m.m4 + m.m5 != d)
    throw std::invalid_argument("class counts must sum to the sample size d");
  double pmf = multinomial_coefficient(d, counts);
  for (std::size_t k = 0; k < 5; ++k) {
    if (counts[k] == 0) continue;
    if (w[k] == 0) return 0.0;
    pmf *= std::pow(w[k], static_cast<double>(counts[k]));
  }
  return pmf;
}
}  // namespace detail

/// Sampling pmf of the class-count vector for the adjacent geometry SL-N1-N2:
/// multinomial with weights (p1..p5). Individuals are asymptotically
/// independent, so the d-sample law factorizes over classes.
inline double theorem1_pmf(const AnalyticPs& ps, std::int64_t d, const ClassCounts& m) {
  return detail::class_multinomial_pmf(ps.p, d, m);
}

/// Class weights for the separated geometry N1-SL-N2; the two loci escape
/// independently and the one-founder pair class is absent.
inline std::array<double, 5> theorem2_weights(const AnalyticQs& q) {
  return {q.q1 * q.q2, q.q1 * (1.0 - q.q2), (1.0 - q.q1) * q.q2, 0.0,
          (1.0 - q.q1) * (1.0 - q.q2)};
}

inline double theorem2_pmf(const AnalyticQs& qs, std::int64_t d, const ClassCounts& m) {
  if (m.m4 > 0) return 0.0;
  return detail::class_multinomial_pmf(theorem2_weights(qs), d, m);
}

// ---------------------------------------------------------------------------
// Lotka-Volterra flow (the macroscopic second-phase dynamics)

struct LVState {
  double n_A = 0, n_a = 0;
};

struct LVOptions {
  double atol = 1e-9;
  double rtol = 1e-9;
  double sample_dt = 0.1;  // trajectory sampling stride
};

struct LVTrajectory {
  std::vector<std::pair<double, LVState>> points;  // includes t = 0 and t = t_end
  LVState final_state;
  bool clamp_reported = false;  // a component dipped below -atol and was clamped
};

namespace detail {
template <class P>
auto lv_field(const P& p) {
  return [&p](double, const std::array<double, 2>& y) {
    const double growth_a =
        p.f_A - p.D_A - p.comp(Allele::A, Allele::A) * y[0] - p.comp(Allele::A, Allele::a) * y[1];
    const double growth_m =
        p.f_a - p.D_a - p.comp(Allele::a, Allele::A) * y[0] - p.comp(Allele::a, Allele::a) * y[1];
    return std::array<double, 2>{growth_a * y[0], growth_m * y[1]};
  };
}
}  // namespace detail

/// Integrates dn_alpha/dt = (f_alpha - D_alpha - C_{alpha,A} n_A
/// - C_{alpha,a} n_a) n_alpha from z over [0, t_end]. The axes are invariant
/// under the exact flow, so any numerical negative is clamped to 0; dips past
/// -atol are flagged in the result.
inline LVTrajectory lv_flow(const EcoParams& params, LVState z, double t_end,
                            const LVOptions& opt = {}) {
  if (!(z.n_A >= 0 && z.n_a >= 0))
    throw std::invalid_argument("lv_flow: initial densities must be non-negative");
  if (!(t_end >= 0)) throw std::invalid_argument("lv_flow: t_end must be non-negative");

  LVTrajectory traj;
  auto field = detail::lv_field(params);
  OdeOptions ode{opt.atol, opt.rtol, 0, 50'000'000};
  std::array<double, 2> y{z.n_A, z.n_a};
  double t = 0;
  traj.points.push_back({t, z});
  while (t < t_end) {
    const double t_next = std::min(t_end, t + opt.sample_dt);
    y = integrate<2>(field, y, t, t_next, ode);
    for (double& v : y) {
      if (v < 0) {
        if (v < -opt.atol) traj.clamp_reported = true;
        v = 0;
      }
    }
    t = t_next;
    traj.points.push_back({t, LVState{y[0], y[1]}});
  }
  traj.final_state = traj.points.back().second;
  return traj;
}

struct TEpsOptions {
  double confirm_window = 10;  // time the flow must stay in the box
  double sample_dt = 0.01;
  double t_cap = 1000;
  double atol = 1e-9;
  double rtol = 1e-9;
};

/// First time tau after which the flow from z stays in
/// [0, eps^2/2] x [nbar_a - eps/2, nbar_a + eps/2], detected via a
/// confirmation window: all samples in [tau, tau + confirm_window] must lie in
/// the box. Sound because the equilibrium (0, nbar_a) is attracting on
/// {z_a > 0}. Throws NotReached past the time cap.
inline double t_eps_of_z(const EcoParams& params, LVState z, double eps,
                         const TEpsOptions& opt = {}) {
  if (!(eps > 0 && eps < 1)) throw std::invalid_argument("t_eps_of_z: eps must lie in (0,1)");
  if (!(z.n_A >= 0 && z.n_a > 0))
    throw std::invalid_argument("t_eps_of_z: need z_A >= 0 and z_a > 0");
  const DerivedEco d = derive(params);
  auto in_box = [&](const std::array<double, 2>& y) {
    return y[0] >= 0 && y[0] <= eps * eps / 2 && std::abs(y[1] - d.nbar_a) <= eps / 2;
  };

  auto field = detail::lv_field(params);
  OdeOptions ode{opt.atol, opt.rtol, 0, 50'000'000};
  std::array<double, 2> y{z.n_A, z.n_a};
  double t = 0;
  double entry = in_box(y) ? 0 : -1;  // -1: currently outside
  while (t < opt.t_cap) {
    if (entry >= 0 && t - entry >= opt.confirm_window) return entry;
    const double t_next = t + opt.sample_dt;
    y = integrate<2>(field, y, t, t_next, ode);
    for (double& v : y) v = std::max(v, 0.0);
    t = t_next;
    if (in_box(y)) {
      if (entry < 0) entry = t;
    } else {
      entry = -1;
    }
  }
  throw NotReached("t_eps_of_z: confirmation window never validated before the time cap");
}

/// Grid maximum of t_eps over user-supplied entry states (not claimed to be
/// the exact supremum over the entry set).
inline double t_eps_grid_max(const EcoParams& params, std::span<const LVState> grid,
                             double eps, const TEpsOptions& opt = {}) {
  double worst = 0;
  for (const LVState& z : grid) worst = std::max(worst, t_eps_of_z(params, z, eps, opt));
  return worst;
}

}  // namespace sweepsim
