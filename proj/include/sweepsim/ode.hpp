#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

#include "sweepsim/errors.hpp"

namespace sweepsim {

struct OdeOptions {
  double atol = 1e-9;
  double rtol = 1e-9;
  double h_max = 0;  // 0: no bound beyond the interval length
  std::uint64_t max_steps = 50'000'000;
};

/// One Dormand-Prince 5(4) step: fills the 5th-order solution and the
/// embedded error estimate. f(t, y) returns dy/dt.
template <std::size_t N, class F>
void dp5_step(F&& f, double t, const std::array<double, N>& y, double h,
              std::array<double, N>& y5, std::array<double, N>& err) {
  using V = std::array<double, N>;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                   a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                   b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  auto axpy = [&](const V& base, std::initializer_list<std::pair<double, const V*>> terms) {
    V out = base;
    for (auto [c, k] : terms)
      for (std::size_t i = 0; i < N; ++i) out[i] += h * c * (*k)[i];
    return out;
  };

  const V k1 = f(t, y);
  const V k2 = f(t + h / 5, axpy(y, {{a21, &k1}}));
  const V k3 = f(t + 3 * h / 10, axpy(y, {{a31, &k1}, {a32, &k2}}));
  const V k4 = f(t + 4 * h / 5, axpy(y, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
  const V k5 = f(t + 8 * h / 9, axpy(y, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
  const V k6 = f(t + h, axpy(y, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
  y5 = axpy(y, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
  const V k7 = f(t + h, y5);
  for (std::size_t i = 0; i < N; ++i)
    err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
}

/// Adaptive integration of y' = f(t, y) from t0 to t1 (t1 >= t0). Throws
/// StepFailure when the controller cannot meet tolerance.
template <std::size_t N, class F>
std::array<double, N> integrate(F&& f, std::array<double, N> y, double t0,
                                double t1, const OdeOptions& opt = {}) {
  if (!(t1 >= t0)) throw std::invalid_argument("integrate: t1 >= t0 required");
  if (t1 == t0) return y;
  double t = t0;
  double h_cap = t1 - t0;
  if (opt.h_max > 0) h_cap = std::min(h_cap, opt.h_max);
  double h = std::min(h_cap, (t1 - t0) / 100);

  std::array<double, N> y5{}, err{};
  for (std::uint64_t steps = 0; t < t1; ++steps) {
    if (steps >= opt.max_steps) throw StepFailure("integrate: step budget exhausted");
    h = std::min(h, t1 - t);
    dp5_step<N>(f, t, y, h, y5, err);
    double norm = 0;
    for (std::size_t i = 0; i < N; ++i) {
      if (!std::isfinite(y5[i]) || !std::isfinite(err[i])) {
        norm = std::numeric_limits<double>::infinity();
        break;
      }
      const double scale = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
      norm = std::max(norm, std::abs(err[i]) / scale);
    }
    if (norm <= 1.0) {
      t += h;
      y = y5;
    } else if (h <= 1e-14 * std::max(1.0, std::abs(t))) {
      throw StepFailure("integrate: tolerance not reachable, step size underflow");
    }
    const double factor = norm > 0 ? 0.9 * std::pow(norm, -0.2) : 5.0;
    h = std::min(h_cap, h * std::clamp(factor, 0.2, 5.0));
  }
  return y;
}

}  // namespace sweepsim
