#pragma once

#include <cstdint>
#include <vector>

namespace sweepsim::testing {

/// Independent oracle for the absorption probability of a +-1 walk with up
/// probability b/(b+d): solves h(i) = 0, h(k) = 1,
/// h(j) = u h(j+1) + (1-u) h(j-1) by elimination on the tridiagonal system.
inline double absorption_solve(double b, double d, std::int64_t i, std::int64_t j,
                               std::int64_t k) {
  if (j == i) return 0.0;
  if (j == k) return 1.0;
  const auto n = static_cast<std::size_t>(k - i);
  const double u = b / (b + d);
  std::vector<double> diag(n, 1.0), rhs(n, 0.0);
  const double lower = -(1.0 - u), upper = -u;
  rhs[n - 1] = u;
  for (std::size_t m = 2; m <= n - 1; ++m) {
    const double factor = lower / diag[m - 1];
    diag[m] -= factor * upper;
    rhs[m] -= factor * rhs[m - 1];
  }
  std::vector<double> sol(n, 0.0);
  sol[n - 1] = rhs[n - 1] / diag[n - 1];
  for (std::size_t m = n - 1; m >= 2; --m)
    sol[m - 1] = (rhs[m - 1] - upper * sol[m]) / diag[m - 1];
  return sol[static_cast<std::size_t>(j - i)];
}

}  // namespace sweepsim::testing
