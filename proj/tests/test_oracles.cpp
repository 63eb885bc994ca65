#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "sweepsim/oracles.hpp"
#include "oracle_helpers.hpp"
#include "test_helpers.hpp"

using namespace sweepsim;
using sweepsim::testing::reference_params;

namespace {

using sweepsim::testing::absorption_solve;

}  // namespace

TEST_CASE("bd_hitting_prob boundary values") {
  CHECK(bd_hitting_prob({2, 1, 0, 0, 3}) == 0.0);
  CHECK(bd_hitting_prob({2, 1, 0, 3, 3}) == 1.0);
}

TEST_CASE("bd_hitting_prob matches a hand absorption solve") {
  // b=2, d=1, i=0, j=1, k=3: two-unknown system gives 4/7
  CHECK(bd_hitting_prob({2, 1, 0, 1, 3}) == Catch::Approx(4.0 / 7.0).margin(1e-15));
}

TEST_CASE("bd_hitting_prob symmetric-walk limit at b = d") {
  CHECK(bd_hitting_prob({1.5, 1.5, 0, 1, 4}) == Catch::Approx(0.25).margin(1e-15));
  CHECK(bd_hitting_prob({1.5, 1.5, 2, 5, 8}) == Catch::Approx(0.5).margin(1e-15));
}

TEST_CASE("bd_hitting_prob agrees with brute-force absorption solves") {
  for (const double ratio : {0.25, 0.5, 2.0, 4.0}) {
    const double b = 1.0, d = ratio;  // only d/b matters
    for (std::int64_t i : {0, 3}) {
      for (std::int64_t span = 2; span <= 30; ++span) {
        const std::int64_t k = i + span;
        for (std::int64_t j = i + 1; j < k; ++j) {
          const double closed = bd_hitting_prob({b, d, i, j, k});
          const double brute = absorption_solve(b, d, i, j, k);
          REQUIRE_THAT(closed, Catch::Matchers::WithinAbs(brute, 1e-10));
        }
      }
    }
  }
}

TEST_CASE("bd_hitting_prob rejects malformed walks") {
  CHECK_THROWS_AS(bd_hitting_prob({1, 1, 3, 2, 3}), std::invalid_argument);
  CHECK_THROWS_AS(bd_hitting_prob({1, 1, 0, 0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(bd_hitting_prob({0, 1, 0, 1, 2}), std::invalid_argument);
}

TEST_CASE("geometric compound: degenerate parameters give a point mass") {
  CHECK(geometric_compound_pmf(1.0, 1.0, 1) == 1.0);
  CHECK(geometric_compound_pmf(1.0, 1.0, 2) == 0.0);
}

TEST_CASE("geometric compound pmf at a hand-checked point") {
  // pa = pb = 0.5: only v=1, G_1=1 contributes at n=1 -> 0.25 = Geom(0.25) at 1
  CHECK(geometric_compound_pmf(0.5, 0.5, 1) == Catch::Approx(0.25).margin(1e-15));
}

TEST_CASE("geometric compounding collapses to Geom(pa*pb)") {
  for (double pa = 0.1; pa < 0.95; pa += 0.2) {
    for (double pb = 0.1; pb < 0.95; pb += 0.2) {
      CHECK(check_geometric_compound(pa, pb, 200) <= 1e-10);
    }
  }
}

TEST_CASE("sum_integral_residual: empty sum at k = 1") {
  CHECK(sum_integral_residual(1.3, 1000, 1) == 0.0);
  CHECK(sum_integral_residual(0.0, 1000, 1) == 0.0);
}

TEST_CASE("sum_integral_residual harmonic case stays within 1") {
  // cN = 0: |sum 1/(l+1) - log k| <= 1 for all k <= N
  CHECK(sum_integral_residual_max(0.0, 1000) <= 1.0);
  CHECK(std::abs(sum_integral_residual(0.0, 1000, 1000)) <= 1.0);
}

TEST_CASE("sum_integral_residual_max agrees with direct evaluation") {
  const double c_n = 1.7;
  const double n = 500;
  double direct = 0;
  for (std::int64_t k = 1; k <= 500; ++k)
    direct = std::max(direct, std::abs(sum_integral_residual(c_n, n, k)));
  CHECK(sum_integral_residual_max(c_n, n) == Catch::Approx(direct).margin(1e-12));
}

TEST_CASE("moran process keeps the population size constant") {
  const EcoParams p = reference_params(50, 0, 0.3);
  const MoranResult res = moran_birth_count(p, Allele::a, 2.0, 99);
  CHECK(res.final_state.size() == 125);  // floor(2.5 * 50)
  CHECK(res.event_count > 0);
}

TEST_CASE("moran process with r2 = 0 copies both labels from the reproducing parent") {
  const EcoParams p = reference_params(50, 0, 0);
  const MoranResult res = moran_birth_count(p, Allele::a, 2.0, 7);
  for (const Individual& ind : res.final_state) CHECK(ind.label1 == ind.label2);
}

TEST_CASE("moran event count is consistent with its Poisson rate") {
  // rate = f_a * nbar_a * K; mean count over [0,t] is rate*t, variance equal.
  const EcoParams p = reference_params(40, 0, 0.2);
  const double rate = 3.0 * 2.5 * 40;
  const double t_end = 1.0;
  const int reps = 200;
  double total = 0;
  for (int r = 0; r < reps; ++r)
    total += static_cast<double>(moran_birth_count(p, Allele::a, t_end, 1000 + r).event_count);
  const double mean = total / reps;
  const double sigma = std::sqrt(rate * t_end / reps);
  CHECK(std::abs(mean - rate * t_end) <= 4 * sigma);
}

TEST_CASE("expected_upcrossings frozen values") {
  CHECK(expected_upcrossings(1.0 / 3.0, 100, 10) == Catch::Approx(2.96531694016833).epsilon(1e-12));
  CHECK(expected_upcrossings(1.0 / 3.0, 100, 5) == Catch::Approx(2.73662551440329).epsilon(1e-12));
  CHECK(expected_upcrossings(1.0 / 3.0, 100, 20) == Catch::Approx(2.99939854268033).epsilon(1e-12));
}

TEST_CASE("expected_upcrossings limits") {
  // mid-range level, large window: both geometric terms vanish -> 1/s
  CHECK(expected_upcrossings(0.25, 4000, 2000) == Catch::Approx(4.0).epsilon(1e-9));
  // k = epsK - 1 for large epsK: (1 - (1-s))/s = 1
  CHECK(expected_upcrossings(1.0 / 3.0, 100, 99) == Catch::Approx(1.0).epsilon(1e-6));
  CHECK_THROWS_AS(expected_upcrossings(0.5, 100, 0), std::invalid_argument);
  CHECK_THROWS_AS(expected_upcrossings(0.5, 100, 100), std::invalid_argument);
  CHECK_THROWS_AS(expected_upcrossings(1.5, 100, 10), std::invalid_argument);
}
