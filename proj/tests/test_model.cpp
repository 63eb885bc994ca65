#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "sweepsim/model.hpp"
#include "sweepsim/rng.hpp"
#include "test_helpers.hpp"

using namespace sweepsim;
using sweepsim::testing::reference_params;
using Catch::Matchers::ContainsSubstring;

TEST_CASE("derive reproduces the reference parameter set exactly") {
  const DerivedEco d = derive(reference_params());
  CHECK(d.nbar_A == 1.5);
  CHECK(d.nbar_a == 2.5);
  CHECK(d.S_aA == 1.0);
  CHECK(d.S_Aa == -1.0);
  CHECK(d.s == 1.0 / 3.0);
  CHECK(d.sbar == 0.5);
}

TEST_CASE("derive: symmetric neutral case has zero invasion fitness") {
  EcoParams p = reference_params();
  p.f_A = p.f_a = 2.0;
  p.D_A = p.D_a = 0.5;
  const DerivedEco d = derive(p);
  CHECK(d.S_aA == 0.0);
  CHECK(d.S_Aa == 0.0);
}

TEST_CASE("derive: zero net growth gives zero equilibrium density") {
  EcoParams p = reference_params();
  p.D_a = p.f_a;  // f_a = D_a
  CHECK(derive(p).nbar_a == 0.0);
}

TEST_CASE("derive rejects zero diagonal competition") {
  EcoParams p = reference_params();
  p.C[1][1] = 0.0;
  CHECK_THROWS_AS(derive(p), std::invalid_argument);
}

TEST_CASE("EcoParams construction rejects NaN and infinities") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double inf = std::numeric_limits<double>::infinity();
  EcoParams p = reference_params();
  p.f_a = nan;
  CHECK_THROWS_AS(p.check(), std::invalid_argument);
  p = reference_params();
  p.C[0][1] = inf;
  CHECK_THROWS_AS(p.check(), std::invalid_argument);
  p = reference_params();
  p.r1 = 1.5;
  CHECK_THROWS_AS(p.check(), std::invalid_argument);
  p = reference_params();
  p.K = 0;
  CHECK_THROWS_AS(p.check(), std::invalid_argument);
}

TEST_CASE("validate_sweep_regime accepts the reference parameters") {
  const ValidationReport rep = validate_sweep_regime(reference_params());
  CHECK(rep.ok);
  CHECK(rep.violations.empty());
}

TEST_CASE("validate_sweep_regime flags S_aA = 0") {
  // push the mutant to neutrality: f_a - D_a - C_aA*nbar_A = 0
  EcoParams p = reference_params();
  p.f_a = 2.0;  // 2 - 0.5 - 1.5 = 0
  const ValidationReport rep = validate_sweep_regime(p);
  CHECK_FALSE(rep.ok);
  bool found = false;
  for (const auto& v : rep.violations) found = found || v.find("S_aA must be positive") != std::string::npos;
  CHECK(found);
}

TEST_CASE("validate_sweep_regime flags zero diagonal competition") {
  EcoParams p = reference_params();
  p.C[1][1] = 0.0;
  const ValidationReport rep = validate_sweep_regime(p);
  CHECK_FALSE(rep.ok);
  REQUIRE_FALSE(rep.violations.empty());
  CHECK_THAT(rep.violations.front(), ContainsSubstring("diagonal competition must be positive"));
}

TEST_CASE("validate_sweep_regime warns when r*log K is large") {
  EcoParams p = reference_params();
  p.r1 = 0.9;  // 0.9 * log(1000) ~ 6.2 > 5
  const ValidationReport rep = validate_sweep_regime(p);
  CHECK(rep.ok);  // advisory only
  REQUIRE_FALSE(rep.warnings.empty());
  CHECK_THAT(rep.warnings.front(), ContainsSubstring("r1*log K"));
  CHECK(rep.r1_log_k == Catch::Approx(0.9 * std::log(1000.0)));
}

TEST_CASE("uniform time rescaling leaves nbar and s invariant") {
  Rng rng(20240811);
  for (int trial = 0; trial < 200; ++trial) {
    EcoParams p = reference_params();
    p.f_A = 0.5 + 4 * rng.uniform();
    p.f_a = 0.5 + 4 * rng.uniform();
    p.D_A = 2 * rng.uniform();
    p.D_a = 2 * rng.uniform();
    for (auto& row : p.C)
      for (double& c : row) c = 0.1 + rng.uniform();

    // powers of two scale exactly in binary floating point
    for (const double lambda : {0.5, 2.0, 8.0}) {
      EcoParams q = p;
      q.f_A *= lambda; q.f_a *= lambda;
      q.D_A *= lambda; q.D_a *= lambda;
      for (auto& row : q.C)
        for (double& c : row) c *= lambda;
      const DerivedEco dp = derive(p);
      const DerivedEco dq = derive(q);
      CHECK(dq.nbar_A == dp.nbar_A);
      CHECK(dq.nbar_a == dp.nbar_a);
      CHECK(dq.S_aA == lambda * dp.S_aA);
      CHECK(dq.S_Aa == lambda * dp.S_Aa);
      CHECK(dq.s == dp.s);
      CHECK(dq.sbar == dp.sbar);
    }
    // a generic factor holds to rounding
    const double lambda = 1.0 + rng.uniform();
    EcoParams q = p;
    q.f_A *= lambda; q.f_a *= lambda;
    q.D_A *= lambda; q.D_a *= lambda;
    for (auto& row : q.C)
      for (double& c : row) c *= lambda;
    CHECK(derive(q).s == Catch::Approx(derive(p).s).epsilon(1e-12));
    CHECK(derive(q).nbar_a == Catch::Approx(derive(p).nbar_a).epsilon(1e-12));
  }
}

TEST_CASE("validated regime implies 0 < s < 1 when the mutant sees any death pressure") {
  Rng rng(77);
  int checked = 0;
  while (checked < 500) {
    EcoParams p = reference_params();
    p.f_A = 0.5 + 4 * rng.uniform();
    p.f_a = 0.5 + 4 * rng.uniform();
    p.D_A = 2 * rng.uniform();
    p.D_a = 2 * rng.uniform();
    for (auto& row : p.C)
      for (double& c : row) c = 0.1 + rng.uniform();
    const ValidationReport rep = validate_sweep_regime(p);
    if (!rep.ok) continue;
    ++checked;
    const DerivedEco d = derive(p);
    if (p.D_a + p.comp(Allele::a, Allele::A) * d.nbar_A > 0) {
      CHECK(d.s > 0);
      CHECK(d.s < 1);
    }
  }
}
