#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>

#include "sweepsim/config.hpp"

using namespace sweepsim;
using Catch::Matchers::ContainsSubstring;

namespace {

const std::string kBase =
    "f_A = 2\n"
    "f_a = 3\n"
    "D_A = 0.5\n"
    "D_a = 0.5\n"
    "C_AA = 1\n"
    "C_Aa = 1\n"
    "C_aA = 1\n"
    "C_aa = 1\n"
    "K = 1000\n"
    "r1_logK = 0.2\n"
    "r2_logK = 0.3\n"
    "geometry = adjacent\n";

}  // namespace

TEST_CASE("minimal analytic config parses") {
  const ExperimentConfig cfg = parse_config(kBase + "mode = analytic\n");
  CHECK(cfg.mode == RunMode::Analytic);
  CHECK(cfg.params.K == 1000);
  CHECK(cfg.params.f_a == 3.0);
  CHECK(cfg.params.r1 == Catch::Approx(0.2 / std::log(1000.0)).epsilon(1e-15));
  CHECK(cfg.params.r2 == Catch::Approx(0.3 / std::log(1000.0)).epsilon(1e-15));
  CHECK(cfg.d == 1);
  CHECK(cfg.eps_diag == 0.1);
  CHECK_NOTHROW(finalize_config(cfg, RunMode::Analytic));
}

TEST_CASE("comments, blank lines and full key set") {
  const std::string text = kBase +
                           "# an experiment\n"
                           "\n"
                           "mode = compare\n"
                           "d = 2\n"
                           "n_fixed = 100  # replicates\n"
                           "master_seed = 42\n"
                           "eps_diag = 0.05\n"
                           "out_csv = runs.csv\n"
                           "out_json = summary.json\n";
  const ExperimentConfig cfg = parse_config(text);
  CHECK(cfg.d == 2);
  CHECK(cfg.n_fixed == 100);
  CHECK(cfg.master_seed == 42);
  CHECK(cfg.eps_diag == 0.05);
  CHECK(cfg.out_csv == "runs.csv");
  CHECK(cfg.out_json == "summary.json");
}

TEST_CASE("unknown key is rejected with its line") {
  try {
    parse_config(kBase + "volume = 11\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK_THAT(e.what(), ContainsSubstring("unknown key 'volume'"));
    CHECK_THAT(e.what(), ContainsSubstring("line 13"));
  }
}

TEST_CASE("conflicting r keys are rejected") {
  const std::string text = kBase + "r1 = 0.01\n";  // r1_logK already present
  try {
    parse_config(text);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK_THAT(e.what(), ContainsSubstring("conflicting keys 'r1' and 'r1_logK'"));
  }
}

TEST_CASE("missing required key is rejected") {
  std::string text = kBase;
  text.replace(text.find("f_a = 3\n"), 8, "");
  CHECK_THROWS_WITH(parse_config(text), ContainsSubstring("missing required key 'f_a'"));
}

TEST_CASE("type mismatch is rejected with its line") {
  std::string text = kBase;
  text.replace(text.find("K = 1000"), 8, "K = soon");
  try {
    parse_config(text);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK_THAT(e.what(), ContainsSubstring("line 9"));
    CHECK_THAT(e.what(), ContainsSubstring("expected an integer"));
  }
}

TEST_CASE("duplicate key is rejected") {
  CHECK_THROWS_WITH(parse_config(kBase + "K = 500\n"), ContainsSubstring("duplicate key 'K'"));
}

TEST_CASE("geometry and mode values are validated") {
  std::string text = kBase;
  text.replace(text.find("geometry = adjacent"), 19, "geometry = sideways");
  CHECK_THROWS_WITH(parse_config(text), ContainsSubstring("'adjacent' or 'separated'"));
  CHECK_THROWS_WITH(parse_config(kBase + "mode = sideways\n"),
                    ContainsSubstring("simulate|analytic|compare|diagnostics"));
  const ExperimentConfig cfg = parse_config(kBase + "mode = diagnostics\n");
  CHECK(cfg.mode == RunMode::Diagnostics);
}

TEST_CASE("geometry = separated selects the separated alignment") {
  std::string text = kBase;
  text.replace(text.find("geometry = adjacent"), 19, "geometry = separated");
  CHECK(parse_config(text).params.geometry == Geometry::Separated);
}

TEST_CASE("r_logK with K = 1 is rejected") {
  std::string text = kBase;
  text.replace(text.find("K = 1000"), 8, "K = 1");
  CHECK_THROWS_WITH(parse_config(text), ContainsSubstring("requires K >= 2"));
}

TEST_CASE("mode-dependent completeness") {
  const ExperimentConfig cfg = parse_config(kBase);  // no n_fixed
  CHECK_NOTHROW(finalize_config(cfg, RunMode::Analytic));
  CHECK_THROWS_WITH(finalize_config(cfg, RunMode::Compare),
                    ContainsSubstring("n_fixed must be at least 1"));
  CHECK_THROWS_WITH(finalize_config(cfg, RunMode::Simulate),
                    ContainsSubstring("n_fixed must be at least 1"));
}

TEST_CASE("domain checks surface as config errors") {
  std::string text = kBase;
  text.replace(text.find("f_a = 3\n"), 8, "f_a = -1\n");
  CHECK_THROWS_AS(parse_config(text), ConfigError);
  CHECK_THROWS_WITH(parse_config(kBase + "d = 0\n"), ContainsSubstring("d must be at least 1"));
  CHECK_THROWS_WITH(parse_config(kBase + "eps_diag = 1.5\n"),
                    ContainsSubstring("eps_diag must lie in (0,1)"));
}
