#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("sweepsim_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const char* name) const { return (path / name).string(); }
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out);
  out << text;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SWEEPSIM_BIN) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

const char* kBaseConfig =
    "f_A = 2\nf_a = 3\nD_A = 0.5\nD_a = 0.5\n"
    "C_AA = 1\nC_Aa = 1\nC_aA = 1\nC_aa = 1\n"
    "K = 120\nr1_logK = 0.2\nr2_logK = 0.3\ngeometry = adjacent\n";

}  // namespace

TEST_CASE("cli: analytic run succeeds and writes the summary") {
  TempDir dir;
  const std::string cfg = dir.file("a.conf");
  const std::string out = dir.file("a.json");
  write_file(cfg, std::string(kBaseConfig) + "mode = analytic\nout_json = " + out + "\n");
  CHECK(run_cli("analytic --config " + cfg) == 0);
  const nlohmann::json j = nlohmann::json::parse(slurp(out));
  CHECK(j["analytic"].contains("q3"));
}

TEST_CASE("cli: config errors exit 2") {
  TempDir dir;
  const std::string cfg = dir.file("bad.conf");
  write_file(cfg, std::string(kBaseConfig) + "volume = 11\n");
  CHECK(run_cli("analytic --config " + cfg) == 2);
  // unreadable path
  CHECK(run_cli("analytic --config " + dir.file("missing.conf")) == 2);
  // subcommand/mode mismatch
  const std::string cfg2 = dir.file("mismatch.conf");
  write_file(cfg2, std::string(kBaseConfig) + "mode = compare\n");
  CHECK(run_cli("analytic --config " + cfg2) == 2);
}

TEST_CASE("cli: regime violations exit 3") {
  TempDir dir;
  const std::string cfg = dir.file("regime.conf");
  // f_a = 2 makes S_aA = 0: not a sweep regime
  std::string text = kBaseConfig;
  text.replace(text.find("f_a = 3"), 7, "f_a = 2");
  write_file(cfg, text + "mode = analytic\n");
  CHECK(run_cli("analytic --config " + cfg) == 3);
}

TEST_CASE("cli: attempt cap exits 4 and flushes truncated output") {
  TempDir dir;
  const std::string cfg = dir.file("cap.conf");
  const std::string csv = dir.file("cap.csv");
  const std::string json = dir.file("cap.json");
  write_file(cfg, std::string(kBaseConfig) + "mode = compare\nn_fixed = 5000\nmaster_seed = 5\n" +
                      "out_csv = " + csv + "\nout_json = " + json + "\n");
  CHECK(run_cli("compare --config " + cfg + " --attempt-cap 10") == 4);
  const nlohmann::json j = nlohmann::json::parse(slurp(json));
  CHECK(j["runtime"]["truncated"].get<bool>() == true);
  CHECK(slurp(csv).rfind("replicate,", 0) == 0);
}

TEST_CASE("cli: compare run is reproducible and honors --seed") {
  TempDir dir;
  const std::string cfg = dir.file("c.conf");
  const std::string csv = dir.file("c.csv");
  write_file(cfg, std::string(kBaseConfig) +
                      "mode = compare\nn_fixed = 10\nmaster_seed = 77\nout_csv = " + csv + "\n");
  REQUIRE(run_cli("compare --config " + cfg) == 0);
  const std::string first = slurp(csv);
  REQUIRE(run_cli("compare --config " + cfg + " --threads 2") == 0);
  CHECK(slurp(csv) == first);
  REQUIRE(run_cli("compare --config " + cfg + " --seed 78") == 0);
  CHECK(slurp(csv) != first);
}

TEST_CASE("cli: diagnostics with a trajectory dump") {
  TempDir dir;
  const std::string cfg = dir.file("d.conf");
  const std::string traj = dir.file("traj.csv");
  write_file(cfg, std::string(kBaseConfig) + "mode = diagnostics\nn_fixed = 20\nmaster_seed = 3\n");
  REQUIRE(run_cli("diagnostics --config " + cfg + " --levels 3 5 --trajectory " + traj) == 0);
  const std::string text = slurp(traj);
  CHECK(text.rfind("t,n_A,n_a\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') > 2);
}
