#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "qcmi/io.hpp"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(QCMI_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("qcmi_cli_" + std::to_string(::getpid()))) {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(run("") == 2);
  CHECK(run("no-such-command") == 2);
  CHECK(run("figure1 --dims 2,2") == 2);
  CHECK(run("figure1 --samples 0") == 2);
  CHECK(run("figure1 --workers 0") == 2);
  CHECK(run("optimize --state x.json --objective bogus") == 2);
  CHECK(run("recover --state /nonexistent.json") == 2);
  CHECK(run("--help") == 0);
}

TEST_CASE("figure1 writes csv, json and svg") {
  TempDir tmp;
  const auto csv = tmp.path / "f.csv", json = tmp.path / "f.json", svg = tmp.path / "f.svg";
  CHECK(run("figure1 --seed 5 --samples 30 --workers 3 --out-csv " + csv.string() + " --out-json " +
            json.string() + " --out-svg " + svg.string()) == 0);
  CHECK(fs::exists(svg));
  const auto j = nlohmann::json::parse(qcmi::read_text(json));
  CHECK(j["config"]["n_samples"].get<int>() == 30);
  CHECK(qcmi::read_text(csv).find("sample_id,cmi_bits") == 0);
}

TEST_CASE("recover and optimize on a sampled state") {
  TempDir tmp;
  const auto state = tmp.path / "s.json", rep = tmp.path / "r.json", opt = tmp.path / "o.json";
  REQUIRE(run("sample-state --seed 3 --out " + state.string()) == 0);
  CHECK(run("recover --measured-re --state " + state.string() + " --out-json " + rep.string()) == 0);
  const auto r = nlohmann::json::parse(qcmi::read_text(rep));
  CHECK(r.contains("cmi_bits"));
  CHECK(r.contains("measured_re_bits"));
  CHECK(run("optimize --restarts 2 --state " + state.string() + " --out-json " + opt.string()) == 0);
  const auto o = nlohmann::json::parse(qcmi::read_text(opt));
  CHECK(o["objective_kind"] == "fidelity");
  CHECK(o["best_value"].get<double>() <= 1.0);
}

TEST_CASE("verify reports pass and the classical example runs") {
  CHECK(run("verify --samples 10 --certificate-samples 3") == 0);
  CHECK(run("verify --samples 5 --check ssa --check markov_gap --source markov") == 0);
  CHECK(run("classical-example --d 8 --eps 0.2") == 0);
}
