#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <json.hpp>

#include "symham/experiments.hpp"

using symham::cli::run_experiment_config;
using nlohmann::json;

namespace {

int run_binary(const std::string& args) {
#ifdef SYMHAM_CLI_BINARY
  const std::string cmd = std::string(SYMHAM_CLI_BINARY) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
#else
  (void)args;
  return -1;
#endif
}

std::string write_temp(const std::string& name, const std::string& text) {
  const std::string path = std::string("/tmp/symham_test_") + name;
  std::ofstream f(path);
  f << text;
  return path;
}

}  // namespace

TEST_CASE("schema violations exit with code 2") {
  CHECK(run_experiment_config("not json at all", 0, 1).exit_code == 2);
  CHECK(run_experiment_config(R"({"no_command":1})", 0, 1).exit_code == 2);
  CHECK(run_experiment_config(R"({"command":"frobnicate"})", 0, 1).exit_code == 2);
  CHECK(run_experiment_config(R"({"command":"verify","mutate":"nonsense"})", 0, 1).exit_code == 2);
}

TEST_CASE("transfer: empty length list gives an empty table, exit 0") {
  const auto out = run_experiment_config(R"({"command":"transfer","lengths":[]})", 0, 1);
  CHECK(out.exit_code == 0);
  CHECK(out.payload.find("# L,t_star,p_star") != std::string::npos);
}

TEST_CASE("transfer output is deterministic and thread-count independent") {
  const std::string cfg = R"({"command":"transfer","lengths":[4,8,12],"epsilon":0.01})";
  const auto a = run_experiment_config(cfg, 7, 1);
  const auto b = run_experiment_config(cfg, 7, 1);
  const auto c = run_experiment_config(cfg, 7, 3);
  CHECK(a.exit_code == 0);
  CHECK(a.payload == b.payload);
  CHECK(a.payload == c.payload);
}

TEST_CASE("verify: default configuration passes every check") {
  const auto out = run_experiment_config(R"({"command":"verify"})", 42, 1);
  CHECK(out.exit_code == 0);
  const json rep = json::parse(out.payload);
  CHECK(rep.at("passed").get<bool>());
  for (const auto& check : rep.at("checks")) CHECK(check.at("passed").get<bool>());
}

TEST_CASE("verify: a mutated flag layout fails suppression with exit 1") {
  const auto out =
      run_experiment_config(R"({"command":"verify","mutate":"drop_section_a"})", 42, 1);
  CHECK(out.exit_code == 1);
  const json rep = json::parse(out.payload);
  CHECK_FALSE(rep.at("passed").get<bool>());
}

TEST_CASE("compute: all-skip tape has fidelity one") {
  const auto out = run_experiment_config(
      R"({"command":"compute","tape":["skip","skip","skip"],"data":[1,0,1]})", 0, 1);
  CHECK(out.exit_code == 0);
  const json rep = json::parse(out.payload);
  CHECK(rep.at("passed").get<bool>());
  CHECK(rep.at("runs")[0].at("fidelity_error").get<double>() < 1e-12);
}

TEST_CASE("compute: corpus run reproduces the oracle everywhere") {
  const auto out =
      run_experiment_config(R"({"command":"compute","corpus":true,"max_tape_len":2})", 0, 1);
  CHECK(out.exit_code == 0);
  const json rep = json::parse(out.payload);
  CHECK(rep.at("passed").get<bool>());
  CHECK(rep.at("runs").size() == 12);  // 3 + 9 tapes
}

TEST_CASE("qma report carries couplings, gaps and the separation") {
  const auto out = run_experiment_config(R"({"command":"qma","M":3})", 0, 1);
  CHECK(out.exit_code == 0);
  const json rep = json::parse(out.payload);
  CHECK(rep.at("passed").get<bool>());
  CHECK(rep.at("schedule_satisfied").get<bool>());
  CHECK(rep.at("lambda_no").get<double>() - rep.at("lambda_yes").get<double>() > 0.5);
  CHECK(rep.at("couplings").contains("j_0"));
}

TEST_CASE("binary: flags and exit codes") {
  if (run_binary("--help") == -1) return;  // binary path not provided
  const std::string good = write_temp("ok.json", R"({"command":"transfer","lengths":[4]})");
  const std::string bad = write_temp("bad.json", R"({"command":"wat"})");
  CHECK(run_binary("--config " + good + " --out /tmp/symham_test_out.csv") == 0);
  CHECK(run_binary("--config " + bad) == 2);
  CHECK(run_binary("--config /tmp/definitely_missing_config.json") == 2);
  std::ifstream out_file("/tmp/symham_test_out.csv");
  CHECK(out_file.good());
}
