// Batch front-end: experiment configs in, tables and plot data out.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "symham/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"symmetric computing-Hamiltonian laboratory"};

  std::string config_path;
  std::string out_path;
  std::uint64_t seed = 0;
  int threads = 1;
  app.add_option("--config", config_path, "experiment config (JSON)")->required();
  app.add_option("--seed", seed, "seed for randomized probes");
  app.add_option("--out", out_path, "output path (default: stdout)");
  app.add_option("--threads", threads, "parallel sweep width")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "config error: cannot open " << config_path << "\n";
    return 2;
  }
  std::stringstream buffer;
  buffer << in.rdbuf();

  const auto outcome = symham::cli::run_experiment_config(buffer.str(), seed, threads);
  if (!outcome.error.empty()) std::cerr << outcome.error << "\n";
  if (!outcome.payload.empty()) {
    if (out_path.empty()) {
      std::cout << outcome.payload;
      if (outcome.payload.back() != '\n') std::cout << '\n';
    } else {
      std::ofstream out(out_path);
      if (!out) {
        std::cerr << "config error: cannot write " << out_path << "\n";
        return 2;
      }
      out << outcome.payload;
    }
  }
  return outcome.exit_code;
}
