#pragma once

#include <cstdint>
#include <string>

namespace symham {
namespace cli {

// Exit contract: 0 = all checks passed, 1 = a physics check failed,
// 2 = config/schema error.
struct ExperimentOutcome {
  int exit_code = 0;
  std::string payload;  // CSV or JSON, written to --out by the frontend
  std::string error;    // diagnostic for stderr
};

// Dispatches on config["command"]: "transfer", "verify", "compute", "qma".
// Deterministic for fixed (config, seed, threads).
ExperimentOutcome run_experiment_config(const std::string& config_text, std::uint64_t seed,
                                        int threads);

}  // namespace cli
}  // namespace symham
