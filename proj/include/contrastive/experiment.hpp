#pragma once

#include "contrastive/config.hpp"

namespace contrastive {

// Executes the configured experiment for every seed, writing all artifacts
// under cfg.output_dir/seed_<s>/. Returns the process exit status: 0 ok,
// 1 validation failure, 2 numeric failure, 3 I/O failure; failures print a
// one-line diagnostic to stderr.
int run_experiment(const ExperimentConfig& cfg, bool quiet = false);

// Headless property battery (the `verify` subcommand); prints one line per
// check, returns 0 when every check passes.
int run_verify(bool quiet = false);

}  // namespace contrastive
