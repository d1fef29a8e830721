#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "contrastive/optim.hpp"

namespace contrastive {

enum class ExperimentKind { Synthetic, Toy, SelectBatches, Histogram, Verify };
enum class SubsetSpec { AllNcB, FullBatch, Partition, ExplicitList };
enum class SelectorKind { Random, SC, ChunkedSC };

struct ToyParams {
  double epsilon = 0.05;
  double eta = 0.1;
  double rho = 0.05;
  long max_steps = 5000;

  bool operator==(const ToyParams&) const = default;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Synthetic;
  int n = 8;
  int d = 16;
  int b = 2;
  std::vector<std::uint64_t> seeds{1};
  std::string output_dir = "out";
  OptimizerConfig optimizer;  // optimizer.seed is derived per run seed, not configured
  SubsetSpec subset_spec = SubsetSpec::Partition;  // consulted only for SubsetGD
  std::vector<Batch> explicit_batches;             // 0-based internally; 1-based in files
  SelectorKind selector = SelectorKind::SC;
  int chunk_k = 1;
  ToyParams toy;
  int histogram_bins = 10;

  bool operator==(const ExperimentConfig&) const = default;
};

// Parses the sectioned key = value format ('#' starts a comment); unknown
// sections or keys are rejected.
ExperimentConfig parse_config_text(const std::string& text);

ExperimentConfig load_config(const std::string& path);

// Canonical form whose re-parse compares equal to the input structure.
std::string serialize_config(const ExperimentConfig& cfg);

// FNV-1a 64 over the canonical serialization.
std::uint64_t config_hash(const ExperimentConfig& cfg);

// Structural checks shared by the CLI entry points (positive sizes, seed
// list nonempty, explicit batch lists consistent with n and b, q <= k).
void validate_config(const ExperimentConfig& cfg);

}  // namespace contrastive
