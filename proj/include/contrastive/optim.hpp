#pragma once

#include <cstdint>
#include <vector>

#include "contrastive/types.hpp"

namespace contrastive {

enum class Variant {
  FullBatchGD,
  AllNcBGD,
  SubsetGD,
  SGDWithReplacement,
  SGDWithoutReplacement,
  OSGD,
  OSGDWithoutReplacement,
};

struct OptimizerConfig {
  Variant variant = Variant::FullBatchGD;
  std::vector<double> eta{0.5};  // constant (length 1) or per-step (length == steps)
  int steps = 500;
  std::uint64_t seed = 0;
  int b = 2;  // mini-batch size
  int k = 1;  // batches scanned per step (SGD/OSGD variants)
  int q = 1;  // top-loss batches kept (OSGD variants), q <= k
  std::uint64_t enumeration_cap = 1000000;

  bool operator==(const OptimizerConfig&) const = default;
};

struct TraceRecord {
  long step = 0;  // 1-based count of updates applied
  double full_loss = 0.0;
  double oracle_dist = 0.0;  // -1 when no closed-form reference applies
  std::vector<Batch> selected_batches;
};

struct RunTrace {
  std::vector<TraceRecord> records;
};

// C(n, b) size-b subsets of [0, n) in lexicographic order; refuses with the
// exact count named when it exceeds the cap.
BatchCollection enumerate_batches(int n, int b, std::uint64_t cap = 1000000);

// C(n, k), saturating at UINT64_MAX.
std::uint64_t count_combinations(std::uint64_t n, std::uint64_t k);

// column-normalize(emb - eta * mean over coll of scattered batch gradients).
// eta = 0 returns the input unchanged.
EmbeddingPair gd_step(const EmbeddingPair& emb, const BatchCollection& coll, double eta);

// Runs cfg.steps projected-gradient updates of the selected variant from
// init; `subset` is required exactly for SubsetGD. Records, after every
// update: the full-batch loss, the distance to the applicable closed-form
// reference (simplex configuration when n <= d+1, antipodal configuration
// when n = 2d, else -1), and the batches stepped on. final_out, when given,
// receives the final embedding state.
RunTrace run_optimizer(const EmbeddingPair& init, const OptimizerConfig& cfg,
                       const BatchCollection* subset = nullptr,
                       EmbeddingPair* final_out = nullptr);

// gamma_j = sum_{l=0}^{q-1} C(j-1, l) C(m-j, k-l-1) / C(m, k), j = 1..m.
// Exact 128-bit integer arithmetic when the binomials fit (covers every
// m <= 61); log-gamma evaluation beyond that.
std::vector<double> gamma_weights(int m, int k, int q);

// Exact integer identity sum_j numerator(gamma_j) == q * C(m, k), verified in
// 128-bit arithmetic; false also when the binomials overflow 128 bits.
bool gamma_sum_identity_exact(int m, int k, int q);

// (1/q) sum_j gamma_j * loss(j-th largest batch loss), losses sorted
// descending with ties broken toward the lexicographically smaller batch.
double weighted_osgd_loss(const EmbeddingPair& emb, int b, int k, int q,
                          std::uint64_t cap = 1000000);

// Positions of the q largest losses, ties toward the lexicographically
// smaller batch; result ordered by batch id so downstream reductions are
// independent of the evaluation order.
std::vector<int> top_q_batches(const std::vector<Batch>& batches,
                               const std::vector<double>& losses, int q);

}  // namespace contrastive
