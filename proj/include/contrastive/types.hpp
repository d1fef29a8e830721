#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "contrastive/errors.hpp"
#include "contrastive/rng.hpp"

namespace contrastive {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Paired embedding matrices: d rows, n unit-norm columns each.
struct EmbeddingPair {
  Matrix u;
  Matrix v;

  int n() const { return static_cast<int>(u.cols()); }
  int d() const { return static_cast<int>(u.rows()); }
};

// Ascending list of distinct indices in [0, n).
using Batch = std::vector<int>;

enum class CollectionKind { Partition, General };

struct BatchCollection {
  std::vector<Batch> batches;
  CollectionKind kind = CollectionKind::General;
};

struct LossBreakdown {
  double total = 0.0;
  std::vector<std::pair<int, double>> per_batch;  // (position in collection, loss)
};

// Shape agreement, finiteness, unit columns within 1e-9.
void validate_embedding(const EmbeddingPair& emb);

// Distinct ascending indices in [0, n); size at least min_size.
void validate_batch(const Batch& batch, int n, int min_size = 2);

// Every batch valid and of one common size; Partition kind must tile [0, n).
void validate_collection(const BatchCollection& coll, int n, int min_size = 2);

// Column-wise normalization; rejects degenerate or non-finite columns.
Matrix normalized_columns(const Matrix& m);

// I.i.d. standard normal entries, then column normalization. Fills u first,
// then v, column-major.
EmbeddingPair random_embedding(int n, int d, Rng& rng);

Batch full_batch(int n);

}  // namespace contrastive
