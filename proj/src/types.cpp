#include "contrastive/types.hpp"

#include <cmath>
#include <string>

namespace contrastive {

void validate_embedding(const EmbeddingPair& emb) {
  if (emb.u.rows() < 1 || emb.u.cols() < 1)
    throw ValidationError("embedding: u must be a nonempty d x n matrix");
  if (emb.u.rows() != emb.v.rows() || emb.u.cols() != emb.v.cols())
    throw ValidationError("embedding: u and v must have identical shape");
  if (!emb.u.allFinite() || !emb.v.allFinite())
    throw NumericError("embedding: non-finite entry");
  for (int j = 0; j < emb.n(); ++j) {
    if (std::abs(emb.u.col(j).norm() - 1.0) > 1e-9)
      throw ValidationError("embedding: u column " + std::to_string(j) + " is not unit norm");
    if (std::abs(emb.v.col(j).norm() - 1.0) > 1e-9)
      throw ValidationError("embedding: v column " + std::to_string(j) + " is not unit norm");
  }
}

void validate_batch(const Batch& batch, int n, int min_size) {
  if (static_cast<int>(batch.size()) < min_size)
    throw ValidationError("batch: size " + std::to_string(batch.size()) + " below minimum " +
                          std::to_string(min_size));
  if (static_cast<int>(batch.size()) > n)
    throw ValidationError("batch: size exceeds n = " + std::to_string(n));
  int prev = -1;
  for (int i : batch) {
    if (i < 0 || i >= n)
      throw ValidationError("batch: index " + std::to_string(i) + " outside [0, " +
                            std::to_string(n) + ")");
    if (i <= prev) throw ValidationError("batch: indices must be distinct and ascending");
    prev = i;
  }
}

void validate_collection(const BatchCollection& coll, int n, int min_size) {
  if (coll.batches.empty()) throw ValidationError("batch collection: empty");
  const std::size_t b = coll.batches.front().size();
  for (const Batch& batch : coll.batches) {
    validate_batch(batch, n, min_size);
    if (batch.size() != b)
      throw ValidationError("batch collection: batches must share one size");
  }
  if (coll.kind == CollectionKind::Partition) {
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    for (const Batch& batch : coll.batches)
      for (int i : batch) {
        if (seen[static_cast<std::size_t>(i)])
          throw ValidationError("partition: index " + std::to_string(i) + " appears twice");
        seen[static_cast<std::size_t>(i)] = 1;
      }
    for (int i = 0; i < n; ++i)
      if (!seen[static_cast<std::size_t>(i)])
        throw ValidationError("partition: index " + std::to_string(i) + " missing");
  }
}

Matrix normalized_columns(const Matrix& m) {
  Matrix out = m;
  for (int j = 0; j < out.cols(); ++j) {
    const double norm = out.col(j).norm();
    if (!std::isfinite(norm) || norm < 1e-12)
      throw NumericError("normalization: degenerate column " + std::to_string(j));
    out.col(j) /= norm;
  }
  return out;
}

EmbeddingPair random_embedding(int n, int d, Rng& rng) {
  if (n < 1 || d < 1) throw ValidationError("random_embedding: n and d must be positive");
  Matrix u(d, n), v(d, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < d; ++i) u(i, j) = rng.normal();
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < d; ++i) v(i, j) = rng.normal();
  return {normalized_columns(u), normalized_columns(v)};
}

Batch full_batch(int n) {
  Batch b(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) b[static_cast<std::size_t>(i)] = i;
  return b;
}

}  // namespace contrastive
