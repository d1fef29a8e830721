#include "contrastive/loss.hpp"

#include <cmath>

namespace contrastive {

namespace {

double logsumexp(const Vector& x) {
  const double m = x.maxCoeff();
  double acc = 0.0;
  for (int i = 0; i < x.size(); ++i) acc += std::exp(x(i) - m);
  return m + std::log(acc);
}

void require_square_finite(const Matrix& x) {
  if (x.rows() != x.cols() || x.rows() < 1)
    throw ValidationError("similarity matrix must be square and nonempty");
  if (!x.allFinite()) throw NumericError("similarity matrix has non-finite entries");
}

Matrix gather_columns(const Matrix& m, const Batch& batch) {
  Matrix out(m.rows(), static_cast<Eigen::Index>(batch.size()));
  for (std::size_t t = 0; t < batch.size(); ++t) out.col(static_cast<Eigen::Index>(t)) = m.col(batch[t]);
  return out;
}

Matrix batch_similarity(const EmbeddingPair& emb, const Batch& batch) {
  validate_embedding(emb);
  validate_batch(batch, emb.n(), 1);
  return gather_columns(emb.u, batch).transpose() * gather_columns(emb.v, batch);
}

}  // namespace

double lm_loss(const Matrix& x) {
  require_square_finite(x);
  const int b = static_cast<int>(x.rows());
  double acc = -2.0 * x.trace();
  for (int i = 0; i < b; ++i) acc += logsumexp(x.row(i).transpose()) + logsumexp(x.col(i));
  return acc / b;
}

Matrix lm_gradient(const Matrix& x) {
  require_square_finite(x);
  const int b = static_cast<int>(x.rows());
  Matrix g = -2.0 * Matrix::Identity(b, b);
  for (int i = 0; i < b; ++i) {
    const double mr = x.row(i).maxCoeff();
    double sr = 0.0;
    for (int j = 0; j < b; ++j) sr += std::exp(x(i, j) - mr);
    for (int j = 0; j < b; ++j) g(i, j) += std::exp(x(i, j) - mr) / sr;  // row softmax P
  }
  for (int j = 0; j < b; ++j) {
    const double mc = x.col(j).maxCoeff();
    double sc = 0.0;
    for (int i = 0; i < b; ++i) sc += std::exp(x(i, j) - mc);
    for (int i = 0; i < b; ++i) g(i, j) += std::exp(x(i, j) - mc) / sc;  // column softmax Q
  }
  return g / b;
}

double one_sided_loss(const EmbeddingPair& emb, const Batch& batch) {
  const Matrix x = batch_similarity(emb, batch);
  const int b = static_cast<int>(x.rows());
  double acc = 0.0;
  for (int i = 0; i < b; ++i) acc += logsumexp(x.row(i).transpose()) - x(i, i);
  return acc / b;
}

double contrastive_loss(const EmbeddingPair& emb, const Batch& batch) {
  return lm_loss(batch_similarity(emb, batch));
}

LossBreakdown avg_minibatch_loss(const EmbeddingPair& emb, const BatchCollection& coll) {
  validate_embedding(emb);
  validate_collection(coll, emb.n(), 1);
  LossBreakdown out;
  out.per_batch.reserve(coll.batches.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < coll.batches.size(); ++i) {
    const double loss = contrastive_loss(emb, coll.batches[i]);
    out.per_batch.emplace_back(static_cast<int>(i), loss);
    acc += loss;
  }
  out.total = acc / static_cast<double>(coll.batches.size());
  return out;
}

std::pair<Matrix, Matrix> batch_gradient(const EmbeddingPair& emb, const Batch& batch) {
  validate_embedding(emb);
  validate_batch(batch, emb.n(), 1);
  const Matrix ub = gather_columns(emb.u, batch);
  const Matrix vb = gather_columns(emb.v, batch);
  const Matrix g = lm_gradient(ub.transpose() * vb);
  return {vb * g.transpose(), ub * g};
}

double jensen_lower_bound(const EmbeddingPair& emb, const Batch& batch) {
  validate_embedding(emb);
  validate_batch(batch, emb.n(), 2);
  const int b = static_cast<int>(batch.size());
  double acc = 0.0;
  for (int s = 0; s < b; ++s)
    for (int t = 0; t < b; ++t) {
      if (s == t) continue;
      const int i = batch[static_cast<std::size_t>(s)];
      const int j = batch[static_cast<std::size_t>(t)];
      acc += std::log1p((b - 1) * std::exp(emb.u.col(i).dot(emb.v.col(j) - emb.v.col(i))));
      acc += std::log1p((b - 1) * std::exp(emb.v.col(i).dot(emb.u.col(j) - emb.u.col(i))));
    }
  return acc / (static_cast<double>(b) * (b - 1));
}

double pair_weight(const EmbeddingPair& emb, int k, int l, int b) {
  validate_embedding(emb);
  if (k == l) throw ValidationError("pair_weight: k and l must differ");
  if (k < 0 || l < 0 || k >= emb.n() || l >= emb.n())
    throw ValidationError("pair_weight: index outside [0, n)");
  if (b < 2) throw ValidationError("pair_weight: batch size must be at least 2");
  double acc = 0.0;
  for (const auto& [i, j] : {std::pair<int, int>{k, l}, std::pair<int, int>{l, k}}) {
    acc += std::log1p((b - 1) * std::exp(emb.u.col(i).dot(emb.v.col(j) - emb.v.col(i))));
    acc += std::log1p((b - 1) * std::exp(emb.v.col(i).dot(emb.u.col(j) - emb.u.col(i))));
  }
  return acc;
}

}  // namespace contrastive
