#pragma once

#include <utility>

#include "contrastive/types.hpp"

namespace contrastive {

// Two-sided log-softmax loss of a b-by-b similarity matrix:
// (1/b) * (-2 tr X + sum_i lse(row_i) + sum_i lse(col_i)).
double lm_loss(const Matrix& x);

// Gradient of lm_loss: (1/b) * (-2 I + P + Q), P row-softmax, Q col-softmax.
Matrix lm_gradient(const Matrix& x);

// (1/b) * sum_{i in B} [ lse_{j in B}(u_i' v_j) - u_i' v_i ]. Batches of size 1
// are admitted here (the loss degenerates to 0 for a single element); the
// optimizer-facing contracts require size >= 2.
double one_sided_loss(const EmbeddingPair& emb, const Batch& batch);

// one_sided_loss(U,V) + one_sided_loss(V,U) on the batch = lm_loss(U_B' V_B).
double contrastive_loss(const EmbeddingPair& emb, const Batch& batch);

// Mean of contrastive_loss over the collection, with per-batch terms.
LossBreakdown avg_minibatch_loss(const EmbeddingPair& emb, const BatchCollection& coll);

// (d/dU_B, d/dV_B) of contrastive_loss = (V_B G', U_B G), G = lm_gradient(U_B' V_B).
// Both matrices are batch-local (d rows, one column per batch position);
// columns outside the batch carry zero gradient and are left to the caller.
std::pair<Matrix, Matrix> batch_gradient(const EmbeddingPair& emb, const Batch& batch);

// (1/(b(b-1))) sum_{i != j in B} [ log1p((b-1) e^{u_i'(v_j - v_i)})
//                                 + log1p((b-1) e^{v_i'(u_j - u_i)}) ].
double jensen_lower_bound(const EmbeddingPair& emb, const Batch& batch);

// Edge weight between nodes k != l for intended batch size b: the four
// log1p terms over both orderings (k,l) and (l,k). Symmetric by construction.
double pair_weight(const EmbeddingPair& emb, int k, int l, int b);

}  // namespace contrastive
