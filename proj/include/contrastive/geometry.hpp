#pragma once

#include <optional>

#include "contrastive/types.hpp"

namespace contrastive {

enum class OracleKind { SimplexETF, CrossPolytope };

// U = V with unit columns and pairwise inner products -1/(n-1), built by
// centering the n basis directions, reflecting the common normal onto the
// last axis, rescaling to unit norm, and zero-padding to d dimensions.
// Requires 2 <= n <= d+1.
EmbeddingPair make_simplex_etf(int n, int d);

// U = V = [e_1 .. e_d, -e_1 .. -e_d]; n = 2d columns.
EmbeddingPair make_cross_polytope(int d);

// g(i,j) = u_i' v_j.
Matrix gram(const EmbeddingPair& emb);

// Frobenius norm of gram(emb) - gram(oracle); rotation-invariant.
double oracle_distance(const EmbeddingPair& emb, const EmbeddingPair& oracle);

// SimplexETF when n <= d+1, max|g - target| <= tol and max|U-V| <= tol;
// CrossPolytope when n = 2d and the gram matches the antipodal pattern under
// the greedy most-negative-per-row pairing within tol; otherwise nothing.
std::optional<OracleKind> classify_configuration(const EmbeddingPair& emb, double tol = 0.05);

}  // namespace contrastive
