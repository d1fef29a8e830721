#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "contrastive/types.hpp"

namespace contrastive {

// Symmetric, zero-diagonal, nonnegative edge weights.
struct AffinityGraph {
  Matrix a;
  int n() const { return static_cast<int>(a.rows()); }
};

struct SpectralEmbedding {
  Matrix rows;                      // N x k; row i = spectral coordinates of node i
  std::vector<double> eigenvalues;  // ascending
};

// a(i,j) = pair_weight(emb, i, j, b) for i != j, zero diagonal; both triangle
// entries are written from one evaluation so symmetry is exact.
AffinityGraph build_affinity(const EmbeddingPair& emb, int b);

// L = D - A with D the diagonal of row sums.
Matrix laplacian(const AffinityGraph& a);

// k eigenpairs with the smallest eigenvalues via a deterministic cyclic
// Jacobi rotation scheme; rejects input that is not symmetric within 1e-9.
SpectralEmbedding symmetric_eigs(const Matrix& m, int k);

// k-means++ seeding from `seed`, then Lloyd iterations to a label fixpoint
// (at most 300); empty clusters are reseeded from the farthest point.
// wcss_out, when given, receives the objective after every iteration.
std::pair<std::vector<int>, Matrix> kmeans(const Matrix& points, int k, std::uint64_t seed,
                                           std::vector<double>* wcss_out = nullptr);

// Minimum-cost assignment of N points to N center slots (b slots per center,
// cost = Euclidean point-to-center distance) via the Hungarian algorithm.
BatchCollection balanced_assign(const Matrix& points, const Matrix& centers, int b);

// build_affinity -> laplacian -> symmetric_eigs(N/b) -> row-normalize ->
// kmeans -> balanced_assign.
BatchCollection sc_select(const EmbeddingPair& emb, int b, std::uint64_t seed);

// Exhaustive maximizer of total within-batch weight over balanced partitions
// (at most 1e5 of them); first partition in canonical lexicographic order
// wins ties.
BatchCollection brute_force_min_cut(const AffinityGraph& a, int b);

// Shuffles [0, N) into chunks of chunk_k*b indices (stream derive(seed, 0)),
// runs sc_select per chunk (chunk c uses derive(seed, 1+c)), concatenates.
// A single chunk delegates to sc_select(emb, b, seed) verbatim.
BatchCollection chunked_sc_select(const EmbeddingPair& emb, int b, int chunk_k,
                                  std::uint64_t seed);

// Equal-width histogram of per-batch contrastive losses over [min, max];
// a degenerate range puts everything in bin 0.
std::vector<std::pair<double, long>> batch_loss_histogram(const EmbeddingPair& emb,
                                                          const BatchCollection& coll,
                                                          int bins);

// Sum of a(i,j) over unordered within-batch pairs.
double within_batch_weight(const AffinityGraph& a, const BatchCollection& coll);

// Uniformly random balanced partition: shuffled indices cut into blocks of b.
BatchCollection random_partition(int n, int b, Rng& rng);

}  // namespace contrastive
