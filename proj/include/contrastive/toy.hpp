#pragma once

#include <array>
#include <optional>

#include "contrastive/optim.hpp"

namespace contrastive {

// Four planar unit embeddings parametrized by angles; v is tied to u.
struct ToyState {
  std::array<double, 4> theta{};
  double epsilon = 0.0;  // common initialization angle
};

enum class ToyVariant { OSGD, SGD, AllBatchGD };

struct ToyRun {
  RunTrace trace;
  std::optional<long> hit_time;  // first step with every theta in (pi/4 - rho, pi/4)
};

// u0 = ( cos t0,  sin t0), u1 = ( cos t1, -sin t1),
// u2 = (-cos t2, -sin t2), u3 = (-cos t3,  sin t3); v = u.
EmbeddingPair toy_embeddings(const ToyState& s);

// contrastive_loss of toy_embeddings restricted to a size-2 batch:
// -2 + 2 log(e + e^{u_i' u_j}).
double toy_batch_loss(const ToyState& s, const Batch& batch);

// Analytic d(batch loss)/d(theta); zero outside the batch.
std::array<double, 4> toy_theta_gradient(const ToyState& s, const Batch& batch);

// theta <- theta - eta * gradient; every angle must stay inside (0, pi/2).
ToyState toy_step(const ToyState& s, const Batch& batch, double eta);

// The six size-2 batches of {0..3} in lexicographic order.
const std::vector<Batch>& toy_batches();

// OSGD steps the argmax-loss batch (ties toward the lower batch id), SGD a
// uniformly random batch, AllBatchGD the average of all six gradients. The
// trace records the full-batch loss after every update. stop_at_hit ends the
// run once the hit window is first reached (used by timing studies).
ToyRun run_toy(ToyVariant variant, double epsilon, double eta, double rho,
               std::uint64_t seed, long max_steps, bool stop_at_hit = false);

}  // namespace contrastive
