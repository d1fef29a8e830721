#include "contrastive/toy.hpp"

#include <cmath>
#include <numbers>

#include "contrastive/geometry.hpp"
#include "contrastive/loss.hpp"
#include "contrastive/rng.hpp"

namespace contrastive {

namespace {

// Coordinate signs of u_i = (sx_i cos t_i, sy_i sin t_i).
constexpr double kSX[4] = {1.0, 1.0, -1.0, -1.0};
constexpr double kSY[4] = {1.0, -1.0, -1.0, 1.0};

void check_toy_batch(const Batch& batch) {
  validate_batch(batch, 4, 2);
  if (batch.size() != 2) throw ValidationError("toy batch must have exactly 2 members");
}

void check_theta_range(const std::array<double, 4>& theta) {
  for (double t : theta)
    if (!(t > 0.0 && t < std::numbers::pi / 2.0))
      throw NumericError("toy angle left the open interval (0, pi/2)");
}

}  // namespace

const std::vector<Batch>& toy_batches() {
  static const std::vector<Batch> batches = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  return batches;
}

EmbeddingPair toy_embeddings(const ToyState& s) {
  Matrix u(2, 4);
  for (int i = 0; i < 4; ++i) {
    u(0, i) = kSX[i] * std::cos(s.theta[static_cast<std::size_t>(i)]);
    u(1, i) = kSY[i] * std::sin(s.theta[static_cast<std::size_t>(i)]);
  }
  return {u, u};
}

double toy_batch_loss(const ToyState& s, const Batch& batch) {
  check_toy_batch(batch);
  return contrastive_loss(toy_embeddings(s), batch);
}

std::array<double, 4> toy_theta_gradient(const ToyState& s, const Batch& batch) {
  check_toy_batch(batch);
  const int i = batch[0];
  const int j = batch[1];
  const EmbeddingPair emb = toy_embeddings(s);
  const double c = emb.u.col(i).dot(emb.u.col(j));
  // d/dc of (-2 + 2 log(e + e^c)).
  const double w = 2.0 / (1.0 + std::exp(1.0 - c));
  const double ti = s.theta[static_cast<std::size_t>(i)];
  const double tj = s.theta[static_cast<std::size_t>(j)];
  const Eigen::Vector2d dui(-kSX[i] * std::sin(ti), kSY[i] * std::cos(ti));
  const Eigen::Vector2d duj(-kSX[j] * std::sin(tj), kSY[j] * std::cos(tj));
  std::array<double, 4> g{0.0, 0.0, 0.0, 0.0};
  g[static_cast<std::size_t>(i)] = w * dui.dot(emb.u.col(j));
  g[static_cast<std::size_t>(j)] = w * emb.u.col(i).dot(duj);
  return g;
}

ToyState toy_step(const ToyState& s, const Batch& batch, double eta) {
  const std::array<double, 4> g = toy_theta_gradient(s, batch);
  ToyState out = s;
  for (int a : batch) out.theta[static_cast<std::size_t>(a)] -= eta * g[static_cast<std::size_t>(a)];
  check_theta_range(out.theta);
  return out;
}

ToyRun run_toy(ToyVariant variant, double epsilon, double eta, double rho, std::uint64_t seed,
               long max_steps, bool stop_at_hit) {
  if (!(epsilon > 0.0) || !(epsilon < std::numbers::pi / 4.0))
    throw ValidationError("run_toy: epsilon must lie in (0, pi/4)");
  if (!(rho > 0.0) || !(rho < std::numbers::pi / 4.0 - epsilon))
    throw ValidationError("run_toy: rho must lie in (0, pi/4 - epsilon)");
  if (!std::isfinite(eta) || eta <= 0.0) throw ValidationError("run_toy: eta must be positive");
  if (max_steps < 1) throw ValidationError("run_toy: max_steps must be positive");

  ToyState s{{epsilon, epsilon, epsilon, epsilon}, epsilon};
  const auto& batches = toy_batches();
  const EmbeddingPair reference = make_cross_polytope(2);
  const Batch full = full_batch(4);
  const double hi = std::numbers::pi / 4.0;
  const double lo = hi - rho;
  Rng rng(seed);

  ToyRun out;
  out.trace.records.reserve(static_cast<std::size_t>(std::min<long>(max_steps, 65536)));
  for (long t = 0; t < max_steps; ++t) {
    std::vector<Batch> selected;
    if (variant == ToyVariant::OSGD) {
      int best = 0;
      double best_loss = toy_batch_loss(s, batches[0]);
      for (int i = 1; i < 6; ++i) {
        const double loss = toy_batch_loss(s, batches[static_cast<std::size_t>(i)]);
        if (loss > best_loss) {
          best_loss = loss;
          best = i;
        }
      }
      s = toy_step(s, batches[static_cast<std::size_t>(best)], eta);
      selected = {batches[static_cast<std::size_t>(best)]};
    } else if (variant == ToyVariant::SGD) {
      const int id = static_cast<int>(rng.below(6));
      s = toy_step(s, batches[static_cast<std::size_t>(id)], eta);
      selected = {batches[static_cast<std::size_t>(id)]};
    } else {
      std::array<double, 4> acc{0.0, 0.0, 0.0, 0.0};
      for (const Batch& batch : batches) {
        const std::array<double, 4> g = toy_theta_gradient(s, batch);
        for (int a = 0; a < 4; ++a) acc[static_cast<std::size_t>(a)] += g[static_cast<std::size_t>(a)];
      }
      for (int a = 0; a < 4; ++a)
        s.theta[static_cast<std::size_t>(a)] -= eta * acc[static_cast<std::size_t>(a)] / 6.0;
      check_theta_range(s.theta);
      selected = batches;
    }

    const EmbeddingPair emb = toy_embeddings(s);
    TraceRecord rec;
    rec.step = t + 1;
    rec.full_loss = contrastive_loss(emb, full);
    rec.oracle_dist = oracle_distance(emb, reference);
    rec.selected_batches = std::move(selected);
    out.trace.records.push_back(std::move(rec));

    if (!out.hit_time) {
      bool inside = true;
      for (double th : s.theta) inside = inside && th > lo && th < hi;
      if (inside) {
        out.hit_time = t + 1;
        if (stop_at_hit) break;
      }
    }
  }
  return out;
}

}  // namespace contrastive
