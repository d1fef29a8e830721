#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>

#include "contrastive/geometry.hpp"
#include "contrastive/loss.hpp"
#include "contrastive/toy.hpp"

using namespace contrastive;

namespace {

ToyState symmetric_state(double eps) { return {{eps, eps, eps, eps}, eps}; }

constexpr double kPi = std::numbers::pi;

}  // namespace

TEST_CASE("planar embeddings are unit norm and hit the antipodal reference at pi/4") {
  const ToyState quarter = symmetric_state(kPi / 4.0);
  CHECK(oracle_distance(toy_embeddings(quarter), make_cross_polytope(2)) < 1e-12);

  const ToyState odd = {{0.3, 0.9, 0.2, 1.1}, 0.3};
  const EmbeddingPair emb = toy_embeddings(odd);
  for (int j = 0; j < 4; ++j) CHECK(std::abs(emb.u.col(j).norm() - 1.0) < 1e-15);
  CHECK(emb.u == emb.v);

  const double eps = 0.17;
  const EmbeddingPair sym = toy_embeddings(symmetric_state(eps));
  CHECK(sym.u.col(0).dot(sym.u.col(1)) == doctest::Approx(std::cos(2.0 * eps)).epsilon(1e-14));
}

TEST_CASE("batch losses match the three closed-form classes") {
  const ToyState s = symmetric_state(0.1);
  const double adjacent = -2.0 + 2.0 * std::log(std::exp(1.0) + std::exp(std::cos(0.2)));
  CHECK(toy_batch_loss(s, {0, 1}) == doctest::Approx(adjacent).epsilon(1e-12));
  CHECK(std::abs(toy_batch_loss(s, {0, 1}) - 1.3664603) < 1e-5);

  const double antipodal = -2.0 + 2.0 * std::log(std::exp(1.0) + std::exp(-1.0));
  CHECK(toy_batch_loss(s, {0, 2}) == doctest::Approx(antipodal).epsilon(1e-12));
  CHECK(std::abs(toy_batch_loss(s, {0, 2}) - 0.2538560) < 1e-5);
  CHECK(toy_batch_loss(symmetric_state(0.3), {0, 2}) ==
        doctest::Approx(toy_batch_loss(symmetric_state(0.05), {0, 2})).epsilon(1e-14));

  const double obtuse = -2.0 + 2.0 * std::log(std::exp(1.0) + std::exp(-std::cos(0.2)));
  CHECK(toy_batch_loss(s, {0, 3}) == doctest::Approx(obtuse).epsilon(1e-12));

  for (double eps : {0.02, 0.1, 0.2, 0.3, 0.39}) {
    const ToyState t = symmetric_state(eps);
    CHECK(toy_batch_loss(t, {0, 1}) > toy_batch_loss(t, {0, 3}));
    CHECK(toy_batch_loss(t, {0, 3}) > toy_batch_loss(t, {0, 2}));
  }

  CHECK_THROWS_AS(toy_batch_loss(s, {0, 1, 2}), ValidationError);
  CHECK_THROWS_AS(toy_batch_loss(s, {0, 4}), ValidationError);
}

TEST_CASE("adjacent-batch step drifts by eta times the one-parameter rate") {
  const ToyState s = symmetric_state(0.1);
  const ToyState next = toy_step(s, {0, 1}, 0.1);
  // g(phi) = 2 sin(2 phi) / (1 + e^{1 - cos(2 phi)})
  const double g = 2.0 * std::sin(0.2) / (1.0 + std::exp(1.0 - std::cos(0.2)));
  CHECK(next.theta[0] == doctest::Approx(0.1 + 0.1 * g).epsilon(1e-12));
  CHECK(next.theta[1] == doctest::Approx(0.1 + 0.1 * g).epsilon(1e-12));
  CHECK(next.theta[2] == 0.1);
  CHECK(next.theta[3] == 0.1);
}

TEST_CASE("antipodal-batch step barely moves near the symmetric start") {
  for (double eps : {0.02, 0.05, 0.1}) {
    const ToyState s = symmetric_state(eps);
    const ToyState next = toy_step(s, {0, 2}, 0.1);
    for (int i = 0; i < 4; ++i)
      CHECK(std::abs(next.theta[static_cast<std::size_t>(i)] -
                     s.theta[static_cast<std::size_t>(i)]) < 1e-2);
  }
}

TEST_CASE("angle gradient matches central differences on the full grid") {
  const std::array<double, 4> grid = {0.05, 0.2, 0.5, 0.7};
  const double h = 1e-5;
  for (double t0 : grid)
    for (double t1 : grid)
      for (double t2 : grid)
        for (double t3 : grid) {
          const ToyState s = {{t0, t1, t2, t3}, 0.0};
          for (const Batch& batch : toy_batches()) {
            const std::array<double, 4> g = toy_theta_gradient(s, batch);
            for (int p = 0; p < 4; ++p) {
              ToyState sp = s, sm = s;
              sp.theta[static_cast<std::size_t>(p)] += h;
              sm.theta[static_cast<std::size_t>(p)] -= h;
              const double fd =
                  (toy_batch_loss(sp, batch) - toy_batch_loss(sm, batch)) / (2.0 * h);
              REQUIRE(std::abs(g[static_cast<std::size_t>(p)] - fd) < 1e-6);
            }
          }
        }
}

TEST_CASE("ordered selection alternates between the two adjacent batches") {
  const ToyRun run = run_toy(ToyVariant::OSGD, 0.05, 0.1, 0.05, 1, 40);
  REQUIRE(run.trace.records.size() >= 10);
  for (int t = 0; t < 10; ++t) {
    const auto& sel = run.trace.records[static_cast<std::size_t>(t)].selected_batches;
    REQUIRE(sel.size() == 1);
    CHECK(sel[0] == (t % 2 == 0 ? Batch{0, 1} : Batch{2, 3}));
  }
}

TEST_CASE("all variants approach the antipodal loss level") {
  const double target = -2.0 + 2.0 * std::log(std::exp(1.0) + std::exp(-1.0) + 2.0);
  for (ToyVariant variant : {ToyVariant::OSGD, ToyVariant::SGD, ToyVariant::AllBatchGD}) {
    const ToyRun run = run_toy(variant, 0.05, 0.1, 0.05, 7, 5000);
    bool converged = false;
    for (const TraceRecord& rec : run.trace.records)
      converged = converged || std::abs(rec.full_loss - target) <= 0.01;
    CHECK(converged);
  }
}

TEST_CASE("runs are deterministic given the seed") {
  const ToyRun a = run_toy(ToyVariant::SGD, 0.05, 0.1, 0.05, 11, 500);
  const ToyRun b = run_toy(ToyVariant::SGD, 0.05, 0.1, 0.05, 11, 500);
  REQUIRE(a.trace.records.size() == b.trace.records.size());
  for (std::size_t t = 0; t < a.trace.records.size(); ++t) {
    CHECK(a.trace.records[t].full_loss == b.trace.records[t].full_loss);
    CHECK(a.trace.records[t].selected_batches == b.trace.records[t].selected_batches);
  }
  CHECK(a.hit_time == b.hit_time);
}

TEST_CASE("hit time is recorded once all angles enter the window") {
  const ToyRun run = run_toy(ToyVariant::OSGD, 0.05, 0.1, 0.2, 1, 2000);
  REQUIRE(run.hit_time.has_value());
  CHECK(*run.hit_time >= 1);

  const ToyRun stopped = run_toy(ToyVariant::OSGD, 0.05, 0.1, 0.2, 1, 2000, true);
  REQUIRE(stopped.hit_time.has_value());
  CHECK(*stopped.hit_time == *run.hit_time);
  CHECK(static_cast<long>(stopped.trace.records.size()) == *stopped.hit_time);

  const ToyRun missed = run_toy(ToyVariant::SGD, 0.05, 0.1, 0.05, 2, 3);
  CHECK(!missed.hit_time.has_value());
}

TEST_CASE("run parameters are validated") {
  CHECK_THROWS_AS(run_toy(ToyVariant::OSGD, 0.0, 0.1, 0.05, 1, 10), ValidationError);
  CHECK_THROWS_AS(run_toy(ToyVariant::OSGD, kPi / 4.0, 0.1, 0.05, 1, 10), ValidationError);
  CHECK_THROWS_AS(run_toy(ToyVariant::OSGD, 0.05, 0.1, kPi / 4.0, 1, 10), ValidationError);
  CHECK_THROWS_AS(run_toy(ToyVariant::OSGD, 0.05, -0.1, 0.05, 1, 10), ValidationError);
  CHECK_THROWS_AS(run_toy(ToyVariant::OSGD, 0.05, 0.1, 0.05, 1, 0), ValidationError);
}
