#include <doctest.h>

#include <cmath>

#include "contrastive/geometry.hpp"
#include "contrastive/loss.hpp"
#include "contrastive/optim.hpp"
#include "contrastive/rng.hpp"

using namespace contrastive;

TEST_CASE("simplex construction hits the target inner products") {
  const EmbeddingPair e32 = make_simplex_etf(3, 2);
  const Matrix g32 = gram(e32);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(std::abs(g32(i, j) - (i == j ? 1.0 : -0.5)) < 1e-12);

  const Matrix g816 = gram(make_simplex_etf(8, 16));
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      CHECK(std::abs(g816(i, j) - (i == j ? 1.0 : -1.0 / 7.0)) < 1e-12);

  const EmbeddingPair e21 = make_simplex_etf(2, 1);
  CHECK((e21.u.col(0) + e21.u.col(1)).norm() < 1e-12);
}

TEST_CASE("simplex construction satisfies its definition across the size sweep") {
  for (int dp1 = 2; dp1 <= 65; ++dp1)
    for (int n = 2; n <= dp1; ++n) {
      const EmbeddingPair e = make_simplex_etf(n, dp1 - 1);
      const Matrix g = gram(e);
      const double target = -1.0 / (n - 1);
      double dev = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          dev = std::max(dev, std::abs(g(i, j) - (i == j ? 1.0 : target)));
      REQUIRE(dev < 1e-9);
      REQUIRE((e.u - e.v).norm() == 0.0);
    }
}

TEST_CASE("simplex construction rejects infeasible sizes") {
  CHECK_THROWS_AS(make_simplex_etf(5, 3), ValidationError);
  CHECK_THROWS_AS(make_simplex_etf(1, 4), ValidationError);
}

TEST_CASE("antipodal construction satisfies all pairing conditions exactly") {
  const EmbeddingPair cp = make_cross_polytope(2);
  CHECK(cp.u.col(0) == Vector(Eigen::Vector2d(1, 0)));
  CHECK(cp.u.col(1) == Vector(Eigen::Vector2d(0, 1)));
  CHECK(cp.u.col(2) == Vector(Eigen::Vector2d(-1, 0)));
  CHECK(cp.u.col(3) == Vector(Eigen::Vector2d(0, -1)));

  for (int d : {1, 2, 3, 5, 8}) {
    const EmbeddingPair e = make_cross_polytope(d);
    const Matrix g = gram(e);
    const int n = 2 * d;
    for (int i = 0; i < n; ++i) {
      CHECK(g.row(i).sum() == 0.0);
      int negs = 0;
      for (int j = 0; j < n; ++j) {
        if (i == j) {
          CHECK(g(i, j) == 1.0);
        } else if (g(i, j) == -1.0) {
          ++negs;
        } else {
          CHECK(g(i, j) == 0.0);
        }
      }
      CHECK(negs == 1);
    }
  }

  const double cp_loss = -2.0 + 2.0 * std::log(std::exp(1.0) + std::exp(-1.0) + 2.0);
  CHECK(contrastive_loss(make_cross_polytope(2), full_batch(4)) ==
        doctest::Approx(cp_loss).epsilon(1e-12));
  CHECK(std::abs(contrastive_loss(make_cross_polytope(2), full_batch(4)) - 1.253) < 1e-3);

  CHECK_THROWS_AS(make_cross_polytope(0), ValidationError);
}

TEST_CASE("gram matrix basics") {
  EmbeddingPair basis;
  basis.u = Matrix::Identity(3, 3);
  basis.v = basis.u;
  CHECK(gram(basis) == Matrix::Identity(3, 3));

  const Matrix g = gram(make_simplex_etf(4, 8));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(std::abs(g(i, j) - (i == j ? 1.0 : -1.0 / 3.0)) < 1e-12);

  const Matrix gcp = gram(make_cross_polytope(4));
  Matrix want(8, 8);
  want << Matrix::Identity(4, 4), -Matrix::Identity(4, 4),
          -Matrix::Identity(4, 4), Matrix::Identity(4, 4);
  CHECK(gcp == want);
}

TEST_CASE("distance between configurations") {
  const EmbeddingPair etf = make_simplex_etf(5, 6);
  CHECK(oracle_distance(etf, etf) == 0.0);

  // A single differing gram entry contributes exactly itself.
  EmbeddingPair a, b;
  a.u = Matrix::Zero(2, 1);
  a.u(0, 0) = 1.0;
  a.v = a.u;
  b.u = a.u;
  b.v = Matrix::Zero(2, 1);
  b.v(0, 0) = 0.5;
  b.v(1, 0) = std::sqrt(0.75);
  CHECK(oracle_distance(a, b) == doctest::Approx(0.5).epsilon(1e-12));

  Rng rng(7);
  const EmbeddingPair x = random_embedding(6, 4, rng);
  const EmbeddingPair y = random_embedding(6, 4, rng);
  CHECK(oracle_distance(x, y) == doctest::Approx(oracle_distance(y, x)).epsilon(1e-15));
  CHECK(oracle_distance(x, y) >= 0.0);

  const EmbeddingPair oracle = make_simplex_etf(8, 16);
  for (std::uint64_t s = 1; s <= 5; ++s) {
    Rng r(s);
    CHECK(oracle_distance(random_embedding(8, 16, r), oracle) > 1.0);
  }

  CHECK_THROWS_AS(oracle_distance(make_simplex_etf(3, 4), make_simplex_etf(4, 4)),
                  ValidationError);
}

TEST_CASE("configuration classification") {
  CHECK(classify_configuration(make_simplex_etf(8, 16), 1e-6) == OracleKind::SimplexETF);
  CHECK(classify_configuration(make_cross_polytope(4), 1e-6) == OracleKind::CrossPolytope);

  EmbeddingPair basis;
  basis.u = Matrix::Identity(4, 4);
  basis.v = basis.u;
  CHECK(!classify_configuration(basis, 0.01).has_value());

  // Default-tolerance classification admits small perturbations.
  Rng rng(3);
  EmbeddingPair near_etf = make_simplex_etf(6, 8);
  for (int j = 0; j < near_etf.n(); ++j)
    for (int i = 0; i < near_etf.d(); ++i) near_etf.u(i, j) += 0.002 * rng.normal();
  near_etf.u = normalized_columns(near_etf.u);
  near_etf.v = near_etf.u;
  CHECK(classify_configuration(near_etf) == OracleKind::SimplexETF);

  // u != v breaks the simplex classification even with a matching gram.
  EmbeddingPair split = make_simplex_etf(3, 4);
  split.v = -split.v;
  CHECK(classify_configuration(split, 0.05) != OracleKind::SimplexETF);

  CHECK_THROWS_AS(classify_configuration(basis, 0.0), ValidationError);
}

TEST_CASE("both reference configurations are stationary for descent") {
  BatchCollection full;
  full.batches = {full_batch(6)};
  const EmbeddingPair etf = make_simplex_etf(6, 8);
  CHECK(oracle_distance(gd_step(etf, full, 0.5), etf) < 1e-6);

  BatchCollection full8;
  full8.batches = {full_batch(8)};
  const EmbeddingPair cp = make_cross_polytope(4);
  CHECK(oracle_distance(gd_step(cp, full8, 0.5), cp) < 1e-6);
}
