#include "contrastive/geometry.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace contrastive {

EmbeddingPair make_simplex_etf(int n, int d) {
  if (n < 2 || n > d + 1)
    throw ValidationError("simplex configuration infeasible: need 2 <= n <= d+1, got n = " +
                          std::to_string(n) + ", d = " + std::to_string(d));
  // Columns w_i = e_i - 1/n have norm sqrt(1 - 1/n) and pairwise products
  // -1/n; all are orthogonal to the all-ones direction.
  Matrix w = Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / n);
  // Householder reflection mapping 1/sqrt(n) onto e_n zeroes the last
  // coordinate of every w_i, so the first n-1 rows carry everything.
  Vector p = Vector::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  p(n - 1) -= 1.0;
  const Matrix hw = w - p * ((2.0 / p.squaredNorm()) * (p.transpose() * w));
  Matrix u = Matrix::Zero(d, n);
  u.topRows(n - 1) = hw.topRows(n - 1) / std::sqrt(1.0 - 1.0 / n);
  return {u, u};
}

EmbeddingPair make_cross_polytope(int d) {
  if (d < 1) throw ValidationError("antipodal configuration needs d >= 1");
  Matrix u(d, 2 * d);
  u << Matrix::Identity(d, d), -Matrix::Identity(d, d);
  return {u, u};
}

Matrix gram(const EmbeddingPair& emb) {
  validate_embedding(emb);
  return emb.u.transpose() * emb.v;
}

double oracle_distance(const EmbeddingPair& emb, const EmbeddingPair& oracle) {
  if (emb.n() != oracle.n())
    throw ValidationError("oracle_distance: embeddings must have the same n");
  return (gram(emb) - gram(oracle)).norm();
}

std::optional<OracleKind> classify_configuration(const EmbeddingPair& emb, double tol) {
  validate_embedding(emb);
  if (!(tol > 0.0)) throw ValidationError("classify_configuration: tol must be positive");
  const int n = emb.n();
  const int d = emb.d();
  const Matrix g = gram(emb);
  const double uv_gap = (emb.u - emb.v).cwiseAbs().maxCoeff();

  if (n >= 2 && n <= d + 1 && uv_gap <= tol) {
    const double target = -1.0 / (n - 1);
    double dev = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        dev = std::max(dev, std::abs(g(i, j) - (i == j ? 1.0 : target)));
    if (dev <= tol) return OracleKind::SimplexETF;
  }

  if (n >= 2 && n == 2 * d) {
    // Antipode candidate per row: most negative entry, ties toward the
    // lowest index.
    std::vector<int> partner(static_cast<std::size_t>(n), -1);
    for (int i = 0; i < n; ++i) {
      int best = -1;
      double best_val = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        if (best < 0 || g(i, j) < best_val) {
          best = j;
          best_val = g(i, j);
        }
      }
      partner[static_cast<std::size_t>(i)] = best;
    }
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) {
      const int j = partner[static_cast<std::size_t>(i)];
      ok = partner[static_cast<std::size_t>(j)] == i && std::abs(g(i, i) - 1.0) <= tol &&
           std::abs(g(i, j) + 1.0) <= tol;
      for (int l = 0; l < n && ok; ++l) {
        if (l == i || l == j) continue;
        ok = std::abs(g(i, l)) <= tol;
      }
    }
    if (ok) return OracleKind::CrossPolytope;
  }

  return std::nullopt;
}

}  // namespace contrastive
