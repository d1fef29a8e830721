#include "contrastive/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>

#include "contrastive/loss.hpp"
#include "contrastive/optim.hpp"

namespace contrastive {

namespace {

void validate_affinity(const AffinityGraph& a) {
  const int n = a.n();
  if (n < 1 || a.a.cols() != n) throw ValidationError("affinity: matrix must be square");
  if (!a.a.allFinite()) throw NumericError("affinity: non-finite entry");
  for (int i = 0; i < n; ++i) {
    if (a.a(i, i) != 0.0) throw ValidationError("affinity: diagonal must be zero");
    for (int j = 0; j < n; ++j) {
      if (a.a(i, j) < 0.0) throw ValidationError("affinity: weights must be nonnegative");
      if (a.a(i, j) != a.a(j, i)) throw ValidationError("affinity: matrix must be exactly symmetric");
    }
  }
}

double squared_distance(const Matrix& points, int i, const Matrix& centers, int c) {
  return (points.row(i) - centers.row(c)).squaredNorm();
}

// Minimum-cost perfect assignment (rows to columns) with potentials; O(n^3).
std::vector<int> hungarian(const Matrix& cost) {
  const int n = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<double> v(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<int> match(static_cast<std::size_t>(n) + 1, 0);
  std::vector<int> way(static_cast<std::size_t>(n) + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n) + 1, inf);
    std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = match[static_cast<std::size_t>(j0)];
      int j1 = -1;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] -
                           v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(match[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (match[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      match[static_cast<std::size_t>(j0)] = match[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> assign(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= n; ++j)
    if (match[static_cast<std::size_t>(j)] > 0)
      assign[static_cast<std::size_t>(match[static_cast<std::size_t>(j)]) - 1] = j - 1;
  return assign;
}

// Balanced partitions in canonical order: the smallest unassigned index
// leads each new group, companions chosen in lexicographic order.
void enumerate_balanced(std::vector<int>& pool, int b, std::vector<Batch>& current,
                        const std::function<void(const std::vector<Batch>&)>& visit) {
  if (pool.empty()) {
    visit(current);
    return;
  }
  const int leader = pool.front();
  std::vector<int> rest(pool.begin() + 1, pool.end());
  const int r = static_cast<int>(rest.size());
  std::vector<int> pick(static_cast<std::size_t>(b - 1));
  std::iota(pick.begin(), pick.end(), 0);
  while (true) {
    Batch group{leader};
    std::vector<char> taken(static_cast<std::size_t>(r), 0);
    for (int p : pick) {
      group.push_back(rest[static_cast<std::size_t>(p)]);
      taken[static_cast<std::size_t>(p)] = 1;
    }
    std::vector<int> remaining;
    remaining.reserve(static_cast<std::size_t>(r - (b - 1)));
    for (int t = 0; t < r; ++t)
      if (!taken[static_cast<std::size_t>(t)]) remaining.push_back(rest[static_cast<std::size_t>(t)]);
    current.push_back(std::move(group));
    enumerate_balanced(remaining, b, current, visit);
    current.pop_back();

    int i = b - 2;
    while (i >= 0 && pick[static_cast<std::size_t>(i)] == r - (b - 1) + i) --i;
    if (i < 0) break;
    ++pick[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < b - 1; ++j)
      pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
  }
}

std::uint64_t count_balanced_partitions(int n, int b) {
  std::uint64_t total = 1;
  for (int r = n; r > 0; r -= b) {
    const std::uint64_t ways = count_combinations(static_cast<std::uint64_t>(r - 1),
                                                  static_cast<std::uint64_t>(b - 1));
    if (ways != 0 && total > std::numeric_limits<std::uint64_t>::max() / ways)
      return std::numeric_limits<std::uint64_t>::max();
    total *= ways;
  }
  return total;
}

}  // namespace

AffinityGraph build_affinity(const EmbeddingPair& emb, int b) {
  validate_embedding(emb);
  if (emb.n() < 2) throw ValidationError("build_affinity: need n >= 2");
  const int n = emb.n();
  Matrix a = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double w = pair_weight(emb, i, j, b);
      a(i, j) = w;
      a(j, i) = w;
    }
  return {a};
}

Matrix laplacian(const AffinityGraph& a) {
  validate_affinity(a);
  Matrix l = -a.a;
  for (int i = 0; i < a.n(); ++i) l(i, i) = a.a.row(i).sum();
  return l;
}

SpectralEmbedding symmetric_eigs(const Matrix& m, int k) {
  const int n = static_cast<int>(m.rows());
  if (n < 1 || m.cols() != n) throw ValidationError("symmetric_eigs: matrix must be square");
  if (k < 1 || k > n) throw ValidationError("symmetric_eigs: need 1 <= k <= n");
  if (!m.allFinite()) throw NumericError("symmetric_eigs: non-finite entry");
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9)
    throw ValidationError("symmetric_eigs: input is not symmetric within 1e-9");

  Matrix a = 0.5 * (m + m.transpose());
  Matrix vecs = Matrix::Identity(n, n);
  // Cyclic Jacobi sweeps; the stopping threshold scales with the matrix so
  // it stays reachable above the floating-point floor of large inputs.
  const double tol = 1e-12 * std::max(1.0, m.norm());
  const int max_sweeps = 60;
  bool converged = false;
  for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += 2.0 * a(p, q) * a(p, q);
    if (std::sqrt(off) < tol) {
      converged = true;
      break;
    }
    for (int p = 0; p < n - 1; ++p)
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        if (theta < 0.0) t = -t;
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);
        const double app = a(p, p);
        const double aqq = a(q, q);
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (int i = 0; i < n; ++i) {
          if (i == p || i == q) continue;
          const double aip = a(i, p);
          const double aiq = a(i, q);
          a(i, p) = aip - s * (aiq + tau * aip);
          a(p, i) = a(i, p);
          a(i, q) = aiq + s * (aip - tau * aiq);
          a(q, i) = a(i, q);
        }
        for (int i = 0; i < n; ++i) {
          const double vip = vecs(i, p);
          const double viq = vecs(i, q);
          vecs(i, p) = vip - s * (viq + tau * vip);
          vecs(i, q) = viq + s * (vip - tau * viq);
        }
      }
  }
  if (!converged) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += 2.0 * a(p, q) * a(p, q);
    if (std::sqrt(off) >= tol) throw NumericError("symmetric_eigs: Jacobi did not converge");
  }

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return a(x, x) < a(y, y); });

  SpectralEmbedding out;
  out.rows = Matrix(n, k);
  out.eigenvalues.resize(static_cast<std::size_t>(k));
  for (int c = 0; c < k; ++c) {
    const int src = order[static_cast<std::size_t>(c)];
    Vector col = vecs.col(src);
    // Deterministic sign: the entry of largest magnitude (first on ties)
    // is made positive.
    int arg = 0;
    for (int i = 1; i < n; ++i)
      if (std::abs(col(i)) > std::abs(col(arg))) arg = i;
    if (col(arg) < 0.0) col = -col;
    out.rows.col(c) = col;
    out.eigenvalues[static_cast<std::size_t>(c)] = a(src, src);
  }
  return out;
}

std::pair<std::vector<int>, Matrix> kmeans(const Matrix& points, int k, std::uint64_t seed,
                                           std::vector<double>* wcss_out) {
  const int n = static_cast<int>(points.rows());
  const int p = static_cast<int>(points.cols());
  if (n < 1 || p < 1) throw ValidationError("kmeans: points must be nonempty");
  if (k < 1 || k > n) throw ValidationError("kmeans: need 1 <= k <= n");
  if (!points.allFinite()) throw NumericError("kmeans: non-finite point");

  Rng rng(seed);
  Matrix centers(k, p);
  // k-means++: first center uniform, the rest sampled proportionally to the
  // squared distance from the chosen set.
  centers.row(0) = points.row(static_cast<int>(rng.below(static_cast<std::uint64_t>(n))));
  std::vector<double> d2(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) d2[static_cast<std::size_t>(i)] = squared_distance(points, i, centers, 0);
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (double x : d2) total += x;
    int pick;
    if (total <= 0.0) {
      pick = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    } else {
      const double r = rng.uniform() * total;
      double cum = 0.0;
      pick = -1;
      for (int i = 0; i < n; ++i) {
        cum += d2[static_cast<std::size_t>(i)];
        if (cum > r) {
          pick = i;
          break;
        }
      }
      if (pick < 0) {
        for (int i = n - 1; i >= 0; --i)
          if (d2[static_cast<std::size_t>(i)] > 0.0) {
            pick = i;
            break;
          }
        if (pick < 0) pick = n - 1;
      }
    }
    centers.row(c) = points.row(pick);
    for (int i = 0; i < n; ++i)
      d2[static_cast<std::size_t>(i)] =
          std::min(d2[static_cast<std::size_t>(i)], squared_distance(points, i, centers, c));
  }

  std::vector<int> labels(static_cast<std::size_t>(n), -1);
  for (int it = 0; it < 300; ++it) {
    // Assignment, nearest center, ties toward the lower index.
    std::vector<int> next(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_d = squared_distance(points, i, centers, 0);
      for (int c = 1; c < k; ++c) {
        const double dist = squared_distance(points, i, centers, c);
        if (dist < best_d) {
          best_d = dist;
          best = c;
        }
      }
      next[static_cast<std::size_t>(i)] = best;
    }
    // Empty clusters steal the globally farthest point.
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (int i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(next[static_cast<std::size_t>(i)])];
    std::vector<double> pd(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      pd[static_cast<std::size_t>(i)] =
          squared_distance(points, i, centers, next[static_cast<std::size_t>(i)]);
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) continue;
      int far = 0;
      for (int i = 1; i < n; ++i)
        if (pd[static_cast<std::size_t>(i)] > pd[static_cast<std::size_t>(far)]) far = i;
      --counts[static_cast<std::size_t>(next[static_cast<std::size_t>(far)])];
      next[static_cast<std::size_t>(far)] = c;
      ++counts[static_cast<std::size_t>(c)];
      centers.row(c) = points.row(far);
      pd[static_cast<std::size_t>(far)] = 0.0;
    }
    const bool fixpoint = next == labels;
    labels = std::move(next);
    // Center update: mean of members.
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] == 0) continue;
      Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(p);
      for (int i = 0; i < n; ++i)
        if (labels[static_cast<std::size_t>(i)] == c) mean += points.row(i);
      centers.row(c) = mean / counts[static_cast<std::size_t>(c)];
    }
    if (wcss_out) {
      double wcss = 0.0;
      for (int i = 0; i < n; ++i)
        wcss += squared_distance(points, i, centers, labels[static_cast<std::size_t>(i)]);
      wcss_out->push_back(wcss);
    }
    if (fixpoint) break;
  }
  return {labels, centers};
}

BatchCollection balanced_assign(const Matrix& points, const Matrix& centers, int b) {
  const int n = static_cast<int>(points.rows());
  const int k = static_cast<int>(centers.rows());
  if (b < 1) throw ValidationError("balanced_assign: b must be positive");
  if (points.cols() != centers.cols())
    throw ValidationError("balanced_assign: points and centers must share dimensions");
  if (n != k * b)
    throw ValidationError("balanced_assign: rejected, n = " + std::to_string(n) +
                          " is not centers * b = " + std::to_string(k * b));
  Matrix cost(n, n);
  for (int i = 0; i < n; ++i)
    for (int slot = 0; slot < n; ++slot)
      cost(i, slot) = (points.row(i) - centers.row(slot / b)).norm();
  const std::vector<int> assign = hungarian(cost);
  BatchCollection coll;
  coll.kind = CollectionKind::Partition;
  coll.batches.assign(static_cast<std::size_t>(k), Batch{});
  for (int i = 0; i < n; ++i)
    coll.batches[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)] / b)].push_back(i);
  return coll;
}

BatchCollection sc_select(const EmbeddingPair& emb, int b, std::uint64_t seed) {
  validate_embedding(emb);
  const int n = emb.n();
  if (b < 2) throw ValidationError("sc_select: need b >= 2");
  if (n % b != 0) throw ValidationError("sc_select: b must divide n");
  const int k = n / b;
  const AffinityGraph graph = build_affinity(emb, b);
  const Matrix lap = laplacian(graph);
  SpectralEmbedding spec = symmetric_eigs(lap, k);
  for (int i = 0; i < n; ++i) {
    const double norm = spec.rows.row(i).norm();
    if (norm > 0.0) spec.rows.row(i) /= norm;
  }
  const auto [labels, centers] = kmeans(spec.rows, k, seed);
  (void)labels;
  return balanced_assign(spec.rows, centers, b);
}

BatchCollection brute_force_min_cut(const AffinityGraph& a, int b) {
  validate_affinity(a);
  const int n = a.n();
  if (b < 1 || n % b != 0) throw ValidationError("brute_force_min_cut: b must divide n");
  const std::uint64_t count = count_balanced_partitions(n, b);
  if (count > 100000)
    throw ValidationError("brute_force_min_cut: " +
                          (count == std::numeric_limits<std::uint64_t>::max()
                               ? std::string("more than 18446744073709551614")
                               : std::to_string(count)) +
                          " balanced partitions exceed the 100000 cap");

  BatchCollection best;
  double best_weight = -1.0;
  std::vector<int> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), 0);
  std::vector<Batch> current;
  const std::function<void(const std::vector<Batch>&)> visit = [&](const std::vector<Batch>& part) {
    double w = 0.0;
    for (const Batch& group : part)
      for (std::size_t s = 0; s < group.size(); ++s)
        for (std::size_t t = s + 1; t < group.size(); ++t) w += a.a(group[s], group[t]);
    // Strictly-greater keeps the first (lexicographically least) partition
    // on ties.
    if (w > best_weight) {
      best_weight = w;
      best.batches = part;
    }
  };
  enumerate_balanced(pool, b, current, visit);
  best.kind = CollectionKind::Partition;
  return best;
}

BatchCollection chunked_sc_select(const EmbeddingPair& emb, int b, int chunk_k,
                                  std::uint64_t seed) {
  validate_embedding(emb);
  const int n = emb.n();
  if (chunk_k < 1) throw ValidationError("chunked_sc_select: chunk_k must be positive");
  const int chunk = chunk_k * b;
  if (n % chunk != 0)
    throw ValidationError("chunked_sc_select: chunk_k * b must divide n");
  const int chunks = n / chunk;
  if (chunks == 1) return sc_select(emb, b, seed);

  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  Rng shuffle_rng(Rng::derive(seed, 0));
  shuffle_rng.shuffle(perm);

  BatchCollection out;
  out.kind = CollectionKind::Partition;
  for (int c = 0; c < chunks; ++c) {
    std::vector<int> members(perm.begin() + static_cast<std::ptrdiff_t>(c) * chunk,
                             perm.begin() + static_cast<std::ptrdiff_t>(c + 1) * chunk);
    std::sort(members.begin(), members.end());
    Matrix u(emb.d(), chunk), v(emb.d(), chunk);
    for (int t = 0; t < chunk; ++t) {
      u.col(t) = emb.u.col(members[static_cast<std::size_t>(t)]);
      v.col(t) = emb.v.col(members[static_cast<std::size_t>(t)]);
    }
    const BatchCollection local = sc_select({u, v}, b, Rng::derive(seed, 1 + static_cast<std::uint64_t>(c)));
    for (const Batch& batch : local.batches) {
      Batch mapped;
      mapped.reserve(batch.size());
      for (int idx : batch) mapped.push_back(members[static_cast<std::size_t>(idx)]);
      out.batches.push_back(std::move(mapped));
    }
  }
  return out;
}

std::vector<std::pair<double, long>> batch_loss_histogram(const EmbeddingPair& emb,
                                                          const BatchCollection& coll,
                                                          int bins) {
  if (bins < 1) throw ValidationError("batch_loss_histogram: bins must be >= 1");
  const LossBreakdown breakdown = avg_minibatch_loss(emb, coll);
  double lo = breakdown.per_batch.front().second;
  double hi = lo;
  for (const auto& pb : breakdown.per_batch) {
    lo = std::min(lo, pb.second);
    hi = std::max(hi, pb.second);
  }
  const double width = (hi - lo) / bins;
  std::vector<std::pair<double, long>> out(static_cast<std::size_t>(bins));
  for (int i = 0; i < bins; ++i) out[static_cast<std::size_t>(i)] = {lo + width * i, 0};
  for (const auto& pb : breakdown.per_batch) {
    int slot = width > 0.0 ? static_cast<int>((pb.second - lo) / width) : 0;
    slot = std::min(std::max(slot, 0), bins - 1);
    ++out[static_cast<std::size_t>(slot)].second;
  }
  return out;
}

double within_batch_weight(const AffinityGraph& a, const BatchCollection& coll) {
  validate_affinity(a);
  validate_collection(coll, a.n(), 2);
  double w = 0.0;
  for (const Batch& batch : coll.batches)
    for (std::size_t s = 0; s < batch.size(); ++s)
      for (std::size_t t = s + 1; t < batch.size(); ++t) w += a.a(batch[s], batch[t]);
  return w;
}

BatchCollection random_partition(int n, int b, Rng& rng) {
  if (b < 2 || n % b != 0) throw ValidationError("random_partition: b must divide n, b >= 2");
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(perm);
  BatchCollection coll;
  coll.kind = CollectionKind::Partition;
  for (int g = 0; g < n / b; ++g) {
    Batch batch(perm.begin() + static_cast<std::ptrdiff_t>(g) * b,
                perm.begin() + static_cast<std::ptrdiff_t>(g + 1) * b);
    std::sort(batch.begin(), batch.end());
    coll.batches.push_back(std::move(batch));
  }
  return coll;
}

}  // namespace contrastive
