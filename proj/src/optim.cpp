#include "contrastive/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <set>
#include <string>

#include "contrastive/geometry.hpp"
#include "contrastive/loss.hpp"
#include "contrastive/rng.hpp"

namespace contrastive {

namespace {

using u128 = unsigned __int128;

// C(n, r) exactly; false when it cannot be held in 128 bits. The running
// product c * (n-r+i) / i is an integer at every step.
bool binom128(std::uint64_t n, std::uint64_t r, u128& out) {
  if (r > n) {
    out = 0;
    return true;
  }
  r = std::min(r, n - r);
  u128 c = 1;
  for (std::uint64_t i = 1; i <= r; ++i) {
    const u128 mult = n - r + i;
    if (c > ~u128{0} / mult) return false;
    c = c * mult / i;
  }
  out = c;
  return true;
}

// Numerator of gamma_j over the common denominator C(m, k).
bool gamma_numerator(int m, int k, int q, int j, u128& out) {
  u128 acc = 0;
  for (int l = 0; l < q; ++l) {
    if (l > j - 1 || k - l - 1 > m - j) continue;
    u128 a = 0, b = 0;
    if (!binom128(static_cast<std::uint64_t>(j - 1), static_cast<std::uint64_t>(l), a) ||
        !binom128(static_cast<std::uint64_t>(m - j), static_cast<std::uint64_t>(k - l - 1), b))
      return false;
    if (b != 0 && a > ~u128{0} / b) return false;
    const u128 term = a * b;
    if (acc > ~u128{0} - term) return false;
    acc += term;
  }
  out = acc;
  return true;
}

double log_binomial(int n, int r) {
  if (r < 0 || r > n) return -std::numeric_limits<double>::infinity();
  return std::lgamma(n + 1.0) - std::lgamma(r + 1.0) - std::lgamma(n - r + 1.0);
}

void check_gamma_args(int m, int k, int q) {
  if (q < 1 || k < q || m < k)
    throw ValidationError("gamma weights need 1 <= q <= k <= m, got m = " + std::to_string(m) +
                          ", k = " + std::to_string(k) + ", q = " + std::to_string(q));
}

std::vector<Batch> sample_distinct_batches(Rng& rng, int n, int b, int k) {
  std::set<Batch> got;
  while (static_cast<int>(got.size()) < k) got.insert(rng.sample_distinct(n, b));
  return {got.begin(), got.end()};
}

std::vector<Batch> partition_from_shuffle(int n, int b, Rng& rng) {
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(perm);
  std::vector<Batch> out;
  out.reserve(static_cast<std::size_t>(n / b));
  for (int g = 0; g < n / b; ++g) {
    Batch batch(perm.begin() + static_cast<std::ptrdiff_t>(g) * b,
                perm.begin() + static_cast<std::ptrdiff_t>(g + 1) * b);
    std::sort(batch.begin(), batch.end());
    out.push_back(std::move(batch));
  }
  return out;
}

}  // namespace

std::uint64_t count_combinations(std::uint64_t n, std::uint64_t k) {
  u128 c = 0;
  if (!binom128(n, k, c) || c > std::numeric_limits<std::uint64_t>::max())
    return std::numeric_limits<std::uint64_t>::max();
  return static_cast<std::uint64_t>(c);
}

BatchCollection enumerate_batches(int n, int b, std::uint64_t cap) {
  if (b < 2 || b > n)
    throw ValidationError("enumerate_batches: need 2 <= b <= n, got n = " + std::to_string(n) +
                          ", b = " + std::to_string(b));
  const std::uint64_t count = count_combinations(static_cast<std::uint64_t>(n),
                                                 static_cast<std::uint64_t>(b));
  if (count > cap) {
    const std::string shown = count == std::numeric_limits<std::uint64_t>::max()
                                  ? "more than 18446744073709551614"
                                  : std::to_string(count);
    throw ValidationError("enumerate_batches: C(" + std::to_string(n) + "," + std::to_string(b) +
                          ") = " + shown + " exceeds cap " + std::to_string(cap));
  }
  BatchCollection coll;
  coll.kind = CollectionKind::General;
  coll.batches.reserve(count);
  Batch cur(static_cast<std::size_t>(b));
  std::iota(cur.begin(), cur.end(), 0);
  while (true) {
    coll.batches.push_back(cur);
    int i = b - 1;
    while (i >= 0 && cur[static_cast<std::size_t>(i)] == n - b + i) --i;
    if (i < 0) break;
    ++cur[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < b; ++j)
      cur[static_cast<std::size_t>(j)] = cur[static_cast<std::size_t>(j - 1)] + 1;
  }
  return coll;
}

EmbeddingPair gd_step(const EmbeddingPair& emb, const BatchCollection& coll, double eta) {
  validate_embedding(emb);
  validate_collection(coll, emb.n(), 2);
  if (!std::isfinite(eta) || eta < 0.0)
    throw ValidationError("gd_step: eta must be finite and nonnegative");
  if (eta == 0.0) return emb;
  Matrix du = Matrix::Zero(emb.d(), emb.n());
  Matrix dv = Matrix::Zero(emb.d(), emb.n());
  for (const Batch& batch : coll.batches) {
    const auto [gu, gv] = batch_gradient(emb, batch);
    for (std::size_t t = 0; t < batch.size(); ++t) {
      du.col(batch[t]) += gu.col(static_cast<Eigen::Index>(t));
      dv.col(batch[t]) += gv.col(static_cast<Eigen::Index>(t));
    }
  }
  const double scale = eta / static_cast<double>(coll.batches.size());
  return {normalized_columns(emb.u - scale * du), normalized_columns(emb.v - scale * dv)};
}

std::vector<int> top_q_batches(const std::vector<Batch>& batches,
                               const std::vector<double>& losses, int q) {
  if (batches.size() != losses.size())
    throw ValidationError("top_q_batches: batches and losses must align");
  if (q < 1 || q > static_cast<int>(batches.size()))
    throw ValidationError("top_q_batches: need 1 <= q <= number of batches");
  std::vector<int> idx(batches.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (losses[static_cast<std::size_t>(a)] != losses[static_cast<std::size_t>(b)])
      return losses[static_cast<std::size_t>(a)] > losses[static_cast<std::size_t>(b)];
    return batches[static_cast<std::size_t>(a)] < batches[static_cast<std::size_t>(b)];
  });
  idx.resize(static_cast<std::size_t>(q));
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    return batches[static_cast<std::size_t>(a)] < batches[static_cast<std::size_t>(b)];
  });
  return idx;
}

RunTrace run_optimizer(const EmbeddingPair& init, const OptimizerConfig& cfg,
                       const BatchCollection* subset, EmbeddingPair* final_out) {
  validate_embedding(init);
  const int n = init.n();
  const int d = init.d();
  const Variant variant = cfg.variant;

  if (cfg.steps < 1) throw ValidationError("optimizer: steps must be positive");
  if (cfg.eta.empty()) throw ValidationError("optimizer: eta schedule is empty");
  for (double e : cfg.eta)
    if (!std::isfinite(e) || e <= 0.0)
      throw ValidationError("optimizer: eta values must be positive and finite");
  if (cfg.eta.size() != 1 && static_cast<int>(cfg.eta.size()) != cfg.steps)
    throw ValidationError("optimizer: eta schedule length must be 1 or equal to steps");
  if ((variant == Variant::SubsetGD) != (subset != nullptr))
    throw ValidationError("optimizer: subset collection is required exactly for the subset variant");
  if (variant != Variant::FullBatchGD && (cfg.b < 2 || cfg.b > n))
    throw ValidationError("optimizer: need 2 <= b <= n");

  BatchCollection fixed;
  std::optional<Rng> sampler;
  bool scan_all = false;
  int groups = 0;
  switch (variant) {
    case Variant::FullBatchGD:
      fixed.batches = {full_batch(n)};
      fixed.kind = CollectionKind::Partition;
      break;
    case Variant::AllNcBGD:
      fixed = enumerate_batches(n, cfg.b, cfg.enumeration_cap);
      break;
    case Variant::SubsetGD:
      validate_collection(*subset, n, 2);
      if (static_cast<int>(subset->batches.front().size()) != cfg.b)
        throw ValidationError("optimizer: subset batch size must equal b");
      fixed = *subset;
      break;
    case Variant::SGDWithReplacement:
    case Variant::OSGD: {
      const std::uint64_t m = count_combinations(static_cast<std::uint64_t>(n),
                                                 static_cast<std::uint64_t>(cfg.b));
      if (cfg.k < 1 || static_cast<std::uint64_t>(cfg.k) > m)
        throw ValidationError("optimizer: need 1 <= k <= C(n,b)");
      if (variant == Variant::OSGD && (cfg.q < 1 || cfg.q > cfg.k))
        throw ValidationError("optimizer: need 1 <= q <= k");
      scan_all = static_cast<std::uint64_t>(cfg.k) == m;
      if (scan_all)
        fixed = enumerate_batches(n, cfg.b, cfg.enumeration_cap);
      else
        sampler.emplace(cfg.seed);
      break;
    }
    case Variant::SGDWithoutReplacement:
    case Variant::OSGDWithoutReplacement:
      if (n % cfg.b != 0)
        throw ValidationError("optimizer: without-replacement variants need b to divide n");
      groups = n / cfg.b;
      if (cfg.k < 1 || cfg.k > groups || groups % cfg.k != 0)
        throw ValidationError("optimizer: k must divide n/b for without-replacement variants");
      if (variant == Variant::OSGDWithoutReplacement && (cfg.q < 1 || cfg.q > cfg.k))
        throw ValidationError("optimizer: need 1 <= q <= k");
      break;
  }

  std::optional<EmbeddingPair> oracle;
  if (n >= 2 && n <= d + 1)
    oracle = make_simplex_etf(n, d);
  else if (n == 2 * d)
    oracle = make_cross_polytope(d);

  EmbeddingPair emb = init;
  const Batch full = full_batch(n);
  RunTrace trace;
  trace.records.reserve(static_cast<std::size_t>(cfg.steps));

  std::vector<Batch> epoch_batches;
  int pos = 0;
  std::uint64_t epoch = 0;

  for (int t = 0; t < cfg.steps; ++t) {
    const double eta = cfg.eta.size() == 1 ? cfg.eta[0] : cfg.eta[static_cast<std::size_t>(t)];
    double eta_eff = eta;
    std::vector<Batch> stepped;

    switch (variant) {
      case Variant::FullBatchGD:
      case Variant::AllNcBGD:
      case Variant::SubsetGD:
        stepped = fixed.batches;
        break;
      case Variant::SGDWithReplacement:
        stepped = scan_all ? fixed.batches : sample_distinct_batches(*sampler, n, cfg.b, cfg.k);
        break;
      case Variant::OSGD: {
        std::vector<Batch> cand =
            scan_all ? fixed.batches : sample_distinct_batches(*sampler, n, cfg.b, cfg.k);
        std::vector<double> losses(cand.size());
        for (std::size_t i = 0; i < cand.size(); ++i) losses[i] = contrastive_loss(emb, cand[i]);
        for (int i : top_q_batches(cand, losses, cfg.q))
          stepped.push_back(cand[static_cast<std::size_t>(i)]);
        break;
      }
      case Variant::SGDWithoutReplacement:
      case Variant::OSGDWithoutReplacement: {
        if (pos == 0) {
          Rng shuffle_rng(Rng::derive(cfg.seed, epoch));
          epoch_batches = partition_from_shuffle(n, cfg.b, shuffle_rng);
          ++epoch;
        }
        std::vector<Batch> walked(epoch_batches.begin() + pos,
                                  epoch_batches.begin() + pos + cfg.k);
        pos = (pos + cfg.k) % groups;
        if (variant == Variant::SGDWithoutReplacement) {
          stepped = std::move(walked);
        } else {
          std::vector<double> losses(walked.size());
          for (std::size_t i = 0; i < walked.size(); ++i)
            losses[i] = contrastive_loss(emb, walked[i]);
          for (int i : top_q_batches(walked, losses, cfg.q))
            stepped.push_back(walked[static_cast<std::size_t>(i)]);
          eta_eff = eta * static_cast<double>(cfg.q) / static_cast<double>(cfg.k);
        }
        break;
      }
    }

    BatchCollection step_coll;
    step_coll.batches = stepped;
    emb = gd_step(emb, step_coll, eta_eff);

    TraceRecord rec;
    rec.step = t + 1;
    rec.full_loss = contrastive_loss(emb, full);
    rec.oracle_dist = oracle ? oracle_distance(emb, *oracle) : -1.0;
    rec.selected_batches = std::move(stepped);
    trace.records.push_back(std::move(rec));
  }

  if (final_out) *final_out = emb;
  return trace;
}

std::vector<double> gamma_weights(int m, int k, int q) {
  check_gamma_args(m, k, q);
  std::vector<double> out(static_cast<std::size_t>(m));
  u128 denom = 0;
  bool exact = binom128(static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(k), denom);
  if (exact) {
    for (int j = 1; j <= m && exact; ++j) {
      u128 num = 0;
      exact = gamma_numerator(m, k, q, j, num);
      if (exact)
        out[static_cast<std::size_t>(j - 1)] =
            static_cast<double>(static_cast<long double>(num) / static_cast<long double>(denom));
    }
  }
  if (!exact) {
    const double log_denom = log_binomial(m, k);
    for (int j = 1; j <= m; ++j) {
      double acc = 0.0;
      for (int l = 0; l < q; ++l) {
        const double lt = log_binomial(j - 1, l) + log_binomial(m - j, k - l - 1) - log_denom;
        if (std::isfinite(lt)) acc += std::exp(lt);
      }
      out[static_cast<std::size_t>(j - 1)] = acc;
    }
  }
  return out;
}

bool gamma_sum_identity_exact(int m, int k, int q) {
  check_gamma_args(m, k, q);
  u128 denom = 0;
  if (!binom128(static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(k), denom)) return false;
  if (denom != 0 && static_cast<u128>(q) > ~u128{0} / denom) return false;
  u128 total = 0;
  for (int j = 1; j <= m; ++j) {
    u128 num = 0;
    if (!gamma_numerator(m, k, q, j, num)) return false;
    if (total > ~u128{0} - num) return false;
    total += num;
  }
  return total == static_cast<u128>(q) * denom;
}

double weighted_osgd_loss(const EmbeddingPair& emb, int b, int k, int q, std::uint64_t cap) {
  validate_embedding(emb);
  const BatchCollection coll = enumerate_batches(emb.n(), b, cap);
  const int m = static_cast<int>(coll.batches.size());
  check_gamma_args(m, k, q);
  std::vector<double> losses(coll.batches.size());
  for (std::size_t i = 0; i < coll.batches.size(); ++i)
    losses[i] = contrastive_loss(emb, coll.batches[i]);
  std::vector<int> order(losses.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b2) {
    if (losses[static_cast<std::size_t>(a)] != losses[static_cast<std::size_t>(b2)])
      return losses[static_cast<std::size_t>(a)] > losses[static_cast<std::size_t>(b2)];
    return coll.batches[static_cast<std::size_t>(a)] < coll.batches[static_cast<std::size_t>(b2)];
  });
  const std::vector<double> gamma = gamma_weights(m, k, q);
  double acc = 0.0;
  for (int j = 0; j < m; ++j)
    acc += gamma[static_cast<std::size_t>(j)] * losses[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])];
  return acc / q;
}

}  // namespace contrastive
