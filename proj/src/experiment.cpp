#include "contrastive/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>

#include "contrastive/csv.hpp"
#include "contrastive/geometry.hpp"
#include "contrastive/loss.hpp"
#include "contrastive/spectral.hpp"
#include "contrastive/toy.hpp"

namespace contrastive {

namespace {

namespace fs = std::filesystem;

void make_dirs(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
}

std::string seed_dir(const ExperimentConfig& cfg, std::uint64_t seed) {
  return cfg.output_dir + "/seed_" + std::to_string(seed);
}

std::string manifest_text(const ExperimentConfig& cfg, std::uint64_t seed) {
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(config_hash(cfg)));
  std::ostringstream out;
  out << "config_hash=" << hash << "\n";
  out << "seed=" << seed << "\n";
  out << "version=0.1.0\n";
  return out.str();
}

BatchCollection contiguous_partition(int n, int b) {
  if (b < 2 || n % b != 0)
    throw ValidationError("partition subset requires b >= 2 dividing n");
  BatchCollection coll;
  coll.kind = CollectionKind::Partition;
  for (int g = 0; g < n / b; ++g) {
    Batch batch;
    for (int i = 0; i < b; ++i) batch.push_back(g * b + i);
    coll.batches.push_back(std::move(batch));
  }
  return coll;
}

void run_synthetic_seed(const ExperimentConfig& cfg, std::uint64_t seed, bool quiet) {
  Rng init_rng(Rng::derive(seed, 0));
  const EmbeddingPair init = random_embedding(cfg.n, cfg.d, init_rng);

  OptimizerConfig opt = cfg.optimizer;
  opt.b = cfg.b;
  opt.seed = Rng::derive(seed, 1);

  BatchCollection subset;
  const BatchCollection* subset_ptr = nullptr;
  if (opt.variant == Variant::SubsetGD) {
    switch (cfg.subset_spec) {
      case SubsetSpec::Partition:
        subset = contiguous_partition(cfg.n, cfg.b);
        break;
      case SubsetSpec::ExplicitList:
        subset.batches = cfg.explicit_batches;
        subset.kind = CollectionKind::General;
        break;
      default:
        throw ValidationError(
            "subset_gd requires subset spec 'partition' or 'explicit'; use the "
            "full_batch_gd / all_ncb_gd variants instead");
    }
    subset_ptr = &subset;
  }

  EmbeddingPair final_emb;
  const RunTrace trace = run_optimizer(init, opt, subset_ptr, &final_emb);

  const std::string dir = seed_dir(cfg, seed);
  make_dirs(dir);
  write_file(dir + "/trace.csv", trace_csv(trace));
  write_file(dir + "/gram_final.csv", gram_csv(gram(final_emb)));
  write_file(dir + "/manifest.txt", manifest_text(cfg, seed));
  if (!quiet) std::printf("seed %llu: wrote %s\n", static_cast<unsigned long long>(seed), dir.c_str());
}

void run_toy_seed(const ExperimentConfig& cfg, std::uint64_t seed, std::string& hit_rows,
                  bool quiet) {
  const std::string dir = seed_dir(cfg, seed);
  make_dirs(dir);
  const struct {
    ToyVariant variant;
    const char* name;
  } variants[] = {
      {ToyVariant::OSGD, "osgd"},
      {ToyVariant::SGD, "sgd"},
      {ToyVariant::AllBatchGD, "allbatch"},
  };
  for (const auto& v : variants) {
    const ToyRun run = run_toy(v.variant, cfg.toy.epsilon, cfg.toy.eta, cfg.toy.rho,
                               Rng::derive(seed, 1), cfg.toy.max_steps);
    write_file(dir + "/toy_trace_" + v.name + ".csv", trace_csv(run.trace));
    hit_rows += v.name;
    hit_rows += ',';
    hit_rows += std::to_string(seed);
    hit_rows += ',';
    hit_rows += std::to_string(run.hit_time ? *run.hit_time : -1);
    hit_rows += '\n';
  }
  write_file(dir + "/manifest.txt", manifest_text(cfg, seed));
  if (!quiet) std::printf("seed %llu: wrote %s\n", static_cast<unsigned long long>(seed), dir.c_str());
}

void run_select_seed(const ExperimentConfig& cfg, std::uint64_t seed, bool quiet) {
  Rng init_rng(Rng::derive(seed, 0));
  const EmbeddingPair emb = random_embedding(cfg.n, cfg.d, init_rng);
  BatchCollection coll;
  switch (cfg.selector) {
    case SelectorKind::Random: {
      Rng sel_rng(Rng::derive(seed, 2));
      coll = random_partition(cfg.n, cfg.b, sel_rng);
      break;
    }
    case SelectorKind::SC:
      coll = sc_select(emb, cfg.b, Rng::derive(seed, 2));
      break;
    case SelectorKind::ChunkedSC:
      coll = chunked_sc_select(emb, cfg.b, cfg.chunk_k, Rng::derive(seed, 2));
      break;
  }
  const std::string dir = seed_dir(cfg, seed);
  make_dirs(dir);
  write_file(dir + "/batches.csv", batches_csv(coll));
  write_file(dir + "/manifest.txt", manifest_text(cfg, seed));
  if (!quiet) std::printf("seed %llu: wrote %s\n", static_cast<unsigned long long>(seed), dir.c_str());
}

void run_histogram_seed(const ExperimentConfig& cfg, std::uint64_t seed, bool quiet) {
  Rng init_rng(Rng::derive(seed, 0));
  const EmbeddingPair emb = random_embedding(cfg.n, cfg.d, init_rng);
  const BatchCollection coll = enumerate_batches(cfg.n, cfg.b, cfg.optimizer.enumeration_cap);
  const auto hist = batch_loss_histogram(emb, coll, cfg.histogram_bins);
  const std::string dir = seed_dir(cfg, seed);
  make_dirs(dir);
  write_file(dir + "/histogram.csv", histogram_csv(hist));
  write_file(dir + "/manifest.txt", manifest_text(cfg, seed));
  if (!quiet) std::printf("seed %llu: wrote %s\n", static_cast<unsigned long long>(seed), dir.c_str());
}

bool approx(double a, double b, double tol) { return std::abs(a - b) <= tol; }

}  // namespace

int run_experiment(const ExperimentConfig& cfg, bool quiet) {
  try {
    validate_config(cfg);
    if (cfg.kind == ExperimentKind::Verify) return run_verify(quiet);
    make_dirs(cfg.output_dir);
    std::string hit_rows;
    for (std::uint64_t seed : cfg.seeds) {
      switch (cfg.kind) {
        case ExperimentKind::Synthetic: run_synthetic_seed(cfg, seed, quiet); break;
        case ExperimentKind::Toy: run_toy_seed(cfg, seed, hit_rows, quiet); break;
        case ExperimentKind::SelectBatches: run_select_seed(cfg, seed, quiet); break;
        case ExperimentKind::Histogram: run_histogram_seed(cfg, seed, quiet); break;
        case ExperimentKind::Verify: break;
      }
    }
    if (cfg.kind == ExperimentKind::Toy)
      write_file(cfg.output_dir + "/hit_times.csv", "variant,seed,hit_time\n" + hit_rows);
    return 0;
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return 1;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return 2;
  } catch (const IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return 3;
  }
}

int run_verify(bool quiet) {
  int failures = 0;
  const auto check = [&](const char* name, const std::function<bool()>& body) {
    bool ok = false;
    std::string detail;
    try {
      ok = body();
    } catch (const std::exception& e) {
      detail = e.what();
    }
    if (ok) {
      if (!quiet) std::printf("[ok]   %s\n", name);
    } else {
      ++failures;
      std::fprintf(stderr, "[FAIL] %s%s%s\n", name, detail.empty() ? "" : ": ",
                   detail.c_str());
    }
  };

  check("zero-similarity gradient closed form", [] {
    Matrix x = Matrix::Zero(2, 2);
    const Matrix g = lm_gradient(x);
    return approx(g(0, 0), -0.5, 1e-15) && approx(g(0, 1), 0.5, 1e-15) &&
           approx(g(1, 0), 0.5, 1e-15) && approx(g(1, 1), -0.5, 1e-15);
  });
  check("orthonormal one-sided loss closed form", [] {
    const int n = 6;
    EmbeddingPair emb;
    emb.u = Matrix::Identity(n, n);
    emb.v = emb.u;
    return approx(one_sided_loss(emb, full_batch(n)),
                  std::log(std::exp(1.0) + n - 1.0) - 1.0, 1e-12);
  });
  check("simplex gradient has no tangential part", [] {
    const EmbeddingPair etf = make_simplex_etf(5, 8);
    const auto [gu, gv] = batch_gradient(etf, full_batch(5));
    double worst = 0.0;
    for (int j = 0; j < 5; ++j) {
      const Vector u = etf.u.col(j);
      worst = std::max(worst, (gu.col(j) - u.dot(gu.col(j)) * u).norm());
      worst = std::max(worst, (gv.col(j) - u.dot(gv.col(j)) * u).norm());
    }
    return worst < 1e-6;
  });
  check("classification recognizes both references", [] {
    return classify_configuration(make_simplex_etf(6, 8), 0.05) == OracleKind::SimplexETF &&
           classify_configuration(make_cross_polytope(4), 0.05) == OracleKind::CrossPolytope;
  });
  check("zero learning rate is the identity", [] {
    Rng rng(11);
    const EmbeddingPair emb = random_embedding(6, 4, rng);
    BatchCollection coll;
    coll.batches = {{0, 1}, {2, 3}, {4, 5}};
    const EmbeddingPair out = gd_step(emb, coll, 0.0);
    return out.u == emb.u && out.v == emb.v;
  });
  check("ranking weights sum to q", [] {
    for (int m = 2; m <= 12; ++m)
      for (int k = 1; k <= m; ++k)
        for (int q = 1; q <= k; ++q)
          if (!gamma_sum_identity_exact(m, k, q)) return false;
    return true;
  });
  check("ordered selection matches exhaustive greedy", [] {
    Rng rng(5);
    const EmbeddingPair emb = random_embedding(5, 3, rng);
    const BatchCollection all = enumerate_batches(5, 2);
    int arg = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < all.batches.size(); ++i) {
      const double loss = contrastive_loss(emb, all.batches[i]);
      if (loss > best) {
        best = loss;
        arg = static_cast<int>(i);
      }
    }
    OptimizerConfig cfg;
    cfg.variant = Variant::OSGD;
    cfg.b = 2;
    cfg.k = static_cast<int>(all.batches.size());
    cfg.q = 1;
    cfg.steps = 1;
    cfg.eta = {0.1};
    const RunTrace trace = run_optimizer(emb, cfg);
    return trace.records.size() == 1 && trace.records[0].selected_batches.size() == 1 &&
           trace.records[0].selected_batches[0] == all.batches[static_cast<std::size_t>(arg)];
  });
  check("pairwise surrogate lower-bounds the batch loss", [] {
    Rng rng(21);
    const EmbeddingPair emb = random_embedding(7, 5, rng);
    const Batch batch = full_batch(7);
    return jensen_lower_bound(emb, batch) <= contrastive_loss(emb, batch) + 1e-12;
  });
  check("planar first-step drift", [] {
    ToyState s{{0.1, 0.1, 0.1, 0.1}, 0.1};
    const ToyState next = toy_step(s, {0, 1}, 0.1);
    const double expect = 0.1 + 0.1 * 2.0 * std::sin(0.2) / (1.0 + std::exp(1.0 - std::cos(0.2)));
    return approx(next.theta[0], expect, 1e-12) && approx(next.theta[1], expect, 1e-12);
  });
  check("small symmetric eigensolve", [] {
    Matrix m = Matrix::Zero(3, 3);
    m(0, 0) = 3.0;
    m(1, 1) = 1.0;
    m(2, 2) = 2.0;
    const SpectralEmbedding s = symmetric_eigs(m, 2);
    return approx(s.eigenvalues[0], 1.0, 1e-12) && approx(s.eigenvalues[1], 2.0, 1e-12) &&
           approx(s.rows(1, 0), 1.0, 1e-12) && approx(s.rows(2, 1), 1.0, 1e-12);
  });
  check("balanced assignment on a planted instance", [] {
    Matrix pts(4, 1), centers(2, 1);
    pts << 0.0, 0.1, 5.0, 5.1;
    centers << 0.05, 5.05;
    const BatchCollection coll = balanced_assign(pts, centers, 2);
    return coll.batches.size() == 2 && coll.batches[0] == Batch{0, 1} &&
           coll.batches[1] == Batch{2, 3};
  });
  check("config text round-trip", [] {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::SelectBatches;
    cfg.n = 12;
    cfg.b = 3;
    cfg.seeds = {4, 9};
    cfg.optimizer.eta = {0.25, 0.125};
    cfg.optimizer.steps = 2;
    cfg.explicit_batches = {{0, 1, 2}, {3, 4, 5}};
    cfg.subset_spec = SubsetSpec::ExplicitList;
    return parse_config_text(serialize_config(cfg)) == cfg;
  });

  if (!quiet)
    std::printf("%s (%d check%s failed)\n", failures == 0 ? "verify passed" : "verify FAILED",
                failures, failures == 1 ? "" : "s");
  return failures == 0 ? 0 : 1;
}

}  // namespace contrastive
