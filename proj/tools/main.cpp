#include <CLI11.hpp>
#include <cstdio>
#include <string>

#include "contrastive/experiment.hpp"

namespace {

contrastive::ExperimentKind kind_for(const std::string& name) {
  using contrastive::ExperimentKind;
  if (name == "synthetic") return ExperimentKind::Synthetic;
  if (name == "toy") return ExperimentKind::Toy;
  if (name == "select-batches") return ExperimentKind::SelectBatches;
  if (name == "histogram") return ExperimentKind::Histogram;
  return ExperimentKind::Verify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mini-batch contrastive experiments: traces, batch selection, toy study"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool quiet = false;

  const struct {
    const char* name;
    const char* help;
  } subs[] = {
      {"synthetic", "projected gradient descent on unit-sphere embeddings"},
      {"toy", "four-point planar study of OSGD / SGD / all-batch descent"},
      {"select-batches", "spectral-clustering batch selection"},
      {"histogram", "per-batch loss histogram over all size-b batches"},
      {"verify", "run the built-in property checks"},
  };
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->add_option("--config", config_path, "configuration file (key = value sections)");
    sub->add_option("--seed", seed, "replace the configured seed list with this seed");
    sub->add_option("--out", out_dir, "override the output directory");
    sub->add_flag("--quiet", quiet, "suppress progress output");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    contrastive::ExperimentConfig cfg;
    if (!config_path.empty()) cfg = contrastive::load_config(config_path);
    cfg.kind = kind_for(sub->get_name());
    if (sub->count("--seed") > 0) cfg.seeds = {seed};
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (cfg.kind == contrastive::ExperimentKind::Verify)
      return contrastive::run_verify(quiet);
    return contrastive::run_experiment(cfg, quiet);
  } catch (const contrastive::ValidationError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return 1;
  } catch (const contrastive::NumericError& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return 2;
  } catch (const contrastive::IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
