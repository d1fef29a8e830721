#include "contrastive/config.hpp"

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "contrastive/csv.hpp"
#include "contrastive/errors.hpp"

namespace contrastive {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(trim(s.substr(start)));
      break;
    }
    out.push_back(trim(s.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(value, &pos);
    if (pos != value.size()) throw ValidationError("");
    return v;
  } catch (const std::exception&) {
    throw ValidationError("config: key '" + key + "' expects an integer, got '" + value + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    if (!value.empty() && value[0] == '-') throw ValidationError("");
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(value, &pos);
    if (pos != value.size()) throw ValidationError("");
    return v;
  } catch (const std::exception&) {
    throw ValidationError("config: key '" + key + "' expects a nonnegative integer, got '" +
                          value + "'");
  }
}

double parse_real(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size() || !std::isfinite(v)) throw ValidationError("");
    return v;
  } catch (const std::exception&) {
    throw ValidationError("config: key '" + key + "' expects a finite real, got '" + value + "'");
  }
}

ExperimentKind parse_kind(const std::string& value) {
  if (value == "synthetic") return ExperimentKind::Synthetic;
  if (value == "toy") return ExperimentKind::Toy;
  if (value == "select_batches" || value == "select-batches") return ExperimentKind::SelectBatches;
  if (value == "histogram") return ExperimentKind::Histogram;
  if (value == "verify") return ExperimentKind::Verify;
  throw ValidationError("config: unknown experiment kind '" + value + "'");
}

Variant parse_variant(const std::string& value) {
  if (value == "full_batch_gd") return Variant::FullBatchGD;
  if (value == "all_ncb_gd") return Variant::AllNcBGD;
  if (value == "subset_gd") return Variant::SubsetGD;
  if (value == "sgd_with_replacement") return Variant::SGDWithReplacement;
  if (value == "sgd_without_replacement") return Variant::SGDWithoutReplacement;
  if (value == "osgd") return Variant::OSGD;
  if (value == "osgd_without_replacement") return Variant::OSGDWithoutReplacement;
  throw ValidationError("config: unknown optimizer variant '" + value + "'");
}

SubsetSpec parse_subset(const std::string& value) {
  if (value == "all_ncb") return SubsetSpec::AllNcB;
  if (value == "full_batch") return SubsetSpec::FullBatch;
  if (value == "partition") return SubsetSpec::Partition;
  if (value == "explicit") return SubsetSpec::ExplicitList;
  throw ValidationError("config: unknown subset spec '" + value + "'");
}

SelectorKind parse_selector(const std::string& value) {
  if (value == "random") return SelectorKind::Random;
  if (value == "sc") return SelectorKind::SC;
  if (value == "chunked_sc") return SelectorKind::ChunkedSC;
  throw ValidationError("config: unknown selector '" + value + "'");
}

std::vector<Batch> parse_batches(const std::string& value) {
  std::vector<Batch> out;
  if (trim(value).empty()) return out;
  for (const std::string& tuple : split(value, ';')) {
    Batch batch;
    for (const std::string& item : split(tuple, '-')) {
      const long long one_based = parse_int("batches", item);
      if (one_based < 1) throw ValidationError("config: batch indices are 1-based, got " + item);
      batch.push_back(static_cast<int>(one_based - 1));
    }
    out.push_back(std::move(batch));
  }
  return out;
}

const char* kind_token(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Synthetic: return "synthetic";
    case ExperimentKind::Toy: return "toy";
    case ExperimentKind::SelectBatches: return "select_batches";
    case ExperimentKind::Histogram: return "histogram";
    case ExperimentKind::Verify: return "verify";
  }
  return "synthetic";
}

const char* variant_token(Variant v) {
  switch (v) {
    case Variant::FullBatchGD: return "full_batch_gd";
    case Variant::AllNcBGD: return "all_ncb_gd";
    case Variant::SubsetGD: return "subset_gd";
    case Variant::SGDWithReplacement: return "sgd_with_replacement";
    case Variant::SGDWithoutReplacement: return "sgd_without_replacement";
    case Variant::OSGD: return "osgd";
    case Variant::OSGDWithoutReplacement: return "osgd_without_replacement";
  }
  return "full_batch_gd";
}

const char* subset_token(SubsetSpec s) {
  switch (s) {
    case SubsetSpec::AllNcB: return "all_ncb";
    case SubsetSpec::FullBatch: return "full_batch";
    case SubsetSpec::Partition: return "partition";
    case SubsetSpec::ExplicitList: return "explicit";
  }
  return "partition";
}

const char* selector_token(SelectorKind s) {
  switch (s) {
    case SelectorKind::Random: return "random";
    case SelectorKind::SC: return "sc";
    case SelectorKind::ChunkedSC: return "chunked_sc";
  }
  return "sc";
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  while (std::getline(in, raw)) {
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw = raw.substr(0, hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ValidationError("config: malformed section header '" + line + "'");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "experiment" && section != "optimizer" && section != "subset" &&
          section != "selector" && section != "toy" && section != "histogram")
        throw ValidationError("config: unknown section '" + section + "'");
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config: expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty())
      throw ValidationError("config: key '" + key + "' appears before any section header");

    if (section == "experiment") {
      if (key == "kind") cfg.kind = parse_kind(value);
      else if (key == "n") cfg.n = static_cast<int>(parse_int(key, value));
      else if (key == "d") cfg.d = static_cast<int>(parse_int(key, value));
      else if (key == "b") cfg.b = static_cast<int>(parse_int(key, value));
      else if (key == "seeds") {
        cfg.seeds.clear();
        for (const std::string& item : split(value, ','))
          cfg.seeds.push_back(parse_u64(key, item));
      } else if (key == "output_dir") cfg.output_dir = value;
      else throw ValidationError("config: unknown key '" + key + "' in [experiment]");
    } else if (section == "optimizer") {
      if (key == "variant") cfg.optimizer.variant = parse_variant(value);
      else if (key == "eta") {
        cfg.optimizer.eta.clear();
        for (const std::string& item : split(value, ','))
          cfg.optimizer.eta.push_back(parse_real(key, item));
      } else if (key == "steps") cfg.optimizer.steps = static_cast<int>(parse_int(key, value));
      else if (key == "k") cfg.optimizer.k = static_cast<int>(parse_int(key, value));
      else if (key == "q") cfg.optimizer.q = static_cast<int>(parse_int(key, value));
      else if (key == "cap") cfg.optimizer.enumeration_cap = parse_u64(key, value);
      else throw ValidationError("config: unknown key '" + key + "' in [optimizer]");
    } else if (section == "subset") {
      if (key == "spec") cfg.subset_spec = parse_subset(value);
      else if (key == "batches") cfg.explicit_batches = parse_batches(value);
      else throw ValidationError("config: unknown key '" + key + "' in [subset]");
    } else if (section == "selector") {
      if (key == "kind") cfg.selector = parse_selector(value);
      else if (key == "chunk_k") cfg.chunk_k = static_cast<int>(parse_int(key, value));
      else throw ValidationError("config: unknown key '" + key + "' in [selector]");
    } else if (section == "toy") {
      if (key == "epsilon") cfg.toy.epsilon = parse_real(key, value);
      else if (key == "eta") cfg.toy.eta = parse_real(key, value);
      else if (key == "rho") cfg.toy.rho = parse_real(key, value);
      else if (key == "max_steps") cfg.toy.max_steps = parse_int(key, value);
      else throw ValidationError("config: unknown key '" + key + "' in [toy]");
    } else {  // histogram
      if (key == "bins") cfg.histogram_bins = static_cast<int>(parse_int(key, value));
      else throw ValidationError("config: unknown key '" + key + "' in [histogram]");
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  return parse_config_text(read_file(path));
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "[experiment]\n";
  out << "kind = " << kind_token(cfg.kind) << "\n";
  out << "n = " << cfg.n << "\n";
  out << "d = " << cfg.d << "\n";
  out << "b = " << cfg.b << "\n";
  out << "seeds = ";
  for (std::size_t i = 0; i < cfg.seeds.size(); ++i)
    out << (i ? "," : "") << cfg.seeds[i];
  out << "\n";
  out << "output_dir = " << cfg.output_dir << "\n";
  out << "\n[optimizer]\n";
  out << "variant = " << variant_token(cfg.optimizer.variant) << "\n";
  out << "eta = ";
  for (std::size_t i = 0; i < cfg.optimizer.eta.size(); ++i)
    out << (i ? "," : "") << format_double(cfg.optimizer.eta[i]);
  out << "\n";
  out << "steps = " << cfg.optimizer.steps << "\n";
  out << "k = " << cfg.optimizer.k << "\n";
  out << "q = " << cfg.optimizer.q << "\n";
  out << "cap = " << cfg.optimizer.enumeration_cap << "\n";
  out << "\n[subset]\n";
  out << "spec = " << subset_token(cfg.subset_spec) << "\n";
  out << "batches = ";
  for (std::size_t i = 0; i < cfg.explicit_batches.size(); ++i)
    out << (i ? ";" : "") << batch_tuple_1based(cfg.explicit_batches[i]);
  out << "\n";
  out << "\n[selector]\n";
  out << "kind = " << selector_token(cfg.selector) << "\n";
  out << "chunk_k = " << cfg.chunk_k << "\n";
  out << "\n[toy]\n";
  out << "epsilon = " << format_double(cfg.toy.epsilon) << "\n";
  out << "eta = " << format_double(cfg.toy.eta) << "\n";
  out << "rho = " << format_double(cfg.toy.rho) << "\n";
  out << "max_steps = " << cfg.toy.max_steps << "\n";
  out << "\n[histogram]\n";
  out << "bins = " << cfg.histogram_bins << "\n";
  return out.str();
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  const std::string text = serialize_config(cfg);
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.n < 1 || cfg.d < 1 || cfg.b < 1)
    throw ValidationError("config: n, d, b must be positive");
  if (cfg.seeds.empty()) throw ValidationError("config: seed list must be nonempty");
  if (cfg.output_dir.empty()) throw ValidationError("config: output_dir must be nonempty");
  if (cfg.optimizer.steps < 1) throw ValidationError("config: steps must be >= 1");
  if (cfg.optimizer.eta.empty()) throw ValidationError("config: eta list must be nonempty");
  for (double e : cfg.optimizer.eta)
    if (!std::isfinite(e) || e < 0.0)
      throw ValidationError("config: eta entries must be finite and nonnegative");
  if (cfg.optimizer.k < 1 || cfg.optimizer.q < 1)
    throw ValidationError("config: k and q must be positive");
  if (cfg.optimizer.q > cfg.optimizer.k) throw ValidationError("config: q must not exceed k");
  if (cfg.chunk_k < 1) throw ValidationError("config: chunk_k must be positive");
  if (cfg.histogram_bins < 1) throw ValidationError("config: bins must be positive");
  if (cfg.toy.epsilon <= 0.0 || cfg.toy.eta <= 0.0 || cfg.toy.rho <= 0.0)
    throw ValidationError("config: toy parameters must be positive");
  if (cfg.toy.max_steps < 1) throw ValidationError("config: toy max_steps must be >= 1");
  if (cfg.subset_spec == SubsetSpec::ExplicitList) {
    if (cfg.explicit_batches.empty())
      throw ValidationError("config: explicit subset requires a batch list");
    for (const Batch& batch : cfg.explicit_batches) {
      validate_batch(batch, cfg.n, 2);
      if (static_cast<int>(batch.size()) != cfg.b)
        throw ValidationError("config: explicit batches must have size b");
    }
  }
}

}  // namespace contrastive
