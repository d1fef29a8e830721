#pragma once

#include <string>
#include <utility>
#include <vector>

#include "contrastive/optim.hpp"
#include "contrastive/types.hpp"

namespace contrastive {

// Shortest round-trip decimal form (%.17g); rejects non-finite values.
std::string format_double(double x);

// Comma-separated numeric grid, one newline-terminated row per matrix row.
std::string gram_csv(const Matrix& g);

// Header "step,full_loss,oracle_dist,batches"; batches is a semicolon-joined
// list of 1-based dash-joined index tuples.
std::string trace_csv(const RunTrace& t);

// One batch per line, 1-based comma-separated members.
std::string batches_csv(const BatchCollection& coll);

// Header "bin_lower,count".
std::string histogram_csv(const std::vector<std::pair<double, long>>& h);

// "1-2" style 1-based tuple.
std::string batch_tuple_1based(const Batch& b);

void write_file(const std::string& path, const std::string& body);

std::string read_file(const std::string& path);

// Numeric grid reader for round-trip checks.
Matrix read_csv_matrix(const std::string& path);

}  // namespace contrastive
