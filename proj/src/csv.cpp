#include "contrastive/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "contrastive/errors.hpp"

namespace contrastive {

std::string format_double(double x) {
  if (!std::isfinite(x)) throw NumericError("format_double: non-finite value");
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string gram_csv(const Matrix& g) {
  std::string out;
  for (int i = 0; i < g.rows(); ++i) {
    for (int j = 0; j < g.cols(); ++j) {
      if (j) out += ',';
      out += format_double(g(i, j));
    }
    out += '\n';
  }
  return out;
}

std::string batch_tuple_1based(const Batch& b) {
  std::string out;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (i) out += '-';
    out += std::to_string(b[i] + 1);
  }
  return out;
}

std::string trace_csv(const RunTrace& t) {
  std::string out = "step,full_loss,oracle_dist,batches\n";
  for (const TraceRecord& rec : t.records) {
    out += std::to_string(rec.step);
    out += ',';
    out += format_double(rec.full_loss);
    out += ',';
    out += format_double(rec.oracle_dist);
    out += ',';
    for (std::size_t i = 0; i < rec.selected_batches.size(); ++i) {
      if (i) out += ';';
      out += batch_tuple_1based(rec.selected_batches[i]);
    }
    out += '\n';
  }
  return out;
}

std::string batches_csv(const BatchCollection& coll) {
  std::string out;
  for (const Batch& batch : coll.batches) {
    for (std::size_t i = 0; i < batch.size(); ++i) {
      if (i) out += ',';
      out += std::to_string(batch[i] + 1);
    }
    out += '\n';
  }
  return out;
}

std::string histogram_csv(const std::vector<std::pair<double, long>>& h) {
  std::string out = "bin_lower,count\n";
  for (const auto& [lower, count] : h) {
    out += format_double(lower);
    out += ',';
    out += std::to_string(count);
    out += '\n';
  }
  return out;
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
  out.flush();
  if (!out) throw IoError("write failed: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path);
  return buf.str();
}

Matrix read_csv_matrix(const std::string& path) {
  const std::string body = read_file(path);
  std::vector<std::vector<double>> rows;
  std::istringstream in(body);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      try {
        std::size_t pos = 0;
        row.push_back(std::stod(cell, &pos));
        if (pos != cell.size()) throw ValidationError("");
      } catch (const std::exception&) {
        throw ValidationError("csv: non-numeric cell '" + cell + "' in " + path);
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw ValidationError("csv: ragged rows in " + path);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ValidationError("csv: no rows in " + path);
  Matrix m(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

}  // namespace contrastive
