#include "neass/csv.hpp"

#include "neass/config.hpp"
#include "neass/core.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace neass {

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size())
    throw Error(ErrorCode::ShapeMismatch, "row of " + std::to_string(row.size()) + " cells for " +
                                              std::to_string(columns.size()) + " columns in " + name);
  rows.push_back(std::move(row));
}

std::uint64_t metadata_hash(const std::string& canonical_config, std::uint64_t seed) {
  return fnv1a("seed=" + std::to_string(seed) + "\n", fnv1a(canonical_config));
}

namespace {

std::string quote(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string format_cell(const Cell& cell) {
  if (const auto* s = std::get_if<std::string>(&cell)) return quote(*s);
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return std::to_string(*i);
  const double x = std::get<double>(cell);
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::string render_csv(const Table& table, const RunMetadata& meta) {
  char head[96];
  std::snprintf(head, sizeof head, "#schema_version=%d,metadata_hash=%016" PRIx64 "\r\n", meta.schema_version,
                meta.hash);
  std::string out = head;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out += ',';
    out += quote(table.columns[c]);
  }
  out += "\r\n";
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += format_cell(row[c]);
    }
    out += "\r\n";
  }
  return out;
}

void export_csv(const Table& table, const std::string& path, const RunMetadata& meta) {
  if (table.rows.empty()) throw Error(ErrorCode::IoFailure, "refusing to write empty table " + table.name);
  const std::string text = render_csv(table, meta);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::IoFailure, "cannot open " + path);
  f << text;
  f.flush();
  if (!f) throw Error(ErrorCode::IoFailure, "write failed for " + path);
}

}  // namespace neass
