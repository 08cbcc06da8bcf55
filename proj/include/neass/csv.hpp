#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace neass {

using Cell = std::variant<std::string, double, std::int64_t>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
};

struct RunMetadata {
  int schema_version = 1;
  std::uint64_t hash = 0;
};

/// FNV-1a over the canonical config followed by the seed. Thread count is
/// deliberately excluded so runs differing only in parallelism hash equal.
std::uint64_t metadata_hash(const std::string& canonical_config, std::uint64_t seed);

/// `#schema_version=...,metadata_hash=...` line, header row, then data rows.
/// Reals use 17 significant digits; fields are quoted per RFC 4180.
std::string render_csv(const Table& table, const RunMetadata& meta);

/// Throws IoFailure for an empty table (no file is written) or a write error.
void export_csv(const Table& table, const std::string& path, const RunMetadata& meta);

}  // namespace neass
