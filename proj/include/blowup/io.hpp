#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace blowup::io {

using Json = nlohmann::json;

/// Shortest round-trip text for a double: 17 significant digits.
std::string format_double(double v);

/// 64-bit FNV-1a of the canonical dump (object keys sorted), as 16 hex digits.
std::string config_hash(const Json& config);

/// Comma-separated values with a "# config_hash=..." first line and a header row.
class CsvWriter {
 public:
  using Field = std::variant<double, long long, std::string, bool>;

  CsvWriter(const std::filesystem::path& path, const std::string& hash, const std::vector<std::string>& header);

  void row(const std::vector<Field>& fields);

 private:
  std::ofstream out_;
  std::size_t columns_;
};

/// Writes `doc` with a top-level "config_hash" member; JSON has no comments.
void write_json(const std::filesystem::path& path, Json doc, const std::string& hash);

/// Creates `dir` (and parents); throws a config error when that fails.
void ensure_directory(const std::filesystem::path& dir);

}  // namespace blowup::io
