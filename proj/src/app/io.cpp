#include "blowup/io.hpp"

#include <cmath>
#include <cstdio>

#include "blowup/error.hpp"

namespace blowup::io {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0.0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string config_hash(const Json& config) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : config.dump()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::ofstream open_or_fail(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorKind::config, "cannot write " + path.string());
  return out;
}

}  // namespace

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::string& hash, const std::vector<std::string>& header)
    : out_(open_or_fail(path)), columns_(header.size()) {
  out_ << "# config_hash=" << hash << '\n';
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << '\n';
}

void CsvWriter::row(const std::vector<Field>& fields) {
  if (fields.size() != columns_) fail(ErrorKind::size, "CsvWriter: row width does not match the header");
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, double>) {
            out_ << format_double(v);
          } else if constexpr (std::is_same_v<T, bool>) {
            out_ << (v ? "true" : "false");
          } else if constexpr (std::is_same_v<T, std::string>) {
            out_ << quote(v);
          } else {
            out_ << v;
          }
        },
        fields[i]);
  }
  out_ << '\n';
}

void write_json(const std::filesystem::path& path, Json doc, const std::string& hash) {
  doc["config_hash"] = hash;
  std::ofstream out = open_or_fail(path);
  out << doc.dump(2) << '\n';
}

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorKind::config, "cannot create output directory " + dir.string() + ": " + ec.message());
}

}  // namespace blowup::io
