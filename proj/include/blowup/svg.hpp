#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace blowup::svg {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  /// Markers instead of a polyline.
  bool points = false;
};

struct Plot {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  bool log_x = false;
  bool log_y = false;
  std::vector<Series> series;
};

/// Static line/scatter plot. Returns false instead of throwing on any failure.
bool write_plot(const std::filesystem::path& path, const Plot& plot, const std::string& hash) noexcept;

}  // namespace blowup::svg
