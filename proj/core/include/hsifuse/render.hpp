#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hsifuse/grid.hpp"

namespace hsifuse {

struct Rgb8 {
  std::uint8_t r = 0, g = 0, b = 0;
  bool operator==(const Rgb8&) const = default;
};

// Class-name keyed colors; known material names get their conventional color,
// anything else draws from a distinct fallback cycle.
struct Palette {
  std::vector<std::string> class_names;
  std::vector<Rgb8> colors;

  static Palette for_classes(const std::vector<std::string>& names);
  const Rgb8& color(int class_index) const;
};

struct CropBox {
  int x = 0, y = 0, w = 0, h = 0;
};

// Lossless binary PPM (P6); label 255 renders black (void / not predicted).
void render_map(const LabelGrid& labels, const Palette& palette,
                const std::filesystem::path& out,
                const std::optional<CropBox>& crop = std::nullopt);

// Minimal static line chart (SVG): one polyline per series over shared
// x-values.
struct ChartSeries {
  std::string name;
  std::vector<double> values;
};

void write_line_chart(const std::filesystem::path& out, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<double>& x_values,
                      const std::vector<ChartSeries>& series,
                      double y_min = 0.0, double y_max = 1.0);

}  // namespace hsifuse
