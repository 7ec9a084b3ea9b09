#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hsifuse {

// Dense band-major row-major raster, the shared layout for cubes and tiles.
struct Grid3 {
  int bands = 0;
  int h = 0;
  int w = 0;
  std::vector<float> data;  // size bands*h*w

  Grid3() = default;
  Grid3(int bands_, int h_, int w_, float fill = 0.0f)
      : bands(bands_), h(h_), w(w_),
        data(static_cast<std::size_t>(bands_) * h_ * w_, fill) {}

  float& at(int b, int y, int x) {
    return data[(static_cast<std::size_t>(b) * h + y) * w + x];
  }
  float at(int b, int y, int x) const {
    return data[(static_cast<std::size_t>(b) * h + y) * w + x];
  }

  std::size_t size() const { return data.size(); }

  bool same_shape(const Grid3& o) const {
    return bands == o.bands && h == o.h && w == o.w;
  }
};

// Class-index raster.
struct LabelGrid {
  int h = 0;
  int w = 0;
  std::vector<std::uint8_t> data;  // size h*w

  LabelGrid() = default;
  LabelGrid(int h_, int w_, std::uint8_t fill = 0)
      : h(h_), w(w_), data(static_cast<std::size_t>(h_) * w_, fill) {}

  std::uint8_t& at(int y, int x) {
    return data[static_cast<std::size_t>(y) * w + x];
  }
  std::uint8_t at(int y, int x) const {
    return data[static_cast<std::size_t>(y) * w + x];
  }
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::runtime_error(msg);
}

}  // namespace hsifuse
