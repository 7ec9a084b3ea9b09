#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hsifuse/grid.hpp"

namespace hsifuse {

// A full hyperspectral scene: C bands over Hs x Ws pixels, values normalized
// to [0,1], plus per-pixel material labels. Immutable after load; safe to
// share across workers.
struct Scene {
  std::string name;
  int C = 0;
  int Hs = 0;
  int Ws = 0;
  Grid3 cube;                               // [C][Hs][Ws], values in [0,1]
  LabelGrid labels;                         // [Hs][Ws], entries < L
  std::vector<std::string> class_names;     // size L
  std::optional<std::vector<double>> wavelengths_nm;  // size C, strictly increasing

  int num_classes() const { return static_cast<int>(class_names.size()); }
};

// Spatial window over all (or selected) bands, origin in scene coordinates.
struct SubCube {
  int bands = 0;
  int h = 0;
  int w = 0;
  Grid3 data;
  int origin_x = 0;
  int origin_y = 0;
};

struct RgbTile {
  Grid3 data;  // [3][16][16]
  int origin_x = 0;
  int origin_y = 0;
};

struct LabelTile {
  LabelGrid data;  // [16][16]
};

inline constexpr int kTileSize = 16;

// Scene directory: meta.json + cube.f32 (band-major row-major float32 LE)
// + labels.u8. Raw cube values are normalized per band on load using the
// stored band_min/band_max.
Scene load_scene(const std::filesystem::path& dir);

// Writes the in-memory (already normalized) scene; band_min/band_max are
// stored as 0/1 so that load(save(s)) is byte-identical.
void save_scene(const Scene& scene, const std::filesystem::path& dir);

// Conversion entry point for raw data: computes per-band min/max over the raw
// cube and writes a loadable scene directory with the raw payload.
void ingest_scene(const std::string& name, int C, int Hs, int Ws,
                  const std::vector<float>& raw_cube,
                  const std::vector<std::uint8_t>& labels,
                  const std::vector<std::string>& class_names,
                  const std::optional<std::vector<double>>& wavelengths_nm,
                  const std::filesystem::path& out_dir);

SubCube extract_subcube(const Scene& scene, int x, int y, int size);

LabelTile extract_labels(const Scene& scene, int x, int y, int size);

// Picks three bands as R,G,B. With known wavelengths, the bands nearest
// 650/550/450 nm; otherwise the given fallback indices (R,G,B order).
RgbTile derive_rgb(const SubCube& sub, const Scene& scene,
                   int fallback_r = 30, int fallback_g = 20, int fallback_b = 10);

// Box average over factor x factor blocks, per band.
SubCube spatial_downsample(const SubCube& sub, int factor);

}  // namespace hsifuse
