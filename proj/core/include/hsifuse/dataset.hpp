#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hsifuse/band_select.hpp"
#include "hsifuse/degrade.hpp"
#include "hsifuse/scene.hpp"

namespace hsifuse {

// Tile enumeration, spatially leak-free splitting, degradation, and
// serialization of the paired HSI-RGB dataset.

struct TileSpec {
  int x = 0;
  int y = 0;
  int size = kTileSize;
  int stride = 8;
};

struct SampleMeta {
  int origin_x = 0;
  int origin_y = 0;
  std::uint64_t seed = 0;  // per-tile degradation seed
};

struct SamplePair {
  RgbTile Z;      // 3 x 16 x 16, degraded
  SubCube X;      // 6 x 8 x 8, selected bands, degraded
  LabelTile T;    // 16 x 16
  SampleMeta meta;
};

enum class Split { Train, Test };

struct PairDataset {
  std::vector<SamplePair> samples;
  Split split = Split::Train;
  std::string scene_name;
  std::vector<std::string> class_names;
  BandSelection selection;
  EffectChain chain;
  std::uint64_t build_seed = 0;
};

// All origins on the stride grid whose 16x16 footprint fits the scene,
// row-major.
std::vector<TileSpec> enumerate_tiles(const Scene& scene, int stride);

struct TileSplit {
  std::vector<TileSpec> train;
  std::vector<TileSpec> test;
  int split_column = 0;  // test footprints live in columns [split_column, Ws)
};

// Contiguous vertical blocks of 16 columns are assigned to test from the
// right until at least test_fraction of the tiles are covered; tiles
// straddling the boundary are dropped, and test tiles are thinned to the
// non-overlapping 16-stride grid.
TileSplit split_tiles(const std::vector<TileSpec>& tiles, const Scene& scene,
                      double test_fraction, std::uint64_t seed);

// Per tile: extract, derive RGB, box-downsample the cube to 8x8, apply the
// band selection, degrade with seed = chain.seed ^ tile_index, attach labels.
PairDataset build_pairs(const Scene& scene, const std::vector<TileSpec>& tiles,
                        const BandSelection& sel, const EffectChain& chain,
                        std::uint64_t seed, Split split);

// Replays one sample from its recorded meta; bit-identical to the build.
SamplePair rebuild_sample(const Scene& scene, const SampleMeta& meta,
                          const BandSelection& sel, const EffectChain& chain);

// Dataset directory: manifest.json + Z.f32 + X.f32 + T.u8 in manifest order
// with per-sample byte offsets recorded.
void save_dataset(const PairDataset& ds, const std::filesystem::path& dir);
PairDataset load_dataset(const std::filesystem::path& dir);

}  // namespace hsifuse
