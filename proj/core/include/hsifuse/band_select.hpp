#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "hsifuse/scene.hpp"

namespace hsifuse {

// The fiber technique: pixel spectra become labeled length-C series, a seeded
// sample of n of them is scored per channel for class informativeness, the 12
// best-spaced channels are picked and refined to 6, and the selection is
// validated by nearest-class-mean reconstruction of the whole scene.

struct LabeledSeries {
  std::vector<double> values;  // length C, values in [0,1]
  int label = 0;
  std::string scene_name;
  int x = 0;
  int y = 0;
};

struct SeriesCollection {
  std::vector<LabeledSeries> series;
  int C = 0;
  int L = 0;
};

struct ChannelScores {
  std::vector<double> score;  // length C, finite, >= 0
};

struct BandSelection {
  std::vector<int> candidates;                  // 12 distinct indices
  std::vector<int> selected;                    // 6 strictly increasing indices
  std::vector<std::vector<double>> class_means; // [L][6], values in [0,1]
  std::uint64_t source_seed = 0;
  std::string scene_name;
};

// Pixel region as an explicit ordered coordinate list.
struct PixelRegion {
  std::vector<std::pair<int, int>> pixels;  // (x, y)
};

PixelRegion full_region(const Scene& scene);
// Columns [x_lo, x_hi), all rows.
PixelRegion column_region(const Scene& scene, int x_lo, int x_hi);

SeriesCollection pixels_to_series(const Scene& scene, const PixelRegion& region);

// Uniform sample of size n without replacement, stratified so every class
// present in coll keeps at least one series. Deterministic given seed; kept in
// original collection order.
SeriesCollection sample_series(const SeriesCollection& coll, int n, std::uint64_t seed);

// Fisher-ratio informativeness per channel: between-class variance of the
// per-class means over (pooled within-class variance + 1e-8).
ChannelScores score_timestamps(const SeriesCollection& coll);

// Greedy top-k by score under a minimum index spacing of 2, relaxed to 1 then
// 0 if k is otherwise unreachable. Ties break toward the lower index. Sorted
// ascending.
std::vector<int> select_informative(const ChannelScores& scores, int k,
                                    int min_spacing = 2);

// Drops spectrum-edge candidates (outer 10%) whose class-averaged intensity is
// below 0.05, keeps the 6 best-scoring survivors, backfills by score if the
// filter was too aggressive.
std::vector<int> refine_channels(const std::vector<int>& candidates,
                                 const SeriesCollection& coll,
                                 const ChannelScores& scores);

std::vector<std::vector<double>> class_mean_signatures(const SeriesCollection& coll,
                                                       const std::vector<int>& selected);

// X_i = MC(Y_i): restrict the full band stack to the selected 6.
SubCube apply_band_selection(const SubCube& sub, const BandSelection& sel);

struct Reconstruction {
  LabelGrid labels;
  double accuracy = 0.0;
};

// Nearest-class-mean classification of every pixel in the 6-band space;
// Euclidean distance, ties toward the lower class index.
Reconstruction reconstruct_segmentation(const Scene& scene, const BandSelection& sel);

// End-to-end fit on a pixel region: series -> sample(n) -> score -> 12 -> 6
// -> signatures.
BandSelection fit_band_selection(const Scene& scene, const PixelRegion& region,
                                 int n, int k_candidates, std::uint64_t seed);

void save_band_selection(const BandSelection& sel, const std::filesystem::path& path);
BandSelection load_band_selection(const std::filesystem::path& path);

}  // namespace hsifuse
