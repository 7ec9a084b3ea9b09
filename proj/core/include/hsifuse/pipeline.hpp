#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hsifuse/band_select.hpp"
#include "hsifuse/dataset.hpp"
#include "hsifuse/degrade.hpp"
#include "hsifuse/metrics.hpp"
#include "hsifuse/nn/checkpoint.hpp"
#include "hsifuse/render.hpp"

namespace hsifuse {

// One JSON config drives every command; CLI flags override individual keys.
struct FiberConfig {
  int n = 200;
  int candidates = 12;
  int final_bands = 6;
  std::uint64_t seed = 11;
};

struct DatasetConfig {
  int train_stride = 8;
  int test_stride = 16;  // informational; the split thins test tiles to 16
  double test_fraction = 0.2;
  std::uint64_t seed = 22;
};

struct ChainConfig {
  bool low_light_enabled = false;
  double gamma = 3.0;
  bool contrast_enabled = false;
  ContrastConfig contrast;
  bool scattering_enabled = true;
  ScatteringConfig scattering;
  std::uint64_t seed = 33;

  EffectChain to_chain() const;
};

struct RunConfig {
  std::filesystem::path scene_dir;
  std::filesystem::path out_dir = "runs/out";
  FiberConfig fiber;
  DatasetConfig dataset;
  ChainConfig chain;
  nn::TrainConfig train;
  SweepGrid sweep;
};

RunConfig load_run_config(const std::filesystem::path& json_path);
void save_run_config(const RunConfig& cfg, const std::filesystem::path& json_path);

// select-bands: fit on training-region pixels, write bands.json +
// selection_report.json + reconstruction.u8/.ppm. Returns the selection.
BandSelection cmd_select_bands(const RunConfig& cfg);

// build: write <out>/dataset_train and <out>/dataset_test.
struct BuildResult {
  std::filesystem::path train_dir;
  std::filesystem::path test_dir;
  int n_train = 0;
  int n_test = 0;
};
BuildResult cmd_build(const RunConfig& cfg);

// train: write <out>/ckpt_<kind>/ + loss_trace.csv. Returns checkpoint dir.
std::filesystem::path cmd_train(const RunConfig& cfg, nn::ModelKind kind);

// eval: one report JSON per checkpoint + comparison.csv (rows = models,
// columns = per-class mIOU + gDice) + a predicted-label map per model.
std::vector<EvalReport> cmd_eval(const RunConfig& cfg,
                                 const std::vector<std::filesystem::path>& ckpts);

// sweep: sweep.csv + gdice.svg + miou.svg across the config grid.
std::vector<SweepRow> cmd_sweep(const RunConfig& cfg,
                                const std::vector<std::filesystem::path>& ckpts);

// render: ground-truth or predicted label map to PPM.
void cmd_render(const std::filesystem::path& scene_dir,
                const std::optional<std::filesystem::path>& labels_u8,
                const std::filesystem::path& out_ppm,
                const std::optional<CropBox>& crop = std::nullopt);

// ingest: raw directory (meta.json without band stats + cube.f32 + labels.u8)
// to a normalized scene directory.
void cmd_ingest(const std::filesystem::path& raw_dir,
                const std::filesystem::path& scene_dir);

}  // namespace hsifuse
