#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hsifuse/dataset.hpp"
#include "hsifuse/nn/checkpoint.hpp"
#include "hsifuse/nn/tensor.hpp"

namespace hsifuse {

// Per-class confusion counts aggregated over a sample set; additive under
// dataset union.
struct ConfusionTable {
  std::vector<std::uint64_t> tp, fp, fn;

  explicit ConfusionTable(int L) : tp(L, 0), fp(L, 0), fn(L, 0) {}
  int num_classes() const { return static_cast<int>(tp.size()); }

  void accumulate(const LabelGrid& pred, const LabelGrid& truth);
  void merge(const ConfusionTable& other);
};

// IOU_l = TP / (TP + FP + FN); classes with empty denominator come back as
// nullopt (absent) rather than 0.
std::vector<std::optional<double>> class_iou(const ConfusionTable& acc);

double mean_iou(const std::vector<std::optional<double>>& iou);

// Generalized Dice over predicted probabilities with inverse-squared-volume
// class weights; absent classes get weight 0.
class GDiceAccumulator {
 public:
  explicit GDiceAccumulator(int L)
      : r_sum_(L, 0.0), p_sum_(L, 0.0), rp_sum_(L, 0.0) {}

  // prob holds per-pixel class probabilities; throws if any pixel's
  // probabilities deviate from summing to 1 by more than 1e-4.
  void add(const nn::Tensor& prob, const LabelGrid& truth);
  double value() const;

 private:
  std::vector<double> r_sum_, p_sum_, rp_sum_;
};

// One-call version for a single prediction/truth set.
double gdice(const std::vector<nn::Tensor>& probs,
             const std::vector<LabelGrid>& truths, int L);

struct EvalReport {
  std::string model;
  std::vector<std::string> class_names;
  std::vector<std::optional<double>> iou;  // per class; nullopt = absent
  double gdice = 0.0;
  int sample_count = 0;
  std::string dataset_split;
};

EvalReport evaluate_model(const nn::Checkpoint& ckpt, const PairDataset& ds_test);

struct SweepGrid {
  std::vector<double> gammas = {1.0, 2.0, 3.0, 4.0};
  std::vector<double> A_levels = {0.6, 0.8, 0.95};
  std::vector<bool> contrast_flags = {false};
  double beta = 0.1;
  double d_max = 10.0;
  ContrastConfig contrast_cfg;
};

struct SweepRow {
  std::string model;
  double gamma = 1.0;
  double A = 0.8;
  bool contrast = false;
  double gdice = 0.0;
  std::vector<std::optional<double>> iou;
};

// For every grid cell, rebuilds the degraded test set from the clean scene
// and evaluates each checkpoint; one row per (cell, model). A cell failure
// aborts with the cell identity in the message.
std::vector<SweepRow> run_sweep(const Scene& scene, const BandSelection& sel,
                                const std::vector<nn::Checkpoint>& models,
                                const SweepGrid& grid,
                                const std::vector<TileSpec>& test_tiles,
                                std::uint64_t seed);

}  // namespace hsifuse
