#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "hsifuse/band_select.hpp"
#include "hsifuse/dataset.hpp"
#include "hsifuse/nn/model.hpp"

namespace hsifuse::nn {

struct TrainConfig {
  double learning_rate = 1e-3;
  int batch_size = 16;
  int epochs = 200;
  std::uint64_t seed = 1;
  double focal_gamma = 3.0;  // fixed at 3 for the reference setting
  ModelKind kind = ModelKind::Siamese;
  int threads = 1;  // 1 = fully sequential (reproducibility mode)
};

// Everything evaluation needs: parameters, their layout, the training recipe,
// and the band selection the dataset was built with.
struct Checkpoint {
  ModelKind kind = ModelKind::Siamese;
  int num_classes = 0;
  std::vector<std::string> class_names;
  TrainConfig config;
  BandSelection selection;
  std::vector<double> loss_trace;  // one entry per epoch
  std::vector<ParamSpec> param_specs;
  std::vector<double> param_values;  // flat, registration order
};

// Directory layout: checkpoint.json (manifest with names, shapes, byte
// offsets) + params.f32 (float32 little-endian payload).
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& dir);
Checkpoint load_checkpoint(const std::filesystem::path& dir);

// Rebuilds the network around a checkpoint for inference.
class Predictor {
 public:
  explicit Predictor(const Checkpoint& ckpt);

  // Logits plus argmax labels (ties toward the lower class index).
  struct Prediction {
    Tensor logits;       // L x 16 x 16
    LabelTile labels;    // 16 x 16
  };
  Prediction predict(const SamplePair& pair);

  int num_classes() const { return L_; }
  ModelKind kind() const { return kind_; }

 private:
  ModelKind kind_;
  int L_;
  ParamStore ps_;
  std::unique_ptr<Network> net_;
};

// One-shot convenience over Predictor.
Predictor::Prediction predict(const Checkpoint& ckpt, const SamplePair& pair);

}  // namespace hsifuse::nn
