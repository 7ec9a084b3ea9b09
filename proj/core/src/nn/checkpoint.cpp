#include "hsifuse/nn/checkpoint.hpp"

#include <algorithm>

#include "hsifuse/io_util.hpp"
#include "hsifuse/nn/loss.hpp"
#include "json.hpp"

namespace hsifuse::nn {

namespace fs = std::filesystem;
using nlohmann::json;

void save_checkpoint(const Checkpoint& ckpt, const fs::path& dir) {
  fs::create_directories(dir);

  json params = json::array();
  std::size_t offset = 0;
  for (const auto& spec : ckpt.param_specs) {
    params.push_back({{"name", spec.name},
                      {"shape", spec.shape},
                      {"offset", offset * sizeof(float)}});
    offset += spec.count;
  }
  require(offset == ckpt.param_values.size(),
          "checkpoint specs do not cover the value payload");

  json j;
  j["model"] = model_kind_name(ckpt.kind);
  j["num_classes"] = ckpt.num_classes;
  j["class_names"] = ckpt.class_names;
  j["train_config"] = {{"learning_rate", ckpt.config.learning_rate},
                       {"batch_size", ckpt.config.batch_size},
                       {"epochs", ckpt.config.epochs},
                       {"seed", ckpt.config.seed},
                       {"focal_gamma", ckpt.config.focal_gamma},
                       {"model", model_kind_name(ckpt.config.kind)},
                       {"threads", ckpt.config.threads}};
  j["selection"] = {{"candidates", ckpt.selection.candidates},
                    {"selected", ckpt.selection.selected},
                    {"class_means", ckpt.selection.class_means},
                    {"seed", ckpt.selection.source_seed},
                    {"scene_name", ckpt.selection.scene_name}};
  j["loss_trace"] = ckpt.loss_trace;
  j["params"] = params;
  io::write_text(dir / "checkpoint.json", j.dump(2) + "\n");

  std::vector<float> payload(ckpt.param_values.size());
  for (std::size_t i = 0; i < payload.size(); ++i)
    payload[i] = static_cast<float>(ckpt.param_values[i]);
  io::write_f32(dir / "params.f32", payload);
}

Checkpoint load_checkpoint(const fs::path& dir) {
  const json j = json::parse(io::read_text(dir / "checkpoint.json"));

  Checkpoint ckpt;
  ckpt.kind = model_kind_from_name(j.at("model").get<std::string>());
  ckpt.num_classes = j.at("num_classes").get<int>();
  ckpt.class_names = j.at("class_names").get<std::vector<std::string>>();
  const auto& tc = j.at("train_config");
  ckpt.config.learning_rate = tc.at("learning_rate").get<double>();
  ckpt.config.batch_size = tc.at("batch_size").get<int>();
  ckpt.config.epochs = tc.at("epochs").get<int>();
  ckpt.config.seed = tc.at("seed").get<std::uint64_t>();
  ckpt.config.focal_gamma = tc.at("focal_gamma").get<double>();
  ckpt.config.kind = model_kind_from_name(tc.at("model").get<std::string>());
  ckpt.config.threads = tc.at("threads").get<int>();
  const auto& selj = j.at("selection");
  ckpt.selection.candidates = selj.at("candidates").get<std::vector<int>>();
  ckpt.selection.selected = selj.at("selected").get<std::vector<int>>();
  ckpt.selection.class_means =
      selj.at("class_means").get<std::vector<std::vector<double>>>();
  ckpt.selection.source_seed = selj.at("seed").get<std::uint64_t>();
  ckpt.selection.scene_name = selj.at("scene_name").get<std::string>();
  ckpt.loss_trace = j.at("loss_trace").get<std::vector<double>>();

  std::size_t total = 0;
  for (const auto& pj : j.at("params")) {
    ParamSpec spec;
    spec.name = pj.at("name").get<std::string>();
    spec.shape = pj.at("shape").get<std::vector<int>>();
    spec.count = 1;
    for (const int d : spec.shape) spec.count *= static_cast<std::size_t>(d);
    require(pj.at("offset").get<std::size_t>() == total * sizeof(float),
            "checkpoint param offsets are inconsistent");
    total += spec.count;
    ckpt.param_specs.push_back(spec);
  }

  const auto payload = io::read_f32(dir / "params.f32", total);
  ckpt.param_values.assign(payload.begin(), payload.end());
  return ckpt;
}

Predictor::Predictor(const Checkpoint& ckpt)
    : kind_(ckpt.kind), L_(ckpt.num_classes) {
  net_ = make_network(kind_, ps_, L_);

  // The network registers its parameters in a fixed order; the checkpoint
  // must describe exactly that layout.
  require(ps_.count() == static_cast<int>(ckpt.param_specs.size()),
          "checkpoint parameter count does not match architecture");
  for (int h = 0; h < ps_.count(); ++h) {
    require(ps_.spec(h).name == ckpt.param_specs[h].name &&
                ps_.spec(h).shape == ckpt.param_specs[h].shape,
            "checkpoint parameter " + ckpt.param_specs[h].name +
                " does not match architecture");
  }
  ps_.unflatten(ckpt.param_values);
}

Predictor::Prediction Predictor::predict(const SamplePair& pair) {
  const Tensor X = from_grid(pair.X.data);
  const Tensor Z = from_grid(pair.Z.data);
  Prediction out;
  out.logits = net_->forward(X, Z, ps_);
  out.labels.data = argmax_labels(out.logits);
  return out;
}

Predictor::Prediction predict(const Checkpoint& ckpt, const SamplePair& pair) {
  Predictor p(ckpt);
  return p.predict(pair);
}

}  // namespace hsifuse::nn
