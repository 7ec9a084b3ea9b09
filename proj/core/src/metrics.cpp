#include "hsifuse/metrics.hpp"

#include <cmath>

#include "hsifuse/nn/loss.hpp"

namespace hsifuse {

void ConfusionTable::accumulate(const LabelGrid& pred, const LabelGrid& truth) {
  require(pred.h == truth.h && pred.w == truth.w,
          "confusion: prediction/truth shape mismatch");
  for (std::size_t i = 0; i < pred.data.size(); ++i) {
    const int p = pred.data[i];
    const int t = truth.data[i];
    if (p == t) {
      ++tp[p];
    } else {
      ++fp[p];
      ++fn[t];
    }
  }
}

void ConfusionTable::merge(const ConfusionTable& other) {
  for (int l = 0; l < num_classes(); ++l) {
    tp[l] += other.tp[l];
    fp[l] += other.fp[l];
    fn[l] += other.fn[l];
  }
}

std::vector<std::optional<double>> class_iou(const ConfusionTable& acc) {
  std::vector<std::optional<double>> iou(acc.num_classes());
  for (int l = 0; l < acc.num_classes(); ++l) {
    const auto denom = acc.tp[l] + acc.fp[l] + acc.fn[l];
    if (denom > 0)
      iou[l] = static_cast<double>(acc.tp[l]) / static_cast<double>(denom);
  }
  return iou;
}

double mean_iou(const std::vector<std::optional<double>>& iou) {
  double sum = 0.0;
  int n = 0;
  for (const auto& v : iou)
    if (v) {
      sum += *v;
      ++n;
    }
  return n > 0 ? sum / n : 0.0;
}

void GDiceAccumulator::add(const nn::Tensor& prob, const LabelGrid& truth) {
  const int L = static_cast<int>(r_sum_.size());
  require(prob.ch == L, "gdice: class count mismatch");
  require(prob.h == truth.h && prob.w == truth.w, "gdice: shape mismatch");
  const std::size_t plane = static_cast<std::size_t>(prob.h) * prob.w;
  for (std::size_t i = 0; i < plane; ++i) {
    double sum = 0.0;
    for (int l = 0; l < L; ++l)
      sum += prob.v[static_cast<std::size_t>(l) * plane + i];
    require(std::abs(sum - 1.0) <= 1e-4,
            "gdice: per-pixel probabilities must sum to 1");
    const int t = truth.data[i];
    require(t < L, "gdice: label >= L");
    r_sum_[t] += 1.0;
    for (int l = 0; l < L; ++l) {
      const double p = prob.v[static_cast<std::size_t>(l) * plane + i];
      p_sum_[l] += p;
      if (l == t) rp_sum_[l] += p;
    }
  }
}

double GDiceAccumulator::value() const {
  const int L = static_cast<int>(r_sum_.size());
  double numer = 0.0, denom = 0.0;
  for (int l = 0; l < L; ++l) {
    if (r_sum_[l] <= 0.0) continue;  // absent class: weight 0
    const double w = 1.0 / (r_sum_[l] * r_sum_[l]);
    numer += w * rp_sum_[l];
    denom += w * (r_sum_[l] + p_sum_[l]);
  }
  return denom > 0.0 ? 2.0 * numer / denom : 0.0;
}

double gdice(const std::vector<nn::Tensor>& probs,
             const std::vector<LabelGrid>& truths, int L) {
  require(probs.size() == truths.size(), "gdice: sample count mismatch");
  GDiceAccumulator acc(L);
  for (std::size_t i = 0; i < probs.size(); ++i) acc.add(probs[i], truths[i]);
  return acc.value();
}

EvalReport evaluate_model(const nn::Checkpoint& ckpt, const PairDataset& ds_test) {
  require(ds_test.split == Split::Test, "evaluate_model expects the test split");
  const int L = static_cast<int>(ds_test.class_names.size());
  require(ckpt.num_classes == L, "checkpoint class count does not match dataset");
  if (ckpt.kind == nn::ModelKind::Siamese) {
    require(ckpt.selection.selected == ds_test.selection.selected,
            "checkpoint band selection does not match dataset");
  }

  nn::Predictor predictor(ckpt);
  ConfusionTable confusion(L);
  GDiceAccumulator dice(L);
  for (const auto& sample : ds_test.samples) {
    const auto pred = predictor.predict(sample);
    confusion.accumulate(pred.labels.data, sample.T.data);
    dice.add(nn::softmax(pred.logits), sample.T.data);
  }

  EvalReport report;
  report.model = nn::model_kind_name(ckpt.kind);
  report.class_names = ds_test.class_names;
  report.iou = class_iou(confusion);
  report.gdice = dice.value();
  report.sample_count = static_cast<int>(ds_test.samples.size());
  report.dataset_split = "test";
  return report;
}

std::vector<SweepRow> run_sweep(const Scene& scene, const BandSelection& sel,
                                const std::vector<nn::Checkpoint>& models,
                                const SweepGrid& grid,
                                const std::vector<TileSpec>& test_tiles,
                                std::uint64_t seed) {
  require(!grid.gammas.empty() && !grid.A_levels.empty() &&
              !grid.contrast_flags.empty(),
          "sweep grid is empty");
  require(!models.empty(), "sweep needs at least one checkpoint");
  require(!test_tiles.empty(), "sweep needs test tiles");

  std::vector<SweepRow> rows;
  for (const double gamma : grid.gammas) {
    for (const double A : grid.A_levels) {
      for (const bool contrast : grid.contrast_flags) {
        const std::string cell_id = "gamma=" + std::to_string(gamma) +
                                    ",A=" + std::to_string(A) +
                                    ",contrast=" + (contrast ? "Y" : "N");
        try {
          ScatteringConfig scatter;
          scatter.A = A;
          scatter.beta = grid.beta;
          scatter.d_max = grid.d_max;
          const EffectChain chain =
              make_chain(true, gamma, contrast, grid.contrast_cfg, true,
                         scatter, seed);
          const PairDataset cell_ds =
              build_pairs(scene, test_tiles, sel, chain, seed, Split::Test);
          for (const auto& ckpt : models) {
            const EvalReport report = evaluate_model(ckpt, cell_ds);
            SweepRow row;
            row.model = report.model;
            row.gamma = gamma;
            row.A = A;
            row.contrast = contrast;
            row.gdice = report.gdice;
            row.iou = report.iou;
            rows.push_back(row);
          }
        } catch (const std::exception& e) {
          throw std::runtime_error("sweep cell [" + cell_id +
                                   "] failed: " + e.what());
        }
      }
    }
  }
  return rows;
}

}  // namespace hsifuse
