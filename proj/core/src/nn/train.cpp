#include "hsifuse/nn/train.hpp"

#include <cmath>
#include <numeric>
#include <thread>

#include "hsifuse/nn/loss.hpp"
#include "hsifuse/rng.hpp"

namespace hsifuse::nn {

namespace {

struct AdamState {
  std::vector<double> m, v;
  long step = 0;
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;

  explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}

  void update(std::vector<double>& params, const std::vector<double>& grad,
              double lr) {
    ++step;
    const double bc1 = 1.0 - std::pow(beta1, step);
    const double bc2 = 1.0 - std::pow(beta2, step);
    for (std::size_t i = 0; i < params.size(); ++i) {
      m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
      v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i];
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      params[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
  }
};

}  // namespace

Checkpoint train(const PairDataset& ds_train, const TrainConfig& cfg) {
  require(!ds_train.samples.empty(), "training dataset is empty");
  require(ds_train.split == Split::Train, "train() expects the train split");
  require(cfg.learning_rate > 0 && cfg.batch_size > 0 && cfg.epochs > 0,
          "train hyperparameters must be positive");

  const int L = static_cast<int>(ds_train.class_names.size());
  const int n_samples = static_cast<int>(ds_train.samples.size());
  const int n_threads = std::max(1, cfg.threads);

  ParamStore ps;
  auto net = make_network(cfg.kind, ps, L);
  init_params(ps, cfg.seed);

  // Per-worker replicas. Handles are indices into the registration sequence,
  // identical across stores, so every replica can run against the live ps.
  std::vector<std::unique_ptr<Network>> workers;
  std::vector<ParamStore> worker_stores(n_threads);
  workers.push_back(std::move(net));
  for (int t = 1; t < n_threads; ++t)
    workers.push_back(make_network(cfg.kind, worker_stores[t], L));

  // Input tensors are fixed; convert once.
  std::vector<Tensor> Xs(n_samples), Zs(n_samples);
  for (int i = 0; i < n_samples; ++i) {
    Xs[i] = from_grid(ds_train.samples[i].X.data);
    Zs[i] = from_grid(ds_train.samples[i].Z.data);
  }

  AdamState adam(ps.total_scalars());
  std::vector<double> flat = ps.flatten();

  std::vector<Grads> sample_grads;
  sample_grads.reserve(cfg.batch_size);
  for (int i = 0; i < cfg.batch_size; ++i) sample_grads.emplace_back(ps);
  std::vector<double> sample_loss(cfg.batch_size, 0.0);

  std::vector<int> order(n_samples);
  std::iota(order.begin(), order.end(), 0);

  Checkpoint ckpt;
  ckpt.kind = cfg.kind;
  ckpt.num_classes = L;
  ckpt.class_names = ds_train.class_names;
  ckpt.config = cfg;
  ckpt.selection = ds_train.selection;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng shuffle_rng(cfg.seed ^ (0x9E3779B97F4A7C15ULL * (epoch + 1)));
    shuffle_rng.shuffle(order);

    double epoch_loss = 0.0;
    for (int start = 0; start < n_samples; start += cfg.batch_size) {
      const int bn = std::min(cfg.batch_size, n_samples - start);

      auto run_sample = [&](int worker, int slot) {
        const int idx = order[start + slot];
        sample_grads[slot].zero();
        Tensor logits = workers[worker]->forward(Xs[idx], Zs[idx], ps);
        Tensor dlogits;
        sample_loss[slot] = focal_loss_grad(
            logits, ds_train.samples[idx].T.data, cfg.focal_gamma, dlogits);
        workers[worker]->backward(dlogits, ps, sample_grads[slot]);
      };

      if (n_threads == 1) {
        for (int s = 0; s < bn; ++s) run_sample(0, s);
      } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n_threads; ++t)
          pool.emplace_back([&, t] {
            for (int s = t; s < bn; s += n_threads) run_sample(t, s);
          });
        for (auto& th : pool) th.join();
      }

      // Reduce in sample order so thread count never changes the result.
      Grads& total = sample_grads[0];
      for (int s = 1; s < bn; ++s) total.accumulate(sample_grads[s]);
      total.scale(1.0 / bn);

      double batch_loss = 0.0;
      for (int s = 0; s < bn; ++s) batch_loss += sample_loss[s];
      epoch_loss += batch_loss;
      if (!std::isfinite(batch_loss))
        throw std::runtime_error(
            "non-finite training loss at epoch " + std::to_string(epoch) +
            "; reduce the learning rate or check the input data");

      flat = ps.flatten();
      adam.update(flat, total.flatten(), cfg.learning_rate);
      ps.unflatten(flat);
    }
    ckpt.loss_trace.push_back(epoch_loss / n_samples);
  }

  for (int h = 0; h < ps.count(); ++h) ckpt.param_specs.push_back(ps.spec(h));
  ckpt.param_values = ps.flatten();
  return ckpt;
}

}  // namespace hsifuse::nn
