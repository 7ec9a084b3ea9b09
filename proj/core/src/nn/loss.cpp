#include "hsifuse/nn/loss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hsifuse::nn {

namespace {
constexpr double kProbFloor = 1e-15;
}

Tensor softmax(const Tensor& logits) {
  Tensor p = logits;
  const std::size_t plane = static_cast<std::size_t>(logits.h) * logits.w;
  for (std::size_t i = 0; i < plane; ++i) {
    double mx = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < logits.ch; ++c)
      mx = std::max(mx, logits.v[static_cast<std::size_t>(c) * plane + i]);
    double z = 0.0;
    for (int c = 0; c < logits.ch; ++c) {
      const std::size_t idx = static_cast<std::size_t>(c) * plane + i;
      p.v[idx] = std::exp(logits.v[idx] - mx);
      z += p.v[idx];
    }
    for (int c = 0; c < logits.ch; ++c)
      p.v[static_cast<std::size_t>(c) * plane + i] /= z;
  }
  return p;
}

double focal_loss(const Tensor& logits, const LabelGrid& labels, double gamma) {
  Tensor unused;
  return focal_loss_grad(logits, labels, gamma, unused);
}

double focal_loss_grad(const Tensor& logits, const LabelGrid& labels,
                       double gamma, Tensor& dlogits) {
  if (gamma < 0.0) throw std::runtime_error("focal gamma must be >= 0");
  if (labels.h != logits.h || labels.w != logits.w)
    throw std::runtime_error("focal loss: label shape mismatch");

  const int L = logits.ch;
  const std::size_t plane = static_cast<std::size_t>(logits.h) * logits.w;
  const Tensor p = softmax(logits);
  dlogits = Tensor(L, logits.h, logits.w);

  const double inv_n = 1.0 / static_cast<double>(plane);
  double loss = 0.0;
  for (std::size_t i = 0; i < plane; ++i) {
    const int t = labels.data[i];
    if (t >= L)
      throw std::runtime_error("focal loss: label " + std::to_string(t) +
                               " >= L=" + std::to_string(L));
    const double pt = std::max(p.v[static_cast<std::size_t>(t) * plane + i],
                               kProbFloor);
    const double one_minus = 1.0 - pt;
    const double focal_pow = std::pow(one_minus, gamma);
    loss += -focal_pow * std::log(pt);

    // d/dz_j of -(1-pt)^g log(pt) = (g*pt*(1-pt)^(g-1)*log(pt) - (1-pt)^g)
    //                               * (delta_jt - p_j)
    double coeff;
    if (gamma == 0.0) {
      coeff = -1.0;
    } else if (one_minus < kProbFloor) {
      coeff = 0.0;  // both factors vanish as pt -> 1
    } else {
      coeff = gamma * pt * std::pow(one_minus, gamma - 1.0) * std::log(pt) -
              focal_pow;
    }
    for (int c = 0; c < L; ++c) {
      const std::size_t idx = static_cast<std::size_t>(c) * plane + i;
      const double indicator = (c == t) ? 1.0 : 0.0;
      dlogits.v[idx] = coeff * (indicator - p.v[idx]) * inv_n;
    }
  }
  return loss * inv_n;
}

LabelGrid argmax_labels(const Tensor& logits) {
  LabelGrid out(logits.h, logits.w);
  const std::size_t plane = static_cast<std::size_t>(logits.h) * logits.w;
  for (std::size_t i = 0; i < plane; ++i) {
    int best = 0;
    double best_v = logits.v[i];
    for (int c = 1; c < logits.ch; ++c) {
      const double v = logits.v[static_cast<std::size_t>(c) * plane + i];
      if (v > best_v) {  // strict: ties keep the lower index
        best_v = v;
        best = c;
      }
    }
    out.data[i] = static_cast<std::uint8_t>(best);
  }
  return out;
}

}  // namespace hsifuse::nn
