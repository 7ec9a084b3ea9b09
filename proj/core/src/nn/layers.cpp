#include "hsifuse/nn/layers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hsifuse::nn {

void Conv2d::init(ParamStore& ps, const std::string& name, int in_c, int out_c,
                  int kernel, int padding, bool dw) {
  in_ch = in_c;
  out_ch = out_c;
  k = kernel;
  pad = padding;
  depthwise = dw;
  if (depthwise && in_c != out_c)
    throw std::runtime_error("depthwise conv requires in_ch == out_ch");
  const int fan = depthwise ? 1 : in_c;
  w_h = ps.add(name + ".weight", {out_c, fan, kernel, kernel});
  b_h = ps.add(name + ".bias", {out_c});
}

Tensor Conv2d::forward(const Tensor& x, const ParamStore& ps) {
  if (x.ch != in_ch)
    throw std::runtime_error(ps.spec(w_h).name + ": expected " +
                             std::to_string(in_ch) + " channels, got " +
                             std::to_string(x.ch));
  x_cache = x;
  const int H = x.h, W = x.w;
  const auto& w = ps.values(w_h);
  const auto& b = ps.values(b_h);
  Tensor y(out_ch, H, W);

  const std::size_t plane = static_cast<std::size_t>(H) * W;
  for (int o = 0; o < out_ch; ++o) {
    double* yp = y.v.data() + static_cast<std::size_t>(o) * plane;
    std::fill(yp, yp + plane, b[o]);
    const int i_lo = depthwise ? o : 0;
    const int i_hi = depthwise ? o + 1 : in_ch;
    for (int i = i_lo; i < i_hi; ++i) {
      const double* xp = x.v.data() + static_cast<std::size_t>(i) * plane;
      const std::size_t w_base =
          (static_cast<std::size_t>(o) * (depthwise ? 1 : in_ch) +
           (depthwise ? 0 : i)) *
          k * k;
      for (int dy = 0; dy < k; ++dy) {
        const int y_lo = std::max(0, pad - dy);
        const int y_hi = std::min(H, H + pad - dy);
        for (int dx = 0; dx < k; ++dx) {
          const double wv = w[w_base + static_cast<std::size_t>(dy) * k + dx];
          if (wv == 0.0) continue;
          const int x_lo = std::max(0, pad - dx);
          const int x_hi = std::min(W, W + pad - dx);
          for (int yy = y_lo; yy < y_hi; ++yy) {
            double* yrow = yp + static_cast<std::size_t>(yy) * W;
            const double* xrow =
                xp + static_cast<std::size_t>(yy + dy - pad) * W + (dx - pad);
            for (int xx = x_lo; xx < x_hi; ++xx) yrow[xx] += wv * xrow[xx];
          }
        }
      }
    }
  }
  return y;
}

Tensor Conv2d::backward(const Tensor& gy, const ParamStore& ps, Grads& gs) const {
  const Tensor& x = x_cache;
  const int H = x.h, W = x.w;
  const std::size_t plane = static_cast<std::size_t>(H) * W;
  const auto& w = ps.values(w_h);
  auto& gw = gs.of(w_h);
  auto& gb = gs.of(b_h);
  Tensor gx(in_ch, H, W);

  for (int o = 0; o < out_ch; ++o) {
    const double* gyp = gy.v.data() + static_cast<std::size_t>(o) * plane;
    double acc = 0.0;
    for (std::size_t i = 0; i < plane; ++i) acc += gyp[i];
    gb[o] += acc;

    const int i_lo = depthwise ? o : 0;
    const int i_hi = depthwise ? o + 1 : in_ch;
    for (int i = i_lo; i < i_hi; ++i) {
      const double* xp = x.v.data() + static_cast<std::size_t>(i) * plane;
      double* gxp = gx.v.data() + static_cast<std::size_t>(i) * plane;
      const std::size_t w_base =
          (static_cast<std::size_t>(o) * (depthwise ? 1 : in_ch) +
           (depthwise ? 0 : i)) *
          k * k;
      for (int dy = 0; dy < k; ++dy) {
        const int y_lo = std::max(0, pad - dy);
        const int y_hi = std::min(H, H + pad - dy);
        for (int dx = 0; dx < k; ++dx) {
          const int x_lo = std::max(0, pad - dx);
          const int x_hi = std::min(W, W + pad - dx);
          const std::size_t w_idx = w_base + static_cast<std::size_t>(dy) * k + dx;
          const double wv = w[w_idx];
          double wacc = 0.0;
          for (int yy = y_lo; yy < y_hi; ++yy) {
            const double* gyrow = gyp + static_cast<std::size_t>(yy) * W;
            const double* xrow =
                xp + static_cast<std::size_t>(yy + dy - pad) * W + (dx - pad);
            double* gxrow =
                gxp + static_cast<std::size_t>(yy + dy - pad) * W + (dx - pad);
            for (int xx = x_lo; xx < x_hi; ++xx) {
              wacc += gyrow[xx] * xrow[xx];
              gxrow[xx] += wv * gyrow[xx];
            }
          }
          gw[w_idx] += wacc;
        }
      }
    }
  }
  return gx;
}

Tensor Relu::forward(const Tensor& x) {
  x_cache = x;
  Tensor y = x;
  for (auto& v : y.v) v = v > 0.0 ? v : 0.0;
  return y;
}

Tensor Relu::backward(const Tensor& gy) const {
  Tensor gx = gy;
  for (std::size_t i = 0; i < gx.v.size(); ++i)
    if (x_cache.v[i] <= 0.0) gx.v[i] = 0.0;
  return gx;
}

Tensor MaxPool2::forward(const Tensor& x) {
  if (x.h % 2 != 0 || x.w % 2 != 0)
    throw std::runtime_error("max pool needs even spatial dims");
  ch = x.ch;
  in_h = x.h;
  in_w = x.w;
  const int oh = x.h / 2, ow = x.w / 2;
  Tensor y(ch, oh, ow);
  argmax.assign(y.size(), 0);
  for (int c = 0; c < ch; ++c)
    for (int yy = 0; yy < oh; ++yy)
      for (int xx = 0; xx < ow; ++xx) {
        double best = -std::numeric_limits<double>::infinity();
        int best_idx = 0;
        for (int dy = 0; dy < 2; ++dy)
          for (int dx = 0; dx < 2; ++dx) {
            const int iy = yy * 2 + dy, ix = xx * 2 + dx;
            const int idx = (c * in_h + iy) * in_w + ix;
            if (x.v[idx] > best) {
              best = x.v[idx];
              best_idx = idx;
            }
          }
        y.at(c, yy, xx) = best;
        argmax[(static_cast<std::size_t>(c) * oh + yy) * ow + xx] = best_idx;
      }
  return y;
}

Tensor MaxPool2::backward(const Tensor& gy) const {
  Tensor gx(ch, in_h, in_w);
  for (std::size_t i = 0; i < gy.v.size(); ++i)
    gx.v[static_cast<std::size_t>(argmax[i])] += gy.v[i];
  return gx;
}

namespace {

struct LerpIdx {
  int i0, i1;
  double t;
};

// Half-pixel-center source coordinate for 2x upscaling.
LerpIdx up2_index(int out_idx, int in_len) {
  double s = (out_idx + 0.5) / 2.0 - 0.5;
  s = std::clamp(s, 0.0, static_cast<double>(in_len - 1));
  const int i0 = static_cast<int>(s);
  const int i1 = std::min(i0 + 1, in_len - 1);
  return {i0, i1, s - i0};
}

}  // namespace

Tensor BilinearUp2::forward(const Tensor& x) {
  ch = x.ch;
  in_h = x.h;
  in_w = x.w;
  const int oh = x.h * 2, ow = x.w * 2;
  Tensor y(ch, oh, ow);
  for (int c = 0; c < ch; ++c)
    for (int yy = 0; yy < oh; ++yy) {
      const auto ry = up2_index(yy, in_h);
      for (int xx = 0; xx < ow; ++xx) {
        const auto rx = up2_index(xx, in_w);
        const double v00 = x.at(c, ry.i0, rx.i0);
        const double v01 = x.at(c, ry.i0, rx.i1);
        const double v10 = x.at(c, ry.i1, rx.i0);
        const double v11 = x.at(c, ry.i1, rx.i1);
        y.at(c, yy, xx) = (1 - ry.t) * ((1 - rx.t) * v00 + rx.t * v01) +
                          ry.t * ((1 - rx.t) * v10 + rx.t * v11);
      }
    }
  return y;
}

Tensor BilinearUp2::backward(const Tensor& gy) const {
  Tensor gx(ch, in_h, in_w);
  const int oh = in_h * 2, ow = in_w * 2;
  for (int c = 0; c < ch; ++c)
    for (int yy = 0; yy < oh; ++yy) {
      const auto ry = up2_index(yy, in_h);
      for (int xx = 0; xx < ow; ++xx) {
        const auto rx = up2_index(xx, in_w);
        const double g = gy.at(c, yy, xx);
        gx.at(c, ry.i0, rx.i0) += (1 - ry.t) * (1 - rx.t) * g;
        gx.at(c, ry.i0, rx.i1) += (1 - ry.t) * rx.t * g;
        gx.at(c, ry.i1, rx.i0) += ry.t * (1 - rx.t) * g;
        gx.at(c, ry.i1, rx.i1) += ry.t * rx.t * g;
      }
    }
  return gx;
}

Tensor concat_channels(const Tensor& a, const Tensor& b) {
  if (a.h != b.h || a.w != b.w)
    throw std::runtime_error("concat: spatial shape mismatch");
  Tensor y(a.ch + b.ch, a.h, a.w);
  std::copy(a.v.begin(), a.v.end(), y.v.begin());
  std::copy(b.v.begin(), b.v.end(), y.v.begin() + static_cast<std::ptrdiff_t>(a.v.size()));
  return y;
}

void split_channels(const Tensor& g, int ch_a, Tensor& ga, Tensor& gb) {
  ga = Tensor(ch_a, g.h, g.w);
  gb = Tensor(g.ch - ch_a, g.h, g.w);
  std::copy(g.v.begin(), g.v.begin() + static_cast<std::ptrdiff_t>(ga.v.size()),
            ga.v.begin());
  std::copy(g.v.begin() + static_cast<std::ptrdiff_t>(ga.v.size()), g.v.end(),
            gb.v.begin());
}

void ConvBlock::init(ParamStore& ps, const std::string& name, int in_c, int out_c) {
  conv_in.init(ps, name + ".in1x1", in_c, out_c, 1, 0);
  conv_mid.init(ps, name + ".mid3x3", out_c, out_c, 3, 1);
  conv_out.init(ps, name + ".out1x1", out_c, out_c, 1, 0);
}

Tensor ConvBlock::forward(const Tensor& x, const ParamStore& ps) {
  Tensor t = relu_in.forward(conv_in.forward(x, ps));
  t = relu_mid.forward(conv_mid.forward(t, ps));
  return relu_out.forward(conv_out.forward(t, ps));
}

Tensor ConvBlock::backward(const Tensor& gy, const ParamStore& ps, Grads& gs) const {
  Tensor g = conv_out.backward(relu_out.backward(gy), ps, gs);
  g = conv_mid.backward(relu_mid.backward(g), ps, gs);
  return conv_in.backward(relu_in.backward(g), ps, gs);
}

void IwcaBlock::init(ParamStore& ps, const std::string& name, int ch) {
  spatial.init(ps, name + ".spatial3x3", ch, ch, 3, 1);
  depthwise.init(ps, name + ".depthwise3x3", ch, ch, 3, 1, /*dw=*/true);
}

Tensor IwcaBlock::forward(const Tensor& x, const ParamStore& ps) {
  branch1_cache = spatial.forward(x, ps);
  const Tensor d = depthwise.forward(x, ps);

  const std::size_t plane = static_cast<std::size_t>(d.h) * d.w;
  weight_cache.assign(d.ch, 0.0);
  for (int c = 0; c < d.ch; ++c) {
    double mean = 0.0;
    for (std::size_t i = 0; i < plane; ++i)
      mean += d.v[static_cast<std::size_t>(c) * plane + i];
    mean /= static_cast<double>(plane);
    weight_cache[c] = 1.0 / (1.0 + std::exp(-mean));
  }

  Tensor y = branch1_cache;
  for (int c = 0; c < y.ch; ++c)
    for (std::size_t i = 0; i < plane; ++i)
      y.v[static_cast<std::size_t>(c) * plane + i] *= weight_cache[c];
  return y;
}

Tensor IwcaBlock::backward(const Tensor& gy, const ParamStore& ps, Grads& gs) const {
  const std::size_t plane = static_cast<std::size_t>(gy.h) * gy.w;

  Tensor g_branch1 = gy;
  Tensor g_depth(gy.ch, gy.h, gy.w);
  for (int c = 0; c < gy.ch; ++c) {
    const double wgt = weight_cache[c];
    double g_w = 0.0;
    for (std::size_t i = 0; i < plane; ++i) {
      const std::size_t idx = static_cast<std::size_t>(c) * plane + i;
      g_w += gy.v[idx] * branch1_cache.v[idx];
      g_branch1.v[idx] *= wgt;
    }
    // Through sigmoid and the spatial mean of the depthwise branch.
    const double g_mean = g_w * wgt * (1.0 - wgt);
    const double g_cell = g_mean / static_cast<double>(plane);
    for (std::size_t i = 0; i < plane; ++i)
      g_depth.v[static_cast<std::size_t>(c) * plane + i] = g_cell;
  }

  Tensor gx = spatial.backward(g_branch1, ps, gs);
  const Tensor gx2 = depthwise.backward(g_depth, ps, gs);
  for (std::size_t i = 0; i < gx.v.size(); ++i) gx.v[i] += gx2.v[i];
  return gx;
}

}  // namespace hsifuse::nn
