#pragma once

#include <string>
#include <vector>

#include "hsifuse/nn/tensor.hpp"

namespace hsifuse::nn {

// Layers cache what their backward pass needs, so one instance serves one
// worker. Parameters live in a shared ParamStore addressed by handle;
// backward writes into a caller-owned Grads.

struct Conv2d {
  int w_h = -1;
  int b_h = -1;
  int in_ch = 0, out_ch = 0, k = 1, pad = 0;
  bool depthwise = false;  // groups == channels, weight [ch][1][k][k]
  Tensor x_cache;

  void init(ParamStore& ps, const std::string& name, int in_c, int out_c,
            int kernel, int padding, bool dw = false);
  Tensor forward(const Tensor& x, const ParamStore& ps);
  Tensor backward(const Tensor& gy, const ParamStore& ps, Grads& gs) const;
};

struct Relu {
  Tensor x_cache;
  Tensor forward(const Tensor& x);
  Tensor backward(const Tensor& gy) const;
};

struct MaxPool2 {
  std::vector<int> argmax;  // flat input index per output cell
  int in_h = 0, in_w = 0, ch = 0;
  Tensor forward(const Tensor& x);
  Tensor backward(const Tensor& gy) const;
};

// x2 bilinear upsampling, half-pixel centers; constant maps to constant.
struct BilinearUp2 {
  int in_h = 0, in_w = 0, ch = 0;
  Tensor forward(const Tensor& x);
  Tensor backward(const Tensor& gy) const;
};

Tensor concat_channels(const Tensor& a, const Tensor& b);
void split_channels(const Tensor& g, int ch_a, Tensor& ga, Tensor& gb);

// 1x1 -> 3x3 -> 1x1 convolutional unit, ReLU after each conv.
struct ConvBlock {
  Conv2d conv_in, conv_mid, conv_out;
  Relu relu_in, relu_mid, relu_out;

  void init(ParamStore& ps, const std::string& name, int in_c, int out_c);
  Tensor forward(const Tensor& x, const ParamStore& ps);
  Tensor backward(const Tensor& gy, const ParamStore& ps, Grads& gs) const;
};

// Importance-weighted channel attention: a 3x3 conv branch carrying the
// features, and a depthwise 3x3 -> global average pool -> sigmoid branch
// producing one weight per channel that scales the first branch.
struct IwcaBlock {
  Conv2d spatial;    // 3x3, ch -> ch
  Conv2d depthwise;  // 3x3 groups == ch
  Tensor branch1_cache;
  std::vector<double> weight_cache;  // sigmoid outputs, one per channel

  void init(ParamStore& ps, const std::string& name, int ch);
  Tensor forward(const Tensor& x, const ParamStore& ps);
  Tensor backward(const Tensor& gy, const ParamStore& ps, Grads& gs) const;
  const std::vector<double>& channel_weights() const { return weight_cache; }
};

}  // namespace hsifuse::nn
