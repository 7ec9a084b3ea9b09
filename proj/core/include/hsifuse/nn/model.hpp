#pragma once

#include <memory>
#include <string>

#include "hsifuse/nn/layers.hpp"
#include "hsifuse/nn/tensor.hpp"

namespace hsifuse::nn {

enum class ModelKind { Siamese, UnetRgb, CnnRgb };

std::string model_kind_name(ModelKind k);
ModelKind model_kind_from_name(const std::string& name);

// Shared interface over the three architectures. forward caches activations;
// backward consumes them, so forward/backward pairs belong to one worker.
class Network {
 public:
  virtual ~Network() = default;
  virtual Tensor forward(const Tensor& X, const Tensor& Z, const ParamStore& ps) = 0;
  virtual void backward(const Tensor& dlogits, const ParamStore& ps, Grads& gs) = 0;
  virtual bool uses_hsi() const = 0;
};

// Two-branch encoder + shared decoder, channel attention on the HSI side.
//
//   RGB 3@16x16 -> block(3->32) --------------------- skip 32@16x16
//                 pool -> block(32->64) ------------- skip 64@8x8
//                 pool -> 64@4x4
//   HSI 6@8x8   -> IWCA -> block(6->32) -> block(32->64)  skip 64@8x8
//                 pool -> 64@4x4
//   fuse: concat 128@4x4 -> 3x3 conv(128->128)
//   up -> concat(64+64 skips) -> 3x3 conv(256->64)
//   up -> concat(32 skip)     -> 3x3 conv(96->32) -> 1x1 conv(32->L)
class SiameseNet final : public Network {
 public:
  SiameseNet(ParamStore& ps, int num_classes);
  Tensor forward(const Tensor& X, const Tensor& Z, const ParamStore& ps) override;
  void backward(const Tensor& dlogits, const ParamStore& ps, Grads& gs) override;
  bool uses_hsi() const override { return true; }

  IwcaBlock& iwca() { return iwca_; }

 private:
  int L_;
  IwcaBlock iwca_;
  ConvBlock rgb_b1_, rgb_b2_, hsi_b1_, hsi_b2_;
  MaxPool2 rgb_pool1_, rgb_pool2_, hsi_pool_;
  Conv2d fuse_conv_;
  Relu fuse_relu_;
  BilinearUp2 up1_, up2_;
  Conv2d dec1_conv_, dec2_conv_, logit_conv_;
  Relu dec1_relu_, dec2_relu_;
  Tensor skip_rgb16_, skip_rgb8_, skip_hsi8_;
};

// The Siamese architecture with the HSI branch and IWCA removed.
class UnetRgbNet final : public Network {
 public:
  UnetRgbNet(ParamStore& ps, int num_classes);
  Tensor forward(const Tensor& X, const Tensor& Z, const ParamStore& ps) override;
  void backward(const Tensor& dlogits, const ParamStore& ps, Grads& gs) override;
  bool uses_hsi() const override { return false; }

 private:
  int L_;
  ConvBlock b1_, b2_;
  MaxPool2 pool1_, pool2_;
  Conv2d fuse_conv_;
  Relu fuse_relu_;
  BilinearUp2 up1_, up2_;
  Conv2d dec1_conv_, dec2_conv_, logit_conv_;
  Relu dec1_relu_, dec2_relu_;
  Tensor skip16_, skip8_;
};

// Four plain 3x3 convolutions at full resolution: 3->32->64->32->L.
class CnnRgbNet final : public Network {
 public:
  CnnRgbNet(ParamStore& ps, int num_classes);
  Tensor forward(const Tensor& X, const Tensor& Z, const ParamStore& ps) override;
  void backward(const Tensor& dlogits, const ParamStore& ps, Grads& gs) override;
  bool uses_hsi() const override { return false; }

 private:
  int L_;
  Conv2d c1_, c2_, c3_, c4_;
  Relu r1_, r2_, r3_;
};

std::unique_ptr<Network> make_network(ModelKind kind, ParamStore& ps,
                                      int num_classes);

// Seeded uniform fan-in initialization over all registered parameters;
// biases start at zero.
void init_params(ParamStore& ps, std::uint64_t seed);

}  // namespace hsifuse::nn
