#include "hsifuse/nn/model.hpp"

#include <cmath>
#include <stdexcept>

#include "hsifuse/rng.hpp"

namespace hsifuse::nn {

std::string model_kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::Siamese: return "siamese";
    case ModelKind::UnetRgb: return "unet_rgb";
    case ModelKind::CnnRgb: return "cnn_rgb";
  }
  throw std::runtime_error("unknown model kind");
}

ModelKind model_kind_from_name(const std::string& name) {
  if (name == "siamese") return ModelKind::Siamese;
  if (name == "unet_rgb") return ModelKind::UnetRgb;
  if (name == "cnn_rgb") return ModelKind::CnnRgb;
  throw std::runtime_error("unknown model kind: " + name);
}

SiameseNet::SiameseNet(ParamStore& ps, int num_classes) : L_(num_classes) {
  iwca_.init(ps, "phi.iwca", 6);
  hsi_b1_.init(ps, "gamma.block1", 6, 32);
  hsi_b2_.init(ps, "gamma.block2", 32, 64);
  rgb_b1_.init(ps, "theta.block1", 3, 32);
  rgb_b2_.init(ps, "theta.block2", 32, 64);
  fuse_conv_.init(ps, "psi.fuse3x3", 128, 128, 3, 1);
  dec1_conv_.init(ps, "psi.dec1_3x3", 256, 64, 3, 1);
  dec2_conv_.init(ps, "psi.dec2_3x3", 96, 32, 3, 1);
  logit_conv_.init(ps, "psi.logit1x1", 32, L_, 1, 0);
}

Tensor SiameseNet::forward(const Tensor& X, const Tensor& Z, const ParamStore& ps) {
  if (X.ch != 6 || X.h != 8 || X.w != 8)
    throw std::runtime_error("siamese: X must be 6x8x8");
  if (Z.ch != 3 || Z.h != 16 || Z.w != 16)
    throw std::runtime_error("siamese: Z must be 3x16x16");

  skip_rgb16_ = rgb_b1_.forward(Z, ps);                 // 32@16x16
  Tensor t = rgb_pool1_.forward(skip_rgb16_);           // 32@8x8
  skip_rgb8_ = rgb_b2_.forward(t, ps);                  // 64@8x8
  const Tensor rgb4 = rgb_pool2_.forward(skip_rgb8_);   // 64@4x4

  Tensor xa = iwca_.forward(X, ps);                     // 6@8x8
  xa = hsi_b1_.forward(xa, ps);                         // 32@8x8
  skip_hsi8_ = hsi_b2_.forward(xa, ps);                 // 64@8x8
  const Tensor hsi4 = hsi_pool_.forward(skip_hsi8_);    // 64@4x4

  Tensor f = concat_channels(rgb4, hsi4);               // 128@4x4
  f = fuse_relu_.forward(fuse_conv_.forward(f, ps));    // 128@4x4

  Tensor u = up1_.forward(f);                           // 128@8x8
  u = concat_channels(u, concat_channels(skip_rgb8_, skip_hsi8_));  // 256@8x8
  Tensor d1 = dec1_relu_.forward(dec1_conv_.forward(u, ps));        // 64@8x8

  Tensor u2 = up2_.forward(d1);                         // 64@16x16
  u2 = concat_channels(u2, skip_rgb16_);                // 96@16x16
  Tensor d2 = dec2_relu_.forward(dec2_conv_.forward(u2, ps));       // 32@16x16

  return logit_conv_.forward(d2, ps);                   // L@16x16
}

void SiameseNet::backward(const Tensor& dlogits, const ParamStore& ps, Grads& gs) {
  Tensor g = logit_conv_.backward(dlogits, ps, gs);
  g = dec2_conv_.backward(dec2_relu_.backward(g), ps, gs);   // 96@16x16

  Tensor g_u2, g_skip16_dec;
  split_channels(g, 64, g_u2, g_skip16_dec);
  Tensor g_d1 = up2_.backward(g_u2);                         // 64@8x8
  g_d1 = dec1_conv_.backward(dec1_relu_.backward(g_d1), ps, gs);  // 256@8x8

  Tensor g_up, g_skips, g_skip_rgb8_dec, g_skip_hsi8_dec;
  split_channels(g_d1, 128, g_up, g_skips);
  split_channels(g_skips, 64, g_skip_rgb8_dec, g_skip_hsi8_dec);

  Tensor g_f = up1_.backward(g_up);                          // 128@4x4
  g_f = fuse_conv_.backward(fuse_relu_.backward(g_f), ps, gs);

  Tensor g_rgb4, g_hsi4;
  split_channels(g_f, 64, g_rgb4, g_hsi4);

  // RGB branch; skips add into the pooled path.
  Tensor g_s8 = rgb_pool2_.backward(g_rgb4);
  for (std::size_t i = 0; i < g_s8.v.size(); ++i)
    g_s8.v[i] += g_skip_rgb8_dec.v[i];
  Tensor g_p1 = rgb_b2_.backward(g_s8, ps, gs);
  Tensor g_s16 = rgb_pool1_.backward(g_p1);
  for (std::size_t i = 0; i < g_s16.v.size(); ++i)
    g_s16.v[i] += g_skip16_dec.v[i];
  rgb_b1_.backward(g_s16, ps, gs);

  // HSI branch.
  Tensor g_h8 = hsi_pool_.backward(g_hsi4);
  for (std::size_t i = 0; i < g_h8.v.size(); ++i)
    g_h8.v[i] += g_skip_hsi8_dec.v[i];
  Tensor g_h1 = hsi_b2_.backward(g_h8, ps, gs);
  Tensor g_xa = hsi_b1_.backward(g_h1, ps, gs);
  iwca_.backward(g_xa, ps, gs);
}

UnetRgbNet::UnetRgbNet(ParamStore& ps, int num_classes) : L_(num_classes) {
  b1_.init(ps, "theta.block1", 3, 32);
  b2_.init(ps, "theta.block2", 32, 64);
  fuse_conv_.init(ps, "psi.fuse3x3", 64, 128, 3, 1);
  dec1_conv_.init(ps, "psi.dec1_3x3", 192, 64, 3, 1);
  dec2_conv_.init(ps, "psi.dec2_3x3", 96, 32, 3, 1);
  logit_conv_.init(ps, "psi.logit1x1", 32, L_, 1, 0);
}

Tensor UnetRgbNet::forward(const Tensor& /*X*/, const Tensor& Z, const ParamStore& ps) {
  if (Z.ch != 3 || Z.h != 16 || Z.w != 16)
    throw std::runtime_error("unet_rgb: Z must be 3x16x16");

  skip16_ = b1_.forward(Z, ps);                       // 32@16x16
  Tensor t = pool1_.forward(skip16_);                 // 32@8x8
  skip8_ = b2_.forward(t, ps);                        // 64@8x8
  Tensor f = pool2_.forward(skip8_);                  // 64@4x4
  f = fuse_relu_.forward(fuse_conv_.forward(f, ps));  // 128@4x4

  Tensor u = up1_.forward(f);                         // 128@8x8
  u = concat_channels(u, skip8_);                     // 192@8x8
  Tensor d1 = dec1_relu_.forward(dec1_conv_.forward(u, ps));  // 64@8x8

  Tensor u2 = up2_.forward(d1);                       // 64@16x16
  u2 = concat_channels(u2, skip16_);                  // 96@16x16
  Tensor d2 = dec2_relu_.forward(dec2_conv_.forward(u2, ps));

  return logit_conv_.forward(d2, ps);
}

void UnetRgbNet::backward(const Tensor& dlogits, const ParamStore& ps, Grads& gs) {
  Tensor g = logit_conv_.backward(dlogits, ps, gs);
  g = dec2_conv_.backward(dec2_relu_.backward(g), ps, gs);

  Tensor g_u2, g_skip16_dec;
  split_channels(g, 64, g_u2, g_skip16_dec);
  Tensor g_d1 = up2_.backward(g_u2);
  g_d1 = dec1_conv_.backward(dec1_relu_.backward(g_d1), ps, gs);  // 192@8x8

  Tensor g_up, g_skip8_dec;
  split_channels(g_d1, 128, g_up, g_skip8_dec);
  Tensor g_f = up1_.backward(g_up);
  g_f = fuse_conv_.backward(fuse_relu_.backward(g_f), ps, gs);    // 64@4x4

  Tensor g_s8 = pool2_.backward(g_f);
  for (std::size_t i = 0; i < g_s8.v.size(); ++i)
    g_s8.v[i] += g_skip8_dec.v[i];
  Tensor g_p1 = b2_.backward(g_s8, ps, gs);
  Tensor g_s16 = pool1_.backward(g_p1);
  for (std::size_t i = 0; i < g_s16.v.size(); ++i)
    g_s16.v[i] += g_skip16_dec.v[i];
  b1_.backward(g_s16, ps, gs);
}

CnnRgbNet::CnnRgbNet(ParamStore& ps, int num_classes) : L_(num_classes) {
  c1_.init(ps, "theta.conv1", 3, 32, 3, 1);
  c2_.init(ps, "theta.conv2", 32, 64, 3, 1);
  c3_.init(ps, "theta.conv3", 64, 32, 3, 1);
  c4_.init(ps, "theta.conv4", 32, L_, 3, 1);
}

Tensor CnnRgbNet::forward(const Tensor& /*X*/, const Tensor& Z, const ParamStore& ps) {
  if (Z.ch != 3 || Z.h != 16 || Z.w != 16)
    throw std::runtime_error("cnn_rgb: Z must be 3x16x16");
  Tensor t = r1_.forward(c1_.forward(Z, ps));
  t = r2_.forward(c2_.forward(t, ps));
  t = r3_.forward(c3_.forward(t, ps));
  return c4_.forward(t, ps);
}

void CnnRgbNet::backward(const Tensor& dlogits, const ParamStore& ps, Grads& gs) {
  Tensor g = c4_.backward(dlogits, ps, gs);
  g = c3_.backward(r3_.backward(g), ps, gs);
  g = c2_.backward(r2_.backward(g), ps, gs);
  c1_.backward(r1_.backward(g), ps, gs);
}

std::unique_ptr<Network> make_network(ModelKind kind, ParamStore& ps,
                                      int num_classes) {
  switch (kind) {
    case ModelKind::Siamese: return std::make_unique<SiameseNet>(ps, num_classes);
    case ModelKind::UnetRgb: return std::make_unique<UnetRgbNet>(ps, num_classes);
    case ModelKind::CnnRgb: return std::make_unique<CnnRgbNet>(ps, num_classes);
  }
  throw std::runtime_error("unknown model kind");
}

void init_params(ParamStore& ps, std::uint64_t seed) {
  Rng rng(seed);
  double fan_in = 1.0;
  for (int h = 0; h < ps.count(); ++h) {
    const auto& spec = ps.spec(h);
    if (spec.shape.size() == 4) {
      fan_in = static_cast<double>(spec.shape[1]) * spec.shape[2] * spec.shape[3];
    }
    // Biases reuse the fan-in of the weight they follow.
    const double bound = 1.0 / std::sqrt(fan_in);
    for (auto& v : ps.values(h)) v = rng.uniform(-bound, bound);
  }
}

}  // namespace hsifuse::nn
