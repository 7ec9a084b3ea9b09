#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hsifuse/scene.hpp"
#include "json.hpp"

namespace hsifuse {

// Per-tile adversity simulation: gamma low-light, optional local contrast
// enhancement, and atmospheric scattering, applied in that order.

struct LowLightConfig {
  double gamma = 3.0;  // >= 1 (darkening regime)
};

struct ScatteringConfig {
  double A = 0.8;       // atmospheric light intensity in [0,1]
  double beta = 0.1;    // scattering coefficient > 0
  double d_max = 10.0;  // depth scale > 0
  std::uint64_t seed = 0;
};

struct ContrastConfig {
  double sigma = 1.0;  // Gaussian guidance std > 0
  int window = 7;      // odd, >= 3
};

enum class EffectKind { LowLight, Contrast, Scattering };

std::string effect_kind_name(EffectKind k);
EffectKind effect_kind_from_name(const std::string& name);

struct EffectStep {
  EffectKind kind;
  LowLightConfig low_light;
  ScatteringConfig scattering;
  ContrastConfig contrast;
};

// Ordered effect list; valid order is low-light -> contrast -> scattering,
// each at most once. seed is the base from which per-tile seeds derive.
struct EffectChain {
  std::vector<EffectStep> steps;
  std::uint64_t seed = 0;

  bool empty() const { return steps.empty(); }
};

void validate_chain(const EffectChain& chain);

EffectChain make_chain(bool with_low_light, double gamma, bool with_contrast,
                       const ContrastConfig& contrast, bool with_scattering,
                       const ScatteringConfig& scattering, std::uint64_t seed);

nlohmann::json chain_to_json(const EffectChain& chain);
EffectChain chain_from_json(const nlohmann::json& j);

// Per band b with tile-band range [m, M]: v' = m + (M-m) * ((v-m)/(M-m))^gamma.
// Constant bands pass through.
Grid3 low_light(const Grid3& img, const LowLightConfig& cfg);

// d(x) ~ Uniform[0, d_max] i.i.d. per pixel, row-major draw order.
std::vector<double> make_depth_field(int h, int w, const ScatteringConfig& cfg);

// I(x) = J(x) t(x) + A (1 - t(x)) with t = exp(-beta d); one t per pixel
// shared by all bands.
Grid3 atmospheric_scattering(const Grid3& img, const std::vector<double>& depth,
                             const ScatteringConfig& cfg);

// Window-local parabolic stretch guided by a Gaussian-smoothed copy.
Grid3 contrast_enhance(const Grid3& img, const ContrastConfig& cfg);

// Applies the chain to an RGB/HSI tile pair. The scattering depth field is
// drawn once at the RGB resolution from tile_seed and box-averaged down to
// the HSI resolution so both modalities see the same haze.
void apply_chain(RgbTile& rgb, SubCube& hsi, const EffectChain& chain,
                 std::uint64_t tile_seed);

}  // namespace hsifuse
