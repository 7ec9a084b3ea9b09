#pragma once

#include <cstdint>
#include <string>

#include "hsifuse/scene.hpp"

namespace hsifuse {

// Seeded synthetic aerial scenes for demos and tests. Class spectra follow
// the usual reflectance shapes (vegetation red edge + NIR plateau, water IR
// absorption, flat dark asphalt, rising soil curve) so band selection and
// the segmentation models behave as they would on real scenes.
struct SynthOptions {
  int Hs = 100;
  int Ws = 100;
  std::uint64_t seed = 7;
  double noise_std = 0.008;
  double brightness_amp = 0.12;
};

// 224 bands, classes Road/Dirt/Water/Tree.
Scene synth_jasper_like(const SynthOptions& opts = {});

// 210 bands, classes Asphalt/Grass/Tree/Roof/Metal/Dirt.
Scene synth_urban_like(const SynthOptions& opts = {});

// kind is "jasper" or "urban".
Scene synth_scene(const std::string& kind, const SynthOptions& opts = {});

}  // namespace hsifuse
