#include "hsifuse/synth.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "hsifuse/rng.hpp"

namespace hsifuse {

namespace {

double sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double bump(double x, double mu, double sd) {
  const double t = (x - mu) / sd;
  return std::exp(-0.5 * t * t);
}

using Spectrum = std::function<double(double)>;  // wavelength nm -> reflectance

double road_spectrum(double wl) {
  return 0.09 + 0.08 * sig((wl - 1200.0) / 500.0);
}

double soil_spectrum(double wl) {
  return 0.12 + 0.38 * sig((wl - 1000.0) / 350.0) - 0.08 * bump(wl, 2200.0, 120.0);
}

double water_spectrum(double wl) {
  const double ir_absorb = sig((850.0 - wl) / 60.0);
  return 0.02 + 0.20 * bump(wl, 470.0, 150.0) * ir_absorb;
}

// red_edge_nm shifts the chlorophyll edge; plateau sets the NIR level.
Spectrum vegetation_spectrum(double red_edge_nm, double plateau, double green_amp) {
  return [=](double wl) {
    double v = 0.04 + green_amp * bump(wl, 550.0, 45.0);
    v += plateau * sig((wl - red_edge_nm) / 20.0);
    v -= 0.18 * plateau * bump(wl, 1450.0, 60.0);
    v -= 0.22 * plateau * bump(wl, 1940.0, 75.0);
    v -= 0.25 * plateau * sig((wl - 2100.0) / 250.0);
    return v;
  };
}

double roof_spectrum(double wl) {
  return 0.20 + 0.15 * sig((wl - 900.0) / 300.0);
}

double metal_spectrum(double wl) {
  return 0.62 - 0.15 * sig((wl - 1500.0) / 500.0);
}

// Low-frequency field: coarse i.i.d. normal grid, bilinearly upsampled.
std::vector<double> smooth_field(int H, int W, int cell, Rng& rng) {
  const int gh = H / cell + 2;
  const int gw = W / cell + 2;
  std::vector<double> coarse(static_cast<std::size_t>(gh) * gw);
  for (auto& v : coarse) v = rng.normal();

  std::vector<double> out(static_cast<std::size_t>(H) * W);
  for (int y = 0; y < H; ++y) {
    const double fy = static_cast<double>(y) / cell;
    const int y0 = static_cast<int>(fy);
    const double ty = fy - y0;
    for (int x = 0; x < W; ++x) {
      const double fx = static_cast<double>(x) / cell;
      const int x0 = static_cast<int>(fx);
      const double tx = fx - x0;
      const double a = coarse[static_cast<std::size_t>(y0) * gw + x0];
      const double b = coarse[static_cast<std::size_t>(y0) * gw + x0 + 1];
      const double c = coarse[static_cast<std::size_t>(y0 + 1) * gw + x0];
      const double d = coarse[static_cast<std::size_t>(y0 + 1) * gw + x0 + 1];
      out[static_cast<std::size_t>(y) * W + x] =
          (1 - ty) * ((1 - tx) * a + tx * b) + ty * ((1 - tx) * c + tx * d);
    }
  }
  return out;
}

Scene assemble(const std::string& name, int C, double wl_lo, double wl_hi,
               const std::vector<std::string>& class_names,
               const std::vector<Spectrum>& spectra,
               const std::vector<double>& class_bias,
               const SynthOptions& opts,
               const std::function<void(std::vector<std::vector<double>>&, int, int)>&
                   add_structure) {
  const int H = opts.Hs;
  const int W = opts.Ws;
  const int L = static_cast<int>(class_names.size());
  Rng rng(opts.seed);

  // Label map: argmax over smoothed per-class fields plus optional structural
  // boosts (river/road ridges).
  std::vector<std::vector<double>> fields(L);
  for (int l = 0; l < L; ++l) {
    fields[l] = smooth_field(H, W, 12, rng);
    for (auto& v : fields[l]) v += class_bias[l];
  }
  add_structure(fields, H, W);

  Scene s;
  s.name = name;
  s.C = C;
  s.Hs = H;
  s.Ws = W;
  s.class_names = class_names;
  s.labels = LabelGrid(H, W);
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      int best = 0;
      double best_v = fields[0][static_cast<std::size_t>(y) * W + x];
      for (int l = 1; l < L; ++l) {
        const double v = fields[l][static_cast<std::size_t>(y) * W + x];
        if (v > best_v) {
          best_v = v;
          best = l;
        }
      }
      s.labels.at(y, x) = static_cast<std::uint8_t>(best);
    }
  }

  std::vector<double> wl(C);
  for (int b = 0; b < C; ++b)
    wl[b] = wl_lo + (wl_hi - wl_lo) * b / (C - 1);
  s.wavelengths_nm = wl;

  // Per-class signatures sampled on the band grid.
  std::vector<std::vector<double>> sigs(L, std::vector<double>(C));
  for (int l = 0; l < L; ++l)
    for (int b = 0; b < C; ++b)
      sigs[l][b] = std::clamp(spectra[l](wl[b]), 0.01, 0.95);

  const auto bright = smooth_field(H, W, 9, rng);
  s.cube = Grid3(C, H, W);
  const std::size_t plane = static_cast<std::size_t>(H) * W;
  // Noise drawn pixel-major so each pixel's spectrum perturbation is local.
  std::vector<float> noise(plane * C);
  for (auto& n : noise) n = static_cast<float>(rng.normal() * opts.noise_std);
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      const std::size_t p = static_cast<std::size_t>(y) * W + x;
      const int l = s.labels.at(y, x);
      const double scale = 1.0 + opts.brightness_amp * bright[p];
      for (int b = 0; b < C; ++b) {
        const double v = sigs[l][b] * scale + noise[p * C + b];
        s.cube.data[static_cast<std::size_t>(b) * plane + p] =
            static_cast<float>(std::clamp(v, 0.0, 1.0));
      }
    }
  }
  return s;
}

}  // namespace

Scene synth_jasper_like(const SynthOptions& opts) {
  const std::vector<std::string> names = {"Road", "Dirt", "Water", "Tree"};
  const std::vector<Spectrum> spectra = {
      road_spectrum, soil_spectrum, water_spectrum,
      vegetation_spectrum(715.0, 0.45, 0.05)};
  const std::vector<double> bias = {-0.55, -0.05, -0.25, 0.10};

  auto structure = [](std::vector<std::vector<double>>& fields, int H, int W) {
    // A winding river and a straight road so the map has Jasper-like features.
    for (int y = 0; y < H; ++y) {
      const double river_x = 0.35 * W + 0.18 * W * std::sin(2.6 * y / H * 3.14159);
      for (int x = 0; x < W; ++x) {
        const std::size_t p = static_cast<std::size_t>(y) * W + x;
        const double dr = std::abs(x - river_x);
        fields[2][p] += 2.2 * std::exp(-0.5 * (dr / 2.5) * (dr / 2.5));
        const double droad = std::abs((x - 0.15 * W) - 0.55 * y);
        fields[0][p] += 1.9 * std::exp(-0.5 * (droad / 1.8) * (droad / 1.8));
      }
    }
  };

  return assemble("jasper_synth", 224, 380.0, 2500.0, names, spectra, bias, opts,
                  structure);
}

Scene synth_urban_like(const SynthOptions& opts) {
  const std::vector<std::string> names = {"Asphalt", "Grass",  "Tree",
                                          "Roof",    "Metal", "Dirt"};
  const std::vector<Spectrum> spectra = {
      road_spectrum,
      vegetation_spectrum(705.0, 0.48, 0.09),
      vegetation_spectrum(728.0, 0.40, 0.04),
      roof_spectrum,
      metal_spectrum,
      soil_spectrum};
  const std::vector<double> bias = {-0.10, 0.05, 0.00, -0.15, -0.75, -0.20};

  auto structure = [](std::vector<std::vector<double>>& fields, int H, int W) {
    // Street grid boosts asphalt along horizontal/vertical lines.
    for (int y = 0; y < H; ++y) {
      for (int x = 0; x < W; ++x) {
        const std::size_t p = static_cast<std::size_t>(y) * W + x;
        const int sx = x % 28;
        const int sy = y % 28;
        const double d = std::min({sx, 27 - sx, sy, 27 - sy});
        if (d < 2) fields[0][p] += 1.6;
      }
    }
  };

  SynthOptions o = opts;
  if (o.Hs == 100 && o.Ws == 100) {
    o.Hs = 128;
    o.Ws = 128;
  }
  return assemble("urban_synth", 210, 400.0, 2500.0, names, spectra, bias, o,
                  structure);
}

Scene synth_scene(const std::string& kind, const SynthOptions& opts) {
  if (kind == "jasper") return synth_jasper_like(opts);
  if (kind == "urban") return synth_urban_like(opts);
  throw std::runtime_error("unknown synthetic scene kind: " + kind);
}

}  // namespace hsifuse
