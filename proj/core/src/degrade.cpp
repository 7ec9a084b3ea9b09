#include "hsifuse/degrade.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hsifuse/rng.hpp"

namespace hsifuse {

using nlohmann::json;

std::string effect_kind_name(EffectKind k) {
  switch (k) {
    case EffectKind::LowLight: return "low_light";
    case EffectKind::Contrast: return "contrast";
    case EffectKind::Scattering: return "scattering";
  }
  throw std::runtime_error("unknown effect kind");
}

EffectKind effect_kind_from_name(const std::string& name) {
  if (name == "low_light") return EffectKind::LowLight;
  if (name == "contrast") return EffectKind::Contrast;
  if (name == "scattering") return EffectKind::Scattering;
  throw std::runtime_error("unknown effect kind: " + name);
}

void validate_chain(const EffectChain& chain) {
  int last_rank = -1;
  for (const auto& step : chain.steps) {
    const int rank = static_cast<int>(step.kind);
    require(rank > last_rank,
            "effect chain order must be low_light -> contrast -> scattering, "
            "each at most once");
    last_rank = rank;
    switch (step.kind) {
      case EffectKind::LowLight:
        require(step.low_light.gamma >= 1.0, "low_light gamma must be >= 1");
        break;
      case EffectKind::Contrast:
        require(step.contrast.window >= 3 && step.contrast.window % 2 == 1,
                "contrast window must be odd and >= 3");
        require(step.contrast.sigma > 0.0, "contrast sigma must be positive");
        break;
      case EffectKind::Scattering:
        require(step.scattering.A >= 0.0 && step.scattering.A <= 1.0,
                "scattering A must lie in [0,1]");
        require(step.scattering.beta > 0.0, "scattering beta must be positive");
        require(step.scattering.d_max > 0.0, "scattering d_max must be positive");
        break;
    }
  }
}

EffectChain make_chain(bool with_low_light, double gamma, bool with_contrast,
                       const ContrastConfig& contrast, bool with_scattering,
                       const ScatteringConfig& scattering, std::uint64_t seed) {
  EffectChain chain;
  chain.seed = seed;
  if (with_low_light) {
    EffectStep s;
    s.kind = EffectKind::LowLight;
    s.low_light.gamma = gamma;
    chain.steps.push_back(s);
  }
  if (with_contrast) {
    EffectStep s;
    s.kind = EffectKind::Contrast;
    s.contrast = contrast;
    chain.steps.push_back(s);
  }
  if (with_scattering) {
    EffectStep s;
    s.kind = EffectKind::Scattering;
    s.scattering = scattering;
    chain.steps.push_back(s);
  }
  validate_chain(chain);
  return chain;
}

json chain_to_json(const EffectChain& chain) {
  json steps = json::array();
  for (const auto& step : chain.steps) {
    json j;
    j["kind"] = effect_kind_name(step.kind);
    switch (step.kind) {
      case EffectKind::LowLight:
        j["params"] = {{"gamma", step.low_light.gamma}};
        break;
      case EffectKind::Contrast:
        j["params"] = {{"sigma", step.contrast.sigma},
                       {"window", step.contrast.window}};
        break;
      case EffectKind::Scattering:
        j["params"] = {{"A", step.scattering.A},
                       {"beta", step.scattering.beta},
                       {"d_max", step.scattering.d_max}};
        break;
    }
    j["seed"] = chain.seed;
    steps.push_back(j);
  }
  return json{{"seed", chain.seed}, {"steps", steps}};
}

EffectChain chain_from_json(const json& j) {
  EffectChain chain;
  chain.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& sj : j.at("steps")) {
    EffectStep s;
    s.kind = effect_kind_from_name(sj.at("kind").get<std::string>());
    const auto& p = sj.at("params");
    switch (s.kind) {
      case EffectKind::LowLight:
        s.low_light.gamma = p.at("gamma").get<double>();
        break;
      case EffectKind::Contrast:
        s.contrast.sigma = p.at("sigma").get<double>();
        s.contrast.window = p.at("window").get<int>();
        break;
      case EffectKind::Scattering:
        s.scattering.A = p.at("A").get<double>();
        s.scattering.beta = p.at("beta").get<double>();
        s.scattering.d_max = p.at("d_max").get<double>();
        break;
    }
    chain.steps.push_back(s);
  }
  validate_chain(chain);
  return chain;
}

Grid3 low_light(const Grid3& img, const LowLightConfig& cfg) {
  require(cfg.gamma >= 1.0, "low_light gamma must be >= 1");
  Grid3 out = img;
  const std::size_t plane = static_cast<std::size_t>(img.h) * img.w;
  for (int b = 0; b < img.bands; ++b) {
    float m = img.data[static_cast<std::size_t>(b) * plane];
    float M = m;
    for (std::size_t i = 0; i < plane; ++i) {
      const float v = img.data[static_cast<std::size_t>(b) * plane + i];
      m = std::min(m, v);
      M = std::max(M, v);
    }
    if (M <= m) continue;  // constant band
    const double range = static_cast<double>(M) - m;
    for (std::size_t i = 0; i < plane; ++i) {
      const std::size_t idx = static_cast<std::size_t>(b) * plane + i;
      const double g = (img.data[idx] - m) / range;
      out.data[idx] = static_cast<float>(m + range * std::pow(g, cfg.gamma));
    }
  }
  return out;
}

std::vector<double> make_depth_field(int h, int w, const ScatteringConfig& cfg) {
  Rng rng(cfg.seed);
  std::vector<double> depth(static_cast<std::size_t>(h) * w);
  for (auto& d : depth) d = rng.uniform(0.0, cfg.d_max);
  return depth;
}

Grid3 atmospheric_scattering(const Grid3& img, const std::vector<double>& depth,
                             const ScatteringConfig& cfg) {
  const std::size_t plane = static_cast<std::size_t>(img.h) * img.w;
  require(depth.size() == plane, "depth field shape does not match image");
  Grid3 out = img;
  std::vector<double> t(plane);
  for (std::size_t i = 0; i < plane; ++i) {
    require(depth[i] >= 0.0, "depth must be non-negative");
    t[i] = std::exp(-cfg.beta * depth[i]);
  }
  for (int b = 0; b < img.bands; ++b) {
    for (std::size_t i = 0; i < plane; ++i) {
      const std::size_t idx = static_cast<std::size_t>(b) * plane + i;
      out.data[idx] =
          static_cast<float>(img.data[idx] * t[i] + cfg.A * (1.0 - t[i]));
    }
  }
  return out;
}

namespace {

// Gaussian blur with replicate borders, separable passes.
std::vector<double> gaussian_smooth(const std::vector<double>& src, int h, int w,
                                    double sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> kernel(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    kernel[i + radius] = std::exp(-0.5 * (i / sigma) * (i / sigma));
    sum += kernel[i + radius];
  }
  for (auto& k : kernel) k /= sum;

  std::vector<double> tmp(src.size()), dst(src.size());
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        const int xx = std::clamp(x + i, 0, w - 1);
        acc += kernel[i + radius] * src[static_cast<std::size_t>(y) * w + xx];
      }
      tmp[static_cast<std::size_t>(y) * w + x] = acc;
    }
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        const int yy = std::clamp(y + i, 0, h - 1);
        acc += kernel[i + radius] * tmp[static_cast<std::size_t>(yy) * w + x];
      }
      dst[static_cast<std::size_t>(y) * w + x] = acc;
    }
  return dst;
}

}  // namespace

Grid3 contrast_enhance(const Grid3& img, const ContrastConfig& cfg) {
  require(cfg.window >= 3 && cfg.window % 2 == 1, "contrast window must be odd");
  require(cfg.sigma > 0.0, "contrast sigma must be positive");
  const int h = img.h;
  const int w = img.w;
  const int r = cfg.window / 2;
  const std::size_t plane = static_cast<std::size_t>(h) * w;

  Grid3 out = img;
  std::vector<double> band(plane);
  for (int b = 0; b < img.bands; ++b) {
    for (std::size_t i = 0; i < plane; ++i)
      band[i] = img.data[static_cast<std::size_t>(b) * plane + i];
    const auto guide = gaussian_smooth(band, h, w, cfg.sigma);

    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        // Local statistics of the guidance over the (truncated) window.
        double m = std::numeric_limits<double>::infinity();
        double M = -m;
        double a = 0.0;
        int n = 0;
        for (int dy = -r; dy <= r; ++dy) {
          const int yy = y + dy;
          if (yy < 0 || yy >= h) continue;
          for (int dx = -r; dx <= r; ++dx) {
            const int xx = x + dx;
            if (xx < 0 || xx >= w) continue;
            const double v = guide[static_cast<std::size_t>(yy) * w + xx];
            m = std::min(m, v);
            M = std::max(M, v);
            a += v;
            ++n;
          }
        }
        a /= n;
        const std::size_t idx = static_cast<std::size_t>(b) * plane +
                                static_cast<std::size_t>(y) * w + x;
        if (M - m < 1e-6) continue;  // locally constant

        const double g =
            std::clamp((img.data[idx] - m) / (M - m), 0.0, 1.0);
        const double ga = (a - m) / (M - m);
        // Unique parabola through (0,0), (ga, 0.5), (1,1); degenerates to the
        // linear stretch when ga hits an endpoint.
        const double denom = ga * ga - ga;
        const double alpha = std::abs(denom) < 1e-12 ? 0.0 : (0.5 - ga) / denom;
        const double v = alpha * g * g + (1.0 - alpha) * g;
        out.data[idx] = static_cast<float>(std::clamp(v, 0.0, 1.0));
      }
    }
  }
  return out;
}

void apply_chain(RgbTile& rgb, SubCube& hsi, const EffectChain& chain,
                 std::uint64_t tile_seed) {
  validate_chain(chain);
  for (const auto& step : chain.steps) {
    switch (step.kind) {
      case EffectKind::LowLight:
        rgb.data = low_light(rgb.data, step.low_light);
        hsi.data = low_light(hsi.data, step.low_light);
        break;
      case EffectKind::Contrast:
        rgb.data = contrast_enhance(rgb.data, step.contrast);
        hsi.data = contrast_enhance(hsi.data, step.contrast);
        break;
      case EffectKind::Scattering: {
        ScatteringConfig cfg = step.scattering;
        cfg.seed = tile_seed;
        const auto depth_hi = make_depth_field(rgb.data.h, rgb.data.w, cfg);
        rgb.data = atmospheric_scattering(rgb.data, depth_hi, cfg);
        // Box-average the depth down so HSI haze matches spatially.
        require(rgb.data.h % hsi.data.h == 0 && rgb.data.w % hsi.data.w == 0,
                "HSI tile must evenly divide the RGB tile");
        const int fy = rgb.data.h / hsi.data.h;
        const int fx = rgb.data.w / hsi.data.w;
        std::vector<double> depth_lo(static_cast<std::size_t>(hsi.data.h) *
                                     hsi.data.w);
        for (int y = 0; y < hsi.data.h; ++y)
          for (int x = 0; x < hsi.data.w; ++x) {
            double acc = 0.0;
            for (int dy = 0; dy < fy; ++dy)
              for (int dx = 0; dx < fx; ++dx)
                acc += depth_hi[static_cast<std::size_t>(y * fy + dy) *
                                    rgb.data.w +
                                (x * fx + dx)];
            depth_lo[static_cast<std::size_t>(y) * hsi.data.w + x] =
                acc / (fy * fx);
          }
        hsi.data = atmospheric_scattering(hsi.data, depth_lo, cfg);
        break;
      }
    }
  }
}

}  // namespace hsifuse
