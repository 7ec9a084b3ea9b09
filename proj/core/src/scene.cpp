#include "hsifuse/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hsifuse/io_util.hpp"
#include "json.hpp"

namespace hsifuse {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void validate_scene(const Scene& s) {
  require(s.C > 0 && s.Hs > 0 && s.Ws > 0, "scene dimensions must be positive");
  const int L = s.num_classes();
  require(L > 0, "scene needs at least one class name");
  require(s.cube.size() == static_cast<std::size_t>(s.C) * s.Hs * s.Ws,
          "cube payload size does not match dimensions");
  require(s.labels.data.size() == static_cast<std::size_t>(s.Hs) * s.Ws,
          "label payload size does not match dimensions");
  for (const auto v : s.cube.data) {
    require(std::isfinite(v) && v >= 0.0f && v <= 1.0f,
            "cube value outside [0,1] in scene " + s.name);
  }
  for (const auto l : s.labels.data) {
    require(l < L, "label " + std::to_string(l) + " >= L=" + std::to_string(L) +
                       " in scene " + s.name);
  }
  if (s.wavelengths_nm) {
    require(static_cast<int>(s.wavelengths_nm->size()) == s.C,
            "wavelengths_nm length must equal C");
    for (std::size_t i = 1; i < s.wavelengths_nm->size(); ++i) {
      require((*s.wavelengths_nm)[i] > (*s.wavelengths_nm)[i - 1],
              "wavelengths_nm must be strictly increasing");
    }
  }
}

}  // namespace

Scene load_scene(const fs::path& dir) {
  const json meta = json::parse(io::read_text(dir / "meta.json"));

  Scene s;
  s.name = meta.at("name").get<std::string>();
  s.C = meta.at("C").get<int>();
  s.Hs = meta.at("Hs").get<int>();
  s.Ws = meta.at("Ws").get<int>();
  const int L = meta.at("L").get<int>();
  s.class_names = meta.at("class_names").get<std::vector<std::string>>();
  require(static_cast<int>(s.class_names.size()) == L,
          "class_names length does not match L");
  const auto band_min = meta.at("band_min").get<std::vector<double>>();
  const auto band_max = meta.at("band_max").get<std::vector<double>>();
  require(static_cast<int>(band_min.size()) == s.C &&
              static_cast<int>(band_max.size()) == s.C,
          "band_min/band_max length must equal C");
  if (meta.contains("wavelengths_nm") && !meta["wavelengths_nm"].is_null()) {
    s.wavelengths_nm = meta["wavelengths_nm"].get<std::vector<double>>();
  }

  const std::size_t plane = static_cast<std::size_t>(s.Hs) * s.Ws;
  const auto raw = io::read_f32(dir / "cube.f32", static_cast<std::size_t>(s.C) * plane);
  s.cube = Grid3(s.C, s.Hs, s.Ws);
  for (int b = 0; b < s.C; ++b) {
    const double lo = band_min[b];
    const double hi = band_max[b];
    const double range = hi - lo;
    for (std::size_t i = 0; i < plane; ++i) {
      const std::size_t idx = static_cast<std::size_t>(b) * plane + i;
      double v = raw[idx];
      // Degenerate bands (max == min) normalize to 0.
      v = range > 0.0 ? (v - lo) / range : 0.0;
      s.cube.data[idx] = static_cast<float>(std::clamp(v, 0.0, 1.0));
    }
  }

  s.labels.h = s.Hs;
  s.labels.w = s.Ws;
  s.labels.data = io::read_u8(dir / "labels.u8", plane);

  validate_scene(s);
  return s;
}

void save_scene(const Scene& scene, const fs::path& dir) {
  validate_scene(scene);
  fs::create_directories(dir);

  json meta;
  meta["name"] = scene.name;
  meta["C"] = scene.C;
  meta["Hs"] = scene.Hs;
  meta["Ws"] = scene.Ws;
  meta["L"] = scene.num_classes();
  meta["class_names"] = scene.class_names;
  meta["band_min"] = std::vector<double>(scene.C, 0.0);
  meta["band_max"] = std::vector<double>(scene.C, 1.0);
  if (scene.wavelengths_nm) meta["wavelengths_nm"] = *scene.wavelengths_nm;

  io::write_text(dir / "meta.json", meta.dump(2) + "\n");
  io::write_f32(dir / "cube.f32", scene.cube.data);
  io::write_u8(dir / "labels.u8", scene.labels.data);
}

void ingest_scene(const std::string& name, int C, int Hs, int Ws,
                  const std::vector<float>& raw_cube,
                  const std::vector<std::uint8_t>& labels,
                  const std::vector<std::string>& class_names,
                  const std::optional<std::vector<double>>& wavelengths_nm,
                  const fs::path& out_dir) {
  const std::size_t plane = static_cast<std::size_t>(Hs) * Ws;
  require(raw_cube.size() == static_cast<std::size_t>(C) * plane,
          "raw cube size does not match C*Hs*Ws");
  require(labels.size() == plane, "labels size does not match Hs*Ws");

  std::vector<double> band_min(C), band_max(C);
  for (int b = 0; b < C; ++b) {
    float lo = std::numeric_limits<float>::infinity();
    float hi = -std::numeric_limits<float>::infinity();
    for (std::size_t i = 0; i < plane; ++i) {
      const float v = raw_cube[static_cast<std::size_t>(b) * plane + i];
      require(std::isfinite(v), "non-finite value in raw cube");
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    band_min[b] = lo;
    band_max[b] = hi;
  }

  fs::create_directories(out_dir);
  json meta;
  meta["name"] = name;
  meta["C"] = C;
  meta["Hs"] = Hs;
  meta["Ws"] = Ws;
  meta["L"] = static_cast<int>(class_names.size());
  meta["class_names"] = class_names;
  meta["band_min"] = band_min;
  meta["band_max"] = band_max;
  if (wavelengths_nm) meta["wavelengths_nm"] = *wavelengths_nm;

  io::write_text(out_dir / "meta.json", meta.dump(2) + "\n");
  io::write_f32(out_dir / "cube.f32", raw_cube);
  io::write_u8(out_dir / "labels.u8", labels);

  // Round-trip through the loader so malformed input fails at ingest time.
  (void)load_scene(out_dir);
}

SubCube extract_subcube(const Scene& scene, int x, int y, int size) {
  require(x >= 0 && y >= 0 && size > 0 && x + size <= scene.Ws && y + size <= scene.Hs,
          "subcube window out of scene bounds");
  SubCube sub;
  sub.bands = scene.C;
  sub.h = size;
  sub.w = size;
  sub.origin_x = x;
  sub.origin_y = y;
  sub.data = Grid3(scene.C, size, size);
  for (int b = 0; b < scene.C; ++b)
    for (int j = 0; j < size; ++j)
      for (int i = 0; i < size; ++i)
        sub.data.at(b, j, i) = scene.cube.at(b, y + j, x + i);
  return sub;
}

LabelTile extract_labels(const Scene& scene, int x, int y, int size) {
  require(x >= 0 && y >= 0 && x + size <= scene.Ws && y + size <= scene.Hs,
          "label window out of scene bounds");
  LabelTile t;
  t.data = LabelGrid(size, size);
  for (int j = 0; j < size; ++j)
    for (int i = 0; i < size; ++i)
      t.data.at(j, i) = scene.labels.at(y + j, x + i);
  return t;
}

RgbTile derive_rgb(const SubCube& sub, const Scene& scene,
                   int fallback_r, int fallback_g, int fallback_b) {
  require(sub.bands == scene.C, "derive_rgb expects the full band stack");
  require(sub.bands >= 3, "derive_rgb needs at least 3 bands");
  require(sub.h == kTileSize && sub.w == kTileSize,
          "derive_rgb expects a 16x16 tile");

  int pick[3];
  if (scene.wavelengths_nm) {
    const auto& wl = *scene.wavelengths_nm;
    const double targets[3] = {650.0, 550.0, 450.0};  // R, G, B
    for (int c = 0; c < 3; ++c) {
      int best = 0;
      double best_d = std::abs(wl[0] - targets[c]);
      for (int b = 1; b < scene.C; ++b) {
        const double d = std::abs(wl[b] - targets[c]);
        if (d < best_d) {
          best_d = d;
          best = b;
        }
      }
      pick[c] = best;
    }
  } else {
    pick[0] = fallback_r;
    pick[1] = fallback_g;
    pick[2] = fallback_b;
    for (const int p : pick)
      require(p >= 0 && p < sub.bands, "RGB fallback band index out of range");
  }

  RgbTile tile;
  tile.origin_x = sub.origin_x;
  tile.origin_y = sub.origin_y;
  tile.data = Grid3(3, kTileSize, kTileSize);
  for (int c = 0; c < 3; ++c)
    for (int j = 0; j < kTileSize; ++j)
      for (int i = 0; i < kTileSize; ++i)
        tile.data.at(c, j, i) = sub.data.at(pick[c], j, i);
  return tile;
}

SubCube spatial_downsample(const SubCube& sub, int factor) {
  require(factor > 0 && sub.h % factor == 0 && sub.w % factor == 0,
          "downsample factor must divide tile dimensions");
  SubCube out;
  out.bands = sub.bands;
  out.h = sub.h / factor;
  out.w = sub.w / factor;
  out.origin_x = sub.origin_x;
  out.origin_y = sub.origin_y;
  out.data = Grid3(sub.bands, out.h, out.w);
  const double inv = 1.0 / (factor * factor);
  for (int b = 0; b < sub.bands; ++b) {
    for (int j = 0; j < out.h; ++j) {
      for (int i = 0; i < out.w; ++i) {
        double acc = 0.0;
        for (int dj = 0; dj < factor; ++dj)
          for (int di = 0; di < factor; ++di)
            acc += sub.data.at(b, j * factor + dj, i * factor + di);
        out.data.at(b, j, i) = static_cast<float>(acc * inv);
      }
    }
  }
  return out;
}

}  // namespace hsifuse
