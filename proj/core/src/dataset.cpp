#include "hsifuse/dataset.hpp"

#include <algorithm>
#include <cmath>

#include "hsifuse/io_util.hpp"
#include "hsifuse/rng.hpp"
#include "json.hpp"

namespace hsifuse {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<TileSpec> enumerate_tiles(const Scene& scene, int stride) {
  require(stride > 0, "stride must be positive");
  require(scene.Hs >= kTileSize && scene.Ws >= kTileSize,
          "scene smaller than one tile");
  std::vector<TileSpec> tiles;
  for (int y = 0; y + kTileSize <= scene.Hs; y += stride)
    for (int x = 0; x + kTileSize <= scene.Ws; x += stride)
      tiles.push_back(TileSpec{x, y, kTileSize, stride});
  return tiles;
}

TileSplit split_tiles(const std::vector<TileSpec>& tiles, const Scene& scene,
                      double test_fraction, std::uint64_t seed) {
  (void)seed;  // recorded by callers; block assignment is deterministic
  require(test_fraction > 0.0 && test_fraction < 1.0,
          "test_fraction must lie strictly between 0 and 1");
  require(!tiles.empty(), "no tiles to split");

  const int block = kTileSize;
  const auto tiles_in = [&](int x_lo, int x_hi) {
    std::size_t n = 0;
    for (const auto& t : tiles)
      if (t.x >= x_lo && t.x + t.size <= x_hi) ++n;
    return n;
  };

  // Assign 16-column blocks to test from the right until coverage reached.
  const std::size_t want =
      static_cast<std::size_t>(std::ceil(test_fraction * tiles.size()));
  int split_col = scene.Ws;
  while (split_col > 0 && tiles_in(split_col, scene.Ws) < want) {
    split_col -= block;
    if (split_col < 0) split_col = 0;
  }
  require(split_col > 0, "test fraction leaves no training columns");

  TileSplit out;
  out.split_column = split_col;
  for (const auto& t : tiles) {
    if (t.x + t.size <= split_col) {
      out.train.push_back(t);
    } else if (t.x >= split_col) {
      // Thin the test side to the non-overlapping 16-grid.
      if ((t.x - split_col) % kTileSize == 0 && t.y % kTileSize == 0)
        out.test.push_back(t);
    }
    // Straddling tiles are dropped.
  }
  require(!out.train.empty() && !out.test.empty(),
          "split produced an empty train or test set");
  return out;
}

namespace {

SamplePair build_one(const Scene& scene, int x, int y, const BandSelection& sel,
                     const EffectChain& chain, std::uint64_t seed) {
  const SubCube full = extract_subcube(scene, x, y, kTileSize);
  SamplePair s;
  s.Z = derive_rgb(full, scene);
  SubCube low = spatial_downsample(full, 2);
  s.X = apply_band_selection(low, sel);
  s.T = extract_labels(scene, x, y, kTileSize);
  s.meta.origin_x = x;
  s.meta.origin_y = y;
  s.meta.seed = seed;
  apply_chain(s.Z, s.X, chain, seed);
  return s;
}

}  // namespace

PairDataset build_pairs(const Scene& scene, const std::vector<TileSpec>& tiles,
                        const BandSelection& sel, const EffectChain& chain,
                        std::uint64_t seed, Split split) {
  require(sel.selected.size() == 6, "band selection must hold 6 bands");
  for (const int c : sel.selected)
    require(c >= 0 && c < scene.C, "band selection does not fit scene");

  PairDataset ds;
  ds.split = split;
  ds.scene_name = scene.name;
  ds.class_names = scene.class_names;
  ds.selection = sel;
  ds.chain = chain;
  ds.build_seed = seed;
  ds.samples.reserve(tiles.size());
  for (std::size_t i = 0; i < tiles.size(); ++i) {
    const auto& t = tiles[i];
    ds.samples.push_back(
        build_one(scene, t.x, t.y, sel, chain, tile_seed(seed, i)));
  }
  return ds;
}

SamplePair rebuild_sample(const Scene& scene, const SampleMeta& meta,
                          const BandSelection& sel, const EffectChain& chain) {
  return build_one(scene, meta.origin_x, meta.origin_y, sel, chain, meta.seed);
}

void save_dataset(const PairDataset& ds, const fs::path& dir) {
  fs::create_directories(dir);

  std::vector<float> z_payload, x_payload;
  std::vector<std::uint8_t> t_payload;
  json index = json::array();
  for (const auto& s : ds.samples) {
    json e;
    e["x"] = s.meta.origin_x;
    e["y"] = s.meta.origin_y;
    e["seed"] = s.meta.seed;
    e["z_off"] = z_payload.size() * sizeof(float);
    e["x_off"] = x_payload.size() * sizeof(float);
    e["t_off"] = t_payload.size();
    index.push_back(e);
    z_payload.insert(z_payload.end(), s.Z.data.data.begin(), s.Z.data.data.end());
    x_payload.insert(x_payload.end(), s.X.data.data.begin(), s.X.data.data.end());
    t_payload.insert(t_payload.end(), s.T.data.data.begin(), s.T.data.data.end());
  }

  json manifest;
  manifest["scene_name"] = ds.scene_name;
  manifest["class_names"] = ds.class_names;
  manifest["split"] = ds.split == Split::Train ? "train" : "test";
  manifest["build_seed"] = ds.build_seed;
  manifest["chain"] = chain_to_json(ds.chain);
  manifest["selection"] = {{"candidates", ds.selection.candidates},
                           {"selected", ds.selection.selected},
                           {"class_means", ds.selection.class_means},
                           {"seed", ds.selection.source_seed},
                           {"scene_name", ds.selection.scene_name}};
  manifest["samples"] = index;

  io::write_text(dir / "manifest.json", manifest.dump(2) + "\n");
  io::write_f32(dir / "Z.f32", z_payload);
  io::write_f32(dir / "X.f32", x_payload);
  io::write_u8(dir / "T.u8", t_payload);
}

PairDataset load_dataset(const fs::path& dir) {
  const json manifest = json::parse(io::read_text(dir / "manifest.json"));

  PairDataset ds;
  ds.scene_name = manifest.at("scene_name").get<std::string>();
  ds.class_names = manifest.at("class_names").get<std::vector<std::string>>();
  ds.split = manifest.at("split").get<std::string>() == "train" ? Split::Train
                                                                : Split::Test;
  ds.build_seed = manifest.at("build_seed").get<std::uint64_t>();
  ds.chain = chain_from_json(manifest.at("chain"));
  const auto& selj = manifest.at("selection");
  ds.selection.candidates = selj.at("candidates").get<std::vector<int>>();
  ds.selection.selected = selj.at("selected").get<std::vector<int>>();
  ds.selection.class_means =
      selj.at("class_means").get<std::vector<std::vector<double>>>();
  ds.selection.source_seed = selj.at("seed").get<std::uint64_t>();
  ds.selection.scene_name = selj.at("scene_name").get<std::string>();

  const auto& index = manifest.at("samples");
  const std::size_t n = index.size();
  constexpr std::size_t z_len = 3 * 16 * 16;
  constexpr std::size_t x_len = 6 * 8 * 8;
  constexpr std::size_t t_len = 16 * 16;
  const auto z_payload = io::read_f32(dir / "Z.f32", n * z_len);
  const auto x_payload = io::read_f32(dir / "X.f32", n * x_len);
  const auto t_payload = io::read_u8(dir / "T.u8", n * t_len);

  const int L = static_cast<int>(ds.class_names.size());
  ds.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& e = index[i];
    auto& s = ds.samples[i];
    s.meta.origin_x = e.at("x").get<int>();
    s.meta.origin_y = e.at("y").get<int>();
    s.meta.seed = e.at("seed").get<std::uint64_t>();
    require(e.at("z_off").get<std::size_t>() == i * z_len * sizeof(float) &&
                e.at("x_off").get<std::size_t>() == i * x_len * sizeof(float) &&
                e.at("t_off").get<std::size_t>() == i * t_len,
            "corrupt manifest: sample offsets out of order");

    s.Z.data = Grid3(3, 16, 16);
    s.Z.origin_x = s.meta.origin_x;
    s.Z.origin_y = s.meta.origin_y;
    std::copy_n(z_payload.begin() + static_cast<std::ptrdiff_t>(i * z_len), z_len,
                s.Z.data.data.begin());

    s.X.bands = 6;
    s.X.h = 8;
    s.X.w = 8;
    s.X.origin_x = s.meta.origin_x;
    s.X.origin_y = s.meta.origin_y;
    s.X.data = Grid3(6, 8, 8);
    std::copy_n(x_payload.begin() + static_cast<std::ptrdiff_t>(i * x_len), x_len,
                s.X.data.data.begin());

    s.T.data = LabelGrid(16, 16);
    std::copy_n(t_payload.begin() + static_cast<std::ptrdiff_t>(i * t_len), t_len,
                s.T.data.data.begin());
    for (const auto lbl : s.T.data.data)
      require(lbl < L, "label tile entry >= L");
  }
  return ds;
}

}  // namespace hsifuse
