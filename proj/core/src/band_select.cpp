#include "hsifuse/band_select.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hsifuse/io_util.hpp"
#include "hsifuse/rng.hpp"
#include "json.hpp"

namespace hsifuse {

using nlohmann::json;

PixelRegion full_region(const Scene& scene) {
  return column_region(scene, 0, scene.Ws);
}

PixelRegion column_region(const Scene& scene, int x_lo, int x_hi) {
  require(0 <= x_lo && x_lo < x_hi && x_hi <= scene.Ws, "bad column range");
  PixelRegion r;
  r.pixels.reserve(static_cast<std::size_t>(scene.Hs) * (x_hi - x_lo));
  for (int y = 0; y < scene.Hs; ++y)
    for (int x = x_lo; x < x_hi; ++x)
      r.pixels.emplace_back(x, y);
  return r;
}

SeriesCollection pixels_to_series(const Scene& scene, const PixelRegion& region) {
  require(!region.pixels.empty(), "empty pixel region");
  SeriesCollection coll;
  coll.C = scene.C;
  coll.L = scene.num_classes();
  coll.series.reserve(region.pixels.size());
  for (const auto& [x, y] : region.pixels) {
    require(x >= 0 && x < scene.Ws && y >= 0 && y < scene.Hs,
            "region pixel outside scene");
    LabeledSeries s;
    s.values.resize(scene.C);
    for (int b = 0; b < scene.C; ++b) s.values[b] = scene.cube.at(b, y, x);
    s.label = scene.labels.at(y, x);
    s.scene_name = scene.name;
    s.x = x;
    s.y = y;
    coll.series.push_back(std::move(s));
  }
  return coll;
}

SeriesCollection sample_series(const SeriesCollection& coll, int n, std::uint64_t seed) {
  const int total = static_cast<int>(coll.series.size());
  require(n > 0 && n <= total, "sample size exceeds collection size");

  std::vector<std::vector<int>> by_class(coll.L);
  for (int i = 0; i < total; ++i)
    by_class[coll.series[i].label].push_back(i);

  int present = 0;
  for (const auto& g : by_class)
    if (!g.empty()) ++present;
  require(n >= present, "sample size cannot represent every present class");

  Rng rng(seed);
  std::vector<char> chosen(total, 0);
  // One guaranteed pick per present class, then uniform fill from the rest.
  for (const auto& g : by_class) {
    if (g.empty()) continue;
    chosen[g[rng.uniform_int(g.size())]] = 1;
  }
  std::vector<int> rest;
  rest.reserve(total);
  for (int i = 0; i < total; ++i)
    if (!chosen[i]) rest.push_back(i);
  rng.shuffle(rest);
  const int need = n - present;
  for (int i = 0; i < need; ++i) chosen[rest[i]] = 1;

  SeriesCollection out;
  out.C = coll.C;
  out.L = coll.L;
  out.series.reserve(n);
  for (int i = 0; i < total; ++i)
    if (chosen[i]) out.series.push_back(coll.series[i]);
  return out;
}

ChannelScores score_timestamps(const SeriesCollection& coll) {
  const int C = coll.C;
  const int L = coll.L;

  std::vector<int> count(L, 0);
  for (const auto& s : coll.series) ++count[s.label];
  int present = 0;
  for (int l = 0; l < L; ++l) {
    if (count[l] == 0) continue;
    ++present;
    require(count[l] >= 2, "class " + std::to_string(l) +
                               " needs at least 2 series for scoring");
  }
  require(present >= 2, "scoring needs at least 2 classes present");

  // Per-class means.
  std::vector<std::vector<double>> mean(L, std::vector<double>(C, 0.0));
  for (const auto& s : coll.series)
    for (int c = 0; c < C; ++c) mean[s.label][c] += s.values[c];
  for (int l = 0; l < L; ++l)
    if (count[l] > 0)
      for (int c = 0; c < C; ++c) mean[l][c] /= count[l];

  // Pooled within-class sum of squares.
  std::vector<double> within(C, 0.0);
  for (const auto& s : coll.series)
    for (int c = 0; c < C; ++c) {
      const double d = s.values[c] - mean[s.label][c];
      within[c] += d * d;
    }
  int pooled_dof = 0;
  for (int l = 0; l < L; ++l)
    if (count[l] > 0) pooled_dof += count[l] - 1;

  ChannelScores out;
  out.score.resize(C);
  constexpr double kEps = 1e-8;
  for (int c = 0; c < C; ++c) {
    double grand = 0.0;
    for (int l = 0; l < L; ++l)
      if (count[l] > 0) grand += mean[l][c];
    grand /= present;
    double between = 0.0;
    for (int l = 0; l < L; ++l) {
      if (count[l] == 0) continue;
      const double d = mean[l][c] - grand;
      between += d * d;
    }
    between /= present;
    const double within_var = within[c] / pooled_dof;
    out.score[c] = between / (within_var + kEps);
  }
  return out;
}

std::vector<int> select_informative(const ChannelScores& scores, int k,
                                    int min_spacing) {
  const int C = static_cast<int>(scores.score.size());
  require(k > 0 && k <= C, "cannot select more channels than exist");

  // Descending score, ties toward the lower index.
  std::vector<int> order(C);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (scores.score[a] != scores.score[b]) return scores.score[a] > scores.score[b];
    return a < b;
  });

  for (int spacing = min_spacing; spacing >= 0; --spacing) {
    std::vector<int> picked;
    for (const int c : order) {
      bool ok = true;
      for (const int p : picked)
        if (std::abs(c - p) < spacing || c == p) {
          ok = false;
          break;
        }
      if (ok) picked.push_back(c);
      if (static_cast<int>(picked.size()) == k) break;
    }
    if (static_cast<int>(picked.size()) == k) {
      std::sort(picked.begin(), picked.end());
      return picked;
    }
  }
  throw std::runtime_error("cannot select " + std::to_string(k) + " channels");
}

std::vector<int> refine_channels(const std::vector<int>& candidates,
                                 const SeriesCollection& coll,
                                 const ChannelScores& scores) {
  constexpr int kFinal = 6;
  constexpr double kNearZero = 0.05;
  constexpr double kEdgeFraction = 0.10;
  require(static_cast<int>(candidates.size()) >= kFinal,
          "refine_channels needs at least 6 candidates");
  const int C = coll.C;

  // Class-averaged mean intensity per channel (classes weighted equally).
  std::vector<int> count(coll.L, 0);
  std::vector<std::vector<double>> mean(coll.L, std::vector<double>(C, 0.0));
  for (const auto& s : coll.series) {
    ++count[s.label];
    for (int c = 0; c < C; ++c) mean[s.label][c] += s.values[c];
  }
  int present = 0;
  for (int l = 0; l < coll.L; ++l)
    if (count[l] > 0) ++present;
  std::vector<double> class_avg(C, 0.0);
  for (int c = 0; c < C; ++c) {
    for (int l = 0; l < coll.L; ++l)
      if (count[l] > 0) class_avg[c] += mean[l][c] / count[l];
    class_avg[c] /= present;
  }

  const double lo_edge = kEdgeFraction * C;
  const double hi_edge = (1.0 - kEdgeFraction) * C;
  std::vector<int> kept, dropped;
  for (const int c : candidates) {
    const bool at_edge = c < lo_edge || c >= hi_edge;
    if (at_edge && class_avg[c] < kNearZero)
      dropped.push_back(c);
    else
      kept.push_back(c);
  }

  auto by_score = [&](std::vector<int>& v) {
    std::stable_sort(v.begin(), v.end(), [&](int a, int b) {
      if (scores.score[a] != scores.score[b]) return scores.score[a] > scores.score[b];
      return a < b;
    });
  };
  by_score(kept);
  by_score(dropped);

  std::vector<int> out;
  for (const int c : kept) {
    if (static_cast<int>(out.size()) == kFinal) break;
    out.push_back(c);
  }
  for (const int c : dropped) {
    if (static_cast<int>(out.size()) == kFinal) break;
    out.push_back(c);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::vector<double>> class_mean_signatures(const SeriesCollection& coll,
                                                       const std::vector<int>& selected) {
  const int L = coll.L;
  const int k = static_cast<int>(selected.size());
  std::vector<int> count(L, 0);
  std::vector<std::vector<double>> sig(L, std::vector<double>(k, 0.0));
  for (const auto& s : coll.series) {
    ++count[s.label];
    for (int j = 0; j < k; ++j) sig[s.label][j] += s.values[selected[j]];
  }
  for (int l = 0; l < L; ++l) {
    require(count[l] > 0,
            "class " + std::to_string(l) + " absent from collection");
    for (int j = 0; j < k; ++j) sig[l][j] /= count[l];
  }
  return sig;
}

SubCube apply_band_selection(const SubCube& sub, const BandSelection& sel) {
  for (const int c : sel.selected)
    require(c >= 0 && c < sub.bands, "selected band index " + std::to_string(c) +
                                         " outside stack of " +
                                         std::to_string(sub.bands));
  SubCube out;
  out.bands = static_cast<int>(sel.selected.size());
  out.h = sub.h;
  out.w = sub.w;
  out.origin_x = sub.origin_x;
  out.origin_y = sub.origin_y;
  out.data = Grid3(out.bands, out.h, out.w);
  for (int j = 0; j < out.bands; ++j) {
    const int src = sel.selected[j];
    for (int y = 0; y < out.h; ++y)
      for (int x = 0; x < out.w; ++x)
        out.data.at(j, y, x) = sub.data.at(src, y, x);
  }
  return out;
}

Reconstruction reconstruct_segmentation(const Scene& scene, const BandSelection& sel) {
  const int L = static_cast<int>(sel.class_means.size());
  const int k = static_cast<int>(sel.selected.size());
  Reconstruction rec;
  rec.labels = LabelGrid(scene.Hs, scene.Ws);
  std::size_t correct = 0;
  for (int y = 0; y < scene.Hs; ++y) {
    for (int x = 0; x < scene.Ws; ++x) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int l = 0; l < L; ++l) {
        double d = 0.0;
        for (int j = 0; j < k; ++j) {
          const double diff = scene.cube.at(sel.selected[j], y, x) - sel.class_means[l][j];
          d += diff * diff;
        }
        if (d < best_d) {  // strict: ties keep the lower class index
          best_d = d;
          best = l;
        }
      }
      rec.labels.at(y, x) = static_cast<std::uint8_t>(best);
      if (best == scene.labels.at(y, x)) ++correct;
    }
  }
  rec.accuracy = static_cast<double>(correct) /
                 (static_cast<double>(scene.Hs) * scene.Ws);
  return rec;
}

BandSelection fit_band_selection(const Scene& scene, const PixelRegion& region,
                                 int n, int k_candidates, std::uint64_t seed) {
  const auto all = pixels_to_series(scene, region);
  const auto sample = sample_series(all, n, seed);
  const auto scores = score_timestamps(sample);
  BandSelection sel;
  sel.candidates = select_informative(scores, k_candidates);
  sel.selected = refine_channels(sel.candidates, sample, scores);
  sel.class_means = class_mean_signatures(sample, sel.selected);
  sel.source_seed = seed;
  sel.scene_name = scene.name;
  return sel;
}

void save_band_selection(const BandSelection& sel, const std::filesystem::path& path) {
  json j;
  j["candidates"] = sel.candidates;
  j["selected"] = sel.selected;
  j["class_means"] = sel.class_means;
  j["seed"] = sel.source_seed;
  j["scene_name"] = sel.scene_name;
  io::write_text(path, j.dump(2) + "\n");
}

BandSelection load_band_selection(const std::filesystem::path& path) {
  const json j = json::parse(io::read_text(path));
  BandSelection sel;
  sel.candidates = j.at("candidates").get<std::vector<int>>();
  sel.selected = j.at("selected").get<std::vector<int>>();
  sel.class_means = j.at("class_means").get<std::vector<std::vector<double>>>();
  sel.source_seed = j.at("seed").get<std::uint64_t>();
  sel.scene_name = j.at("scene_name").get<std::string>();
  return sel;
}

}  // namespace hsifuse
