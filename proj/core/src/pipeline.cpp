#include "hsifuse/pipeline.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "hsifuse/io_util.hpp"
#include "hsifuse/nn/loss.hpp"
#include "hsifuse/nn/train.hpp"
#include "json.hpp"

namespace hsifuse {

namespace fs = std::filesystem;
using nlohmann::json;

EffectChain ChainConfig::to_chain() const {
  return make_chain(low_light_enabled, gamma, contrast_enabled, contrast,
                    scattering_enabled, scattering, seed);
}

namespace {

json chain_config_to_json(const ChainConfig& c) {
  return json{
      {"low_light", {{"enabled", c.low_light_enabled}, {"gamma", c.gamma}}},
      {"contrast",
       {{"enabled", c.contrast_enabled},
        {"sigma", c.contrast.sigma},
        {"window", c.contrast.window}}},
      {"scattering",
       {{"enabled", c.scattering_enabled},
        {"A", c.scattering.A},
        {"beta", c.scattering.beta},
        {"d_max", c.scattering.d_max}}},
      {"seed", c.seed}};
}

void chain_config_from_json(const json& j, ChainConfig& c) {
  if (j.contains("low_light")) {
    const auto& ll = j["low_light"];
    if (ll.contains("enabled")) c.low_light_enabled = ll["enabled"].get<bool>();
    if (ll.contains("gamma")) c.gamma = ll["gamma"].get<double>();
  }
  if (j.contains("contrast")) {
    const auto& ct = j["contrast"];
    if (ct.contains("enabled")) c.contrast_enabled = ct["enabled"].get<bool>();
    if (ct.contains("sigma")) c.contrast.sigma = ct["sigma"].get<double>();
    if (ct.contains("window")) c.contrast.window = ct["window"].get<int>();
  }
  if (j.contains("scattering")) {
    const auto& sc = j["scattering"];
    if (sc.contains("enabled")) c.scattering_enabled = sc["enabled"].get<bool>();
    if (sc.contains("A")) c.scattering.A = sc["A"].get<double>();
    if (sc.contains("beta")) c.scattering.beta = sc["beta"].get<double>();
    if (sc.contains("d_max")) c.scattering.d_max = sc["d_max"].get<double>();
  }
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
}

}  // namespace

RunConfig load_run_config(const fs::path& json_path) {
  const json j = json::parse(io::read_text(json_path));
  RunConfig cfg;
  if (j.contains("scene")) cfg.scene_dir = j["scene"].get<std::string>();
  if (j.contains("out")) cfg.out_dir = j["out"].get<std::string>();
  if (j.contains("fiber")) {
    const auto& f = j["fiber"];
    if (f.contains("n")) cfg.fiber.n = f["n"].get<int>();
    if (f.contains("candidates")) cfg.fiber.candidates = f["candidates"].get<int>();
    if (f.contains("final")) cfg.fiber.final_bands = f["final"].get<int>();
    if (f.contains("seed")) cfg.fiber.seed = f["seed"].get<std::uint64_t>();
  }
  if (j.contains("dataset")) {
    const auto& d = j["dataset"];
    if (d.contains("stride")) cfg.dataset.train_stride = d["stride"].get<int>();
    if (d.contains("test_fraction"))
      cfg.dataset.test_fraction = d["test_fraction"].get<double>();
    if (d.contains("seed")) cfg.dataset.seed = d["seed"].get<std::uint64_t>();
  }
  if (j.contains("chain")) chain_config_from_json(j["chain"], cfg.chain);
  if (j.contains("train")) {
    const auto& t = j["train"];
    if (t.contains("learning_rate"))
      cfg.train.learning_rate = t["learning_rate"].get<double>();
    if (t.contains("batch_size")) cfg.train.batch_size = t["batch_size"].get<int>();
    if (t.contains("epochs")) cfg.train.epochs = t["epochs"].get<int>();
    if (t.contains("seed")) cfg.train.seed = t["seed"].get<std::uint64_t>();
    if (t.contains("focal_gamma"))
      cfg.train.focal_gamma = t["focal_gamma"].get<double>();
    if (t.contains("model"))
      cfg.train.kind = nn::model_kind_from_name(t["model"].get<std::string>());
    if (t.contains("threads")) cfg.train.threads = t["threads"].get<int>();
  }
  if (j.contains("sweep")) {
    const auto& s = j["sweep"];
    if (s.contains("gammas")) cfg.sweep.gammas = s["gammas"].get<std::vector<double>>();
    if (s.contains("A_levels"))
      cfg.sweep.A_levels = s["A_levels"].get<std::vector<double>>();
    if (s.contains("contrast_flags"))
      cfg.sweep.contrast_flags = s["contrast_flags"].get<std::vector<bool>>();
    if (s.contains("beta")) cfg.sweep.beta = s["beta"].get<double>();
    if (s.contains("d_max")) cfg.sweep.d_max = s["d_max"].get<double>();
  }
  return cfg;
}

void save_run_config(const RunConfig& cfg, const fs::path& json_path) {
  json j;
  j["scene"] = cfg.scene_dir.string();
  j["out"] = cfg.out_dir.string();
  j["fiber"] = {{"n", cfg.fiber.n},
                {"candidates", cfg.fiber.candidates},
                {"final", cfg.fiber.final_bands},
                {"seed", cfg.fiber.seed}};
  j["dataset"] = {{"stride", cfg.dataset.train_stride},
                  {"test_fraction", cfg.dataset.test_fraction},
                  {"seed", cfg.dataset.seed}};
  j["chain"] = chain_config_to_json(cfg.chain);
  j["train"] = {{"learning_rate", cfg.train.learning_rate},
                {"batch_size", cfg.train.batch_size},
                {"epochs", cfg.train.epochs},
                {"seed", cfg.train.seed},
                {"focal_gamma", cfg.train.focal_gamma},
                {"model", nn::model_kind_name(cfg.train.kind)},
                {"threads", cfg.train.threads}};
  j["sweep"] = {{"gammas", cfg.sweep.gammas},
                {"A_levels", cfg.sweep.A_levels},
                {"contrast_flags", cfg.sweep.contrast_flags},
                {"beta", cfg.sweep.beta},
                {"d_max", cfg.sweep.d_max}};
  io::write_text(json_path, j.dump(2) + "\n");
}

namespace {

// Training region = columns left of the split; band selection and series
// sampling must never touch test columns.
TileSplit compute_split(const Scene& scene, const RunConfig& cfg) {
  const auto tiles = enumerate_tiles(scene, cfg.dataset.train_stride);
  return split_tiles(tiles, scene, cfg.dataset.test_fraction, cfg.dataset.seed);
}

std::string format_double(double v) {
  std::ostringstream ss;
  ss << std::setprecision(6) << std::fixed << v;
  return ss.str();
}

}  // namespace

BandSelection cmd_select_bands(const RunConfig& cfg) {
  const Scene scene = load_scene(cfg.scene_dir);
  const TileSplit split = compute_split(scene, cfg);
  const PixelRegion region = column_region(scene, 0, split.split_column);

  BandSelection sel = fit_band_selection(scene, region, cfg.fiber.n,
                                         cfg.fiber.candidates, cfg.fiber.seed);
  require(static_cast<int>(sel.selected.size()) == cfg.fiber.final_bands,
          "refinement did not produce the requested band count");

  const Reconstruction rec = reconstruct_segmentation(scene, sel);

  fs::create_directories(cfg.out_dir);
  save_band_selection(sel, cfg.out_dir / "bands.json");

  json report;
  report["scene"] = scene.name;
  report["candidates"] = sel.candidates;
  report["selected"] = sel.selected;
  report["reconstruction_accuracy"] = rec.accuracy;
  report["train_columns"] = split.split_column;
  report["sample_size"] = cfg.fiber.n;
  report["seed"] = cfg.fiber.seed;
  io::write_text(cfg.out_dir / "selection_report.json", report.dump(2) + "\n");

  io::write_u8(cfg.out_dir / "reconstruction.u8", rec.labels.data);
  const Palette palette = Palette::for_classes(scene.class_names);
  render_map(rec.labels, palette, cfg.out_dir / "reconstruction.ppm");
  render_map(scene.labels, palette, cfg.out_dir / "ground_truth.ppm");
  return sel;
}

BuildResult cmd_build(const RunConfig& cfg) {
  const Scene scene = load_scene(cfg.scene_dir);
  const BandSelection sel = load_band_selection(cfg.out_dir / "bands.json");
  const TileSplit split = compute_split(scene, cfg);
  const EffectChain chain = cfg.chain.to_chain();

  const PairDataset train = build_pairs(scene, split.train, sel, chain,
                                        cfg.dataset.seed, Split::Train);
  const PairDataset test = build_pairs(scene, split.test, sel, chain,
                                       cfg.dataset.seed + 1, Split::Test);

  BuildResult result;
  result.train_dir = cfg.out_dir / "dataset_train";
  result.test_dir = cfg.out_dir / "dataset_test";
  result.n_train = static_cast<int>(train.samples.size());
  result.n_test = static_cast<int>(test.samples.size());
  save_dataset(train, result.train_dir);
  save_dataset(test, result.test_dir);
  return result;
}

fs::path cmd_train(const RunConfig& cfg, nn::ModelKind kind) {
  const PairDataset train_ds = load_dataset(cfg.out_dir / "dataset_train");
  nn::TrainConfig tc = cfg.train;
  tc.kind = kind;
  const nn::Checkpoint ckpt = nn::train(train_ds, tc);

  const fs::path dir = cfg.out_dir / ("ckpt_" + nn::model_kind_name(kind));
  nn::save_checkpoint(ckpt, dir);

  std::ostringstream csv;
  csv << "epoch,focal_loss\n";
  for (std::size_t e = 0; e < ckpt.loss_trace.size(); ++e)
    csv << e << "," << std::setprecision(17) << ckpt.loss_trace[e] << "\n";
  io::write_text(dir / "loss_trace.csv", csv.str());
  return dir;
}

std::vector<EvalReport> cmd_eval(const RunConfig& cfg,
                                 const std::vector<fs::path>& ckpts) {
  const PairDataset test_ds = load_dataset(cfg.out_dir / "dataset_test");
  const int L = static_cast<int>(test_ds.class_names.size());
  const Palette palette = Palette::for_classes(test_ds.class_names);

  std::vector<EvalReport> reports;
  std::ostringstream csv;
  csv << "model";
  for (const auto& name : test_ds.class_names) csv << ",iou_" << name;
  csv << ",gdice\n";

  for (const auto& dir : ckpts) {
    const nn::Checkpoint ckpt = nn::load_checkpoint(dir);
    const EvalReport report = evaluate_model(ckpt, test_ds);
    reports.push_back(report);

    json rj;
    rj["model"] = report.model;
    rj["class_names"] = report.class_names;
    json iou = json::array();
    for (const auto& v : report.iou)
      iou.push_back(v ? json(*v) : json(nullptr));
    rj["iou"] = iou;
    rj["gdice"] = report.gdice;
    rj["sample_count"] = report.sample_count;
    rj["split"] = report.dataset_split;
    io::write_text(cfg.out_dir / ("report_" + report.model + ".json"),
                   rj.dump(2) + "\n");

    csv << report.model;
    for (const auto& v : report.iou)
      csv << "," << (v ? format_double(*v) : std::string("absent"));
    csv << "," << format_double(report.gdice) << "\n";

    // Assemble the predicted test-region map for visual comparison; pixels
    // outside the test tiles stay void (black).
    const Scene scene = load_scene(cfg.scene_dir);
    LabelGrid map(scene.Hs, scene.Ws, 255);
    nn::Predictor predictor(ckpt);
    for (const auto& sample : test_ds.samples) {
      const auto pred = predictor.predict(sample);
      for (int y = 0; y < kTileSize; ++y)
        for (int x = 0; x < kTileSize; ++x)
          map.at(sample.meta.origin_y + y, sample.meta.origin_x + x) =
              pred.labels.data.at(y, x);
    }
    render_map(map, palette, cfg.out_dir / ("pred_" + report.model + ".ppm"));
    (void)L;
  }
  io::write_text(cfg.out_dir / "comparison.csv", csv.str());
  return reports;
}

std::vector<SweepRow> cmd_sweep(const RunConfig& cfg,
                                const std::vector<fs::path>& ckpts) {
  const Scene scene = load_scene(cfg.scene_dir);
  const BandSelection sel = load_band_selection(cfg.out_dir / "bands.json");
  const TileSplit split = compute_split(scene, cfg);

  std::vector<nn::Checkpoint> models;
  for (const auto& dir : ckpts) models.push_back(nn::load_checkpoint(dir));

  const auto rows = run_sweep(scene, sel, models, cfg.sweep, split.test,
                              cfg.dataset.seed + 1);

  std::ostringstream csv;
  csv << "model,gamma,A,contrast,gdice";
  for (const auto& name : scene.class_names) csv << ",iou_" << name;
  csv << "\n";
  for (const auto& row : rows) {
    csv << row.model << "," << row.gamma << "," << row.A << ","
        << (row.contrast ? "Y" : "N") << "," << format_double(row.gdice);
    for (const auto& v : row.iou)
      csv << "," << (v ? format_double(*v) : std::string("absent"));
    csv << "\n";
  }
  fs::create_directories(cfg.out_dir);
  io::write_text(cfg.out_dir / "sweep.csv", csv.str());

  // One chart per metric: x = darkness level, one line per (model, A).
  for (const bool use_gdice : {true, false}) {
    std::vector<ChartSeries> series;
    for (const auto& ckpt : models) {
      for (const double A : cfg.sweep.A_levels) {
        ChartSeries s;
        s.name = nn::model_kind_name(ckpt.kind) + " A=" + format_double(A).substr(0, 4);
        for (const double gamma : cfg.sweep.gammas) {
          for (const auto& row : rows) {
            if (row.model == nn::model_kind_name(ckpt.kind) && row.A == A &&
                row.gamma == gamma &&
                row.contrast == cfg.sweep.contrast_flags.front()) {
              s.values.push_back(use_gdice ? row.gdice : mean_iou(row.iou));
            }
          }
        }
        series.push_back(s);
      }
    }
    write_line_chart(cfg.out_dir / (use_gdice ? "gdice.svg" : "miou.svg"),
                     std::string(use_gdice ? "gDice" : "mIOU") +
                         " vs darkness level (" + scene.name + ")",
                     "low-light gamma", use_gdice ? "gDice" : "mIOU",
                     cfg.sweep.gammas, series);
  }
  return rows;
}

void cmd_render(const fs::path& scene_dir,
                const std::optional<fs::path>& labels_u8,
                const fs::path& out_ppm, const std::optional<CropBox>& crop) {
  const Scene scene = load_scene(scene_dir);
  const Palette palette = Palette::for_classes(scene.class_names);
  if (labels_u8) {
    LabelGrid labels(scene.Hs, scene.Ws);
    labels.data = io::read_u8(*labels_u8,
                              static_cast<std::size_t>(scene.Hs) * scene.Ws);
    render_map(labels, palette, out_ppm, crop);
  } else {
    render_map(scene.labels, palette, out_ppm, crop);
  }
}

void cmd_ingest(const fs::path& raw_dir, const fs::path& scene_dir) {
  const json meta = json::parse(io::read_text(raw_dir / "meta.json"));
  const auto name = meta.at("name").get<std::string>();
  const int C = meta.at("C").get<int>();
  const int Hs = meta.at("Hs").get<int>();
  const int Ws = meta.at("Ws").get<int>();
  const auto class_names = meta.at("class_names").get<std::vector<std::string>>();
  std::optional<std::vector<double>> wavelengths;
  if (meta.contains("wavelengths_nm") && !meta["wavelengths_nm"].is_null())
    wavelengths = meta["wavelengths_nm"].get<std::vector<double>>();

  const std::size_t plane = static_cast<std::size_t>(Hs) * Ws;
  const auto raw = io::read_f32(raw_dir / "cube.f32",
                                static_cast<std::size_t>(C) * plane);
  const auto labels = io::read_u8(raw_dir / "labels.u8", plane);
  ingest_scene(name, C, Hs, Ws, raw, labels, class_names, wavelengths, scene_dir);
}

}  // namespace hsifuse
