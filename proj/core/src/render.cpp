#include "hsifuse/render.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace hsifuse {

namespace {

const std::map<std::string, Rgb8>& named_colors() {
  static const std::map<std::string, Rgb8> colors = {
      {"Road", {128, 0, 128}},    // purple
      {"Dirt", {139, 69, 19}},    // brown
      {"Water", {0, 64, 224}},    // blue
      {"Tree", {0, 128, 0}},      // green
      {"Asphalt", {85, 85, 95}},
      {"Grass", {124, 200, 60}},
      {"Roof", {178, 56, 56}},
      {"Metal", {196, 196, 212}},
  };
  return colors;
}

const std::vector<Rgb8>& fallback_cycle() {
  static const std::vector<Rgb8> cycle = {
      {230, 159, 0}, {86, 180, 233}, {0, 158, 115},   {240, 228, 66},
      {0, 114, 178}, {213, 94, 0},   {204, 121, 167}, {153, 153, 153},
  };
  return cycle;
}

}  // namespace

Palette Palette::for_classes(const std::vector<std::string>& names) {
  Palette p;
  p.class_names = names;
  std::size_t fallback = 0;
  for (const auto& name : names) {
    Rgb8 c;
    if (const auto it = named_colors().find(name); it != named_colors().end()) {
      c = it->second;
    } else {
      c = fallback_cycle()[fallback++ % fallback_cycle().size()];
    }
    // Colors must stay distinct per class.
    while (std::find(p.colors.begin(), p.colors.end(), c) != p.colors.end()) {
      c = fallback_cycle()[fallback++ % fallback_cycle().size()];
    }
    p.colors.push_back(c);
  }
  return p;
}

const Rgb8& Palette::color(int class_index) const {
  if (class_index < 0 || class_index >= static_cast<int>(colors.size()))
    throw std::runtime_error("no palette entry for class " +
                             std::to_string(class_index));
  return colors[class_index];
}

void render_map(const LabelGrid& labels, const Palette& palette,
                const std::filesystem::path& out,
                const std::optional<CropBox>& crop) {
  int x0 = 0, y0 = 0, w = labels.w, h = labels.h;
  if (crop) {
    require(crop->x >= 0 && crop->y >= 0 && crop->w > 0 && crop->h > 0 &&
                crop->x + crop->w <= labels.w && crop->y + crop->h <= labels.h,
            "crop box out of bounds");
    x0 = crop->x;
    y0 = crop->y;
    w = crop->w;
    h = crop->h;
  }

  std::ofstream f(out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + out.string());
  f << "P6\n" << w << " " << h << "\n255\n";
  for (int y = y0; y < y0 + h; ++y) {
    for (int x = x0; x < x0 + w; ++x) {
      const std::uint8_t l = labels.at(y, x);
      Rgb8 c{0, 0, 0};  // 255 = void, stays black
      if (l != 255) c = palette.color(l);
      f.put(static_cast<char>(c.r));
      f.put(static_cast<char>(c.g));
      f.put(static_cast<char>(c.b));
    }
  }
  if (!f) throw std::runtime_error("short write: " + out.string());
}

void write_line_chart(const std::filesystem::path& out, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<double>& x_values,
                      const std::vector<ChartSeries>& series,
                      double y_min, double y_max) {
  require(!x_values.empty(), "chart needs x values");
  require(y_max > y_min, "chart y range is empty");

  constexpr int W = 640, H = 420;
  constexpr int ml = 60, mr = 160, mt = 40, mb = 50;
  const double px = W - ml - mr, py = H - mt - mb;
  const double x_lo = x_values.front();
  const double x_hi = x_values.back() > x_lo ? x_values.back() : x_lo + 1.0;

  auto sx = [&](double x) { return ml + px * (x - x_lo) / (x_hi - x_lo); };
  auto sy = [&](double y) { return mt + py * (1.0 - (y - y_min) / (y_max - y_min)); };

  const std::vector<std::string> stroke = {"#0072B2", "#D55E00", "#009E73",
                                           "#CC79A7", "#E69F00", "#56B4E9",
                                           "#999999", "#F0E442"};

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
      << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
  svg << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  svg << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"15\">" << title << "</text>\n";

  // axes
  svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
      << "\" y2=\"" << H - mb << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr
      << "\" y2=\"" << H - mb << "\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << ml + px / 2 << "\" y=\"" << H - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
      << x_label << "</text>\n";
  svg << "<text x=\"16\" y=\"" << mt + py / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
      << "transform=\"rotate(-90 16 " << mt + py / 2 << ")\">" << y_label
      << "</text>\n";

  // y ticks
  for (int i = 0; i <= 5; ++i) {
    const double yv = y_min + (y_max - y_min) * i / 5.0;
    svg << "<line x1=\"" << ml - 4 << "\" y1=\"" << sy(yv) << "\" x2=\"" << ml
        << "\" y2=\"" << sy(yv) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << ml - 8 << "\" y=\"" << sy(yv) + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << yv << "</text>\n";
  }
  // x ticks at the data points
  for (const double xv : x_values) {
    svg << "<line x1=\"" << sx(xv) << "\" y1=\"" << H - mb << "\" x2=\""
        << sx(xv) << "\" y2=\"" << H - mb + 4 << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << sx(xv) << "\" y=\"" << H - mb + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"11\">" << xv << "</text>\n";
  }

  for (std::size_t s = 0; s < series.size(); ++s) {
    require(series[s].values.size() == x_values.size(),
            "chart series length mismatch: " + series[s].name);
    svg << "<polyline fill=\"none\" stroke=\"" << stroke[s % stroke.size()]
        << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < x_values.size(); ++i)
      svg << sx(x_values[i]) << "," << sy(series[s].values[i]) << " ";
    svg << "\"/>\n";
    const double ly = mt + 16.0 * (s + 1);
    svg << "<line x1=\"" << W - mr + 10 << "\" y1=\"" << ly << "\" x2=\""
        << W - mr + 34 << "\" y2=\"" << ly << "\" stroke=\""
        << stroke[s % stroke.size()] << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << W - mr + 40 << "\" y=\"" << ly + 4
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << series[s].name
        << "</text>\n";
  }
  svg << "</svg>\n";

  std::ofstream f(out);
  if (!f) throw std::runtime_error("cannot open for writing: " + out.string());
  f << svg.str();
}

}  // namespace hsifuse
