#include "mbl/svg_plot.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace mbl {

namespace {

constexpr double kMargin = 30.0;
constexpr double kPlot = 500.0;

struct Rgb {
  double r, g, b;
};

// yellow -> orange -> violet -> black
constexpr Rgb kStops[4] = {{255, 232, 0}, {255, 140, 0}, {138, 43, 226}, {0, 0, 0}};

Rgb color_at(double t) {
  t = std::clamp(t, 0.0, 1.0) * 3.0;
  const int seg = std::min(2, static_cast<int>(t));
  const double f = t - seg;
  const Rgb& a = kStops[seg];
  const Rgb& b = kStops[seg + 1];
  return Rgb{a.r + f * (b.r - a.r), a.g + f * (b.g - a.g), a.b + f * (b.b - a.b)};
}

double to_px_x(double v) { return kMargin + v * kPlot; }
double to_px_y(double v) { return kMargin + (1.0 - v) * kPlot; }

}  // namespace

void render_plot(std::span<const RunRecord> records,
                 const std::vector<std::pair<int, int>>& projection,
                 const MixedProfile& target, const std::string& path) {
  if (projection.size() < 2) {
    throw std::invalid_argument("projection needs two (player, action) pairs");
  }
  const auto [px, pa] = projection[0];
  const auto [qx, qa] = projection[1];
  if (px < 0 || px >= target.num_players() || qx < 0 || qx >= target.num_players() ||
      pa < 0 || pa >= static_cast<int>(target.strategy(px).size()) || qa < 0 ||
      qa >= static_cast<int>(target.strategy(qx).size())) {
    throw std::invalid_argument("projection dimensions out of range");
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);

  const double size = 2.0 * kMargin + kPlot;
  char buf[256];
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" "
                "height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\">\n",
                size, size, size, size);
  out << buf;
  std::snprintf(buf, sizeof buf,
                "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" "
                "fill=\"white\" stroke=\"#444\" stroke-width=\"1\"/>\n",
                kMargin, kMargin, kPlot, kPlot);
  out << buf;

  for (const auto& rec : records) {
    const std::size_t n = rec.profiles.size();
    for (std::size_t k = 0; k < n; ++k) {
      const double frac = n > 1 ? static_cast<double>(k) / (n - 1) : 0.0;
      const Rgb c = color_at(frac);
      const double x = to_px_x(rec.profiles[k].strategy(px)[pa]);
      const double y = to_px_y(rec.profiles[k].strategy(qx)[qa]);
      std::snprintf(buf, sizeof buf,
                    "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"1.5\" "
                    "fill=\"rgb(%.0f,%.0f,%.0f)\"/>\n",
                    x, y, c.r, c.g, c.b);
      out << buf;
    }
  }

  const double tx = to_px_x(target.strategy(px)[pa]);
  const double ty = to_px_y(target.strategy(qx)[qa]);
  std::snprintf(buf, sizeof buf,
                "<path d=\"M %.2f %.2f L %.2f %.2f M %.2f %.2f L %.2f %.2f\" "
                "stroke=\"blue\" stroke-width=\"2\"/>\n",
                tx - 7.0, ty, tx + 7.0, ty, tx, ty - 7.0, tx, ty + 7.0);
  out << buf;
  out << "</svg>\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace mbl
