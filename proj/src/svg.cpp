#include "aav/svg.hpp"

#include <cmath>
#include <sstream>

namespace aav {

namespace {

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << (std::abs(v) < 1e-12 ? 0.0 : v);
  return os.str();
}

std::string rgb(const Rgb& c) {
  std::ostringstream os;
  os << "rgb(" << std::lround(c.r) << ',' << std::lround(c.g) << ',' << std::lround(c.b) << ')';
  return os.str();
}

void open_svg(std::ostringstream& os, double w, double h, const SvgOptions& options) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" xmlns:xlink=\"http://www.w3.org/1999/xlink\" width=\""
     << num(w) << "\" height=\"" << num(h) << "\" viewBox=\"0 0 " << num(w) << ' ' << num(h) << "\">\n";
  if (options.background_href)
    os << "  <image class=\"background\" x=\"0\" y=\"0\" width=\"" << num(w) << "\" height=\"" << num(h)
       << "\" xlink:href=\"" << *options.background_href << "\"/>\n";
}

}  // namespace

std::string render_heatmap_svg(const GridConfig& config, const Field& field, const Colormap& cmap,
                               const SvgOptions& options) {
  std::ostringstream os;
  open_svg(os, config.width_px, config.height_px, options);
  const auto colors = heatmap(field.values, cmap);
  os << "  <g class=\"heatmap\" fill-opacity=\"" << num(options.opacity) << "\">\n";
  for (int r = 0; r < field.rows; ++r) {
    for (int c = 0; c < field.cols; ++c) {
      const Rect rc = cell_rect(config, {r, c});
      os << "    <rect class=\"cell\" x=\"" << num(rc.x0) << "\" y=\"" << num(rc.y0) << "\" width=\""
         << num(rc.x1 - rc.x0) << "\" height=\"" << num(rc.y1 - rc.y0) << "\" fill=\""
         << rgb(colors[static_cast<std::size_t>(r) * field.cols + c]) << "\"/>\n";
    }
  }
  os << "  </g>\n</svg>\n";
  return os.str();
}

std::string render_contour_svg(const GridConfig& config, const std::vector<ContourRing>& rings,
                               const SvgOptions& options) {
  std::ostringstream os;
  open_svg(os, config.width_px, config.height_px, options);
  os << "  <g class=\"contours\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\">\n";
  for (const auto& ring : rings) {
    os << "    <path class=\"ring\" data-level=\"" << num(ring.iso_level) << "\" d=\"";
    for (std::size_t i = 0; i < ring.points.size(); ++i)
      os << (i == 0 ? "M" : " L") << num(ring.points[i].x) << ' ' << num(ring.points[i].y);
    if (ring.closed) os << " Z";
    os << "\"/>\n";
  }
  os << "  </g>\n</svg>\n";
  return os.str();
}

std::string render_border_svg(const GridConfig& config, const BorderMarginal& m, const Colormap& cmap,
                              const SvgOptions& options) {
  const bool x_axis = m.axis == Axis::X;
  const double strip = options.border_px;
  const double w = config.width_px + (x_axis ? 0.0 : strip);
  const double h = config.height_px + (x_axis ? strip : 0.0);
  std::ostringstream os;
  open_svg(os, w, h, options);
  os << "  <g class=\"border " << to_string(m.style) << "\">\n";

  // Extent of entry i along the axis, and the strip's baseline.
  auto span = [&](std::size_t i) {
    const Rect rc = x_axis ? cell_rect(config, {0, static_cast<int>(i)}) : cell_rect(config, {static_cast<int>(i), 0});
    return x_axis ? std::pair{rc.x0, rc.x1} : std::pair{rc.y0, rc.y1};
  };
  const double base = x_axis ? config.height_px : config.width_px;

  if (m.style == BorderStyle::Area) {
    os << "    <path class=\"area\" d=\"";
    os << (x_axis ? "M0 " + num(base + strip) : "M" + num(base) + " 0");
    for (std::size_t i = 0; i < m.values.size(); ++i) {
      const auto [a, b] = span(i);
      const double mid = (a + b) / 2.0;
      const double len = m.values[i] * strip;
      if (x_axis)
        os << " L" << num(mid) << ' ' << num(base + strip - len);
      else
        os << " L" << num(base + len) << ' ' << num(mid);
    }
    os << (x_axis ? " L" + num(config.width_px) + ' ' + num(base + strip)
                  : " L" + num(base) + ' ' + num(config.height_px));
    os << " Z\" fill=\"" << rgb(cmap(1.0)) << "\"/>\n";
  } else {
    for (std::size_t i = 0; i < m.values.size(); ++i) {
      const auto [a, b] = span(i);
      const bool bar = m.style == BorderStyle::Bar;
      const double len = bar ? m.values[i] * strip : strip;
      const std::string fill = rgb(bar ? cmap(1.0) : cmap(m.values[i]));
      os << "    <rect class=\"" << (bar ? "bar" : "swatch") << "\" ";
      if (x_axis)
        os << "x=\"" << num(a) << "\" y=\"" << num(base + strip - len) << "\" width=\"" << num(b - a)
           << "\" height=\"" << num(len) << "\"";
      else
        os << "x=\"" << num(base) << "\" y=\"" << num(a) << "\" width=\"" << num(len) << "\" height=\""
           << num(b - a) << "\"";
      os << " fill=\"" << fill << "\"/>\n";
    }
  }
  os << "  </g>\n</svg>\n";
  return os.str();
}

}  // namespace aav
