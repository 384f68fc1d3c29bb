#pragma once

#include <optional>
#include <string>

#include "aav/revis.hpp"

namespace aav {

struct SvgOptions {
  std::optional<std::string> background_href;  // raster drawn under the overlay
  double opacity = 0.6;
  double border_px = 40.0;  // thickness of the border chart strip
};

/// One <rect> per cell coloured by the normalized field.
std::string render_heatmap_svg(const GridConfig& config, const Field& field, const Colormap& cmap,
                               const SvgOptions& options = {});

/// One closed <path> per contour ring.
std::string render_contour_svg(const GridConfig& config, const std::vector<ContourRing>& rings,
                               const SvgOptions& options = {});

/// Border chart drawn in a strip below (x axis) or right of (y axis) the
/// mount: one bar or one heatmap swatch per entry, or a single area path.
std::string render_border_svg(const GridConfig& config, const BorderMarginal& marginal, const Colormap& cmap,
                              const SvgOptions& options = {});

}  // namespace aav
