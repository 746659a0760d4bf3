#pragma once

#include <optional>
#include <string>

#include "msci/analyze.hpp"
#include "msci/dataset.hpp"
#include "msci/models.hpp"

namespace msci::plot {

struct Figure {
  std::string title;
  std::string x_label = "age (years)";
  std::string y_label = "value";
  int width = 800;
  int height = 500;
  /// Samples along the fitted curve.
  std::size_t curve_samples = 400;
};

/// Standalone SVG 1.1: one <circle> per datapoint (colored by study), one
/// <path class="curve"> when a model is given, one <polygon class="band">
/// when a band is given, plus axes, ticks and a study legend.
/// Output bytes depend only on the inputs.
std::string render_svg(const Dataset& d, const ModelSpec* spec, std::span<const double> params,
                       const analyze::IntervalBand* band, const Figure& figure = {});

}  // namespace msci::plot
