#pragma once

#include <string>
#include <vector>

#include "fraclab/extension.hpp"
#include "fraclab/regularity.hpp"

namespace fraclab::io {

enum class PlotKind { Decay, HarnackSweep, Heatmap };

// Metadata written into every plot as an XML comment.
struct PlotMeta {
  std::string title;
  std::string config_hash;
};

// Log-log scatter of E_j against r_j with a reference line of the given
// slope through the last used point.  An empty ladder gives axes and a
// "no data" note.
std::string decay_svg(const DecayReport& report, double reference_slope, const PlotMeta& meta);

// Quotients per fixture, one series per resolution.
struct SweepSeries {
  std::string label;
  std::vector<double> values;
};
std::string sweep_svg(const std::vector<SweepSeries>& series, const PlotMeta& meta);

// Raster of U over (x, z >= 0) with a colour bar; one lateral dimension.
std::string heatmap_svg(const ExtensionState& state, const PlotMeta& meta);

// Writes `svg` to `path`; returns the byte count.
std::size_t emit_plot(const std::string& path, const std::string& svg);

}  // namespace fraclab::io
