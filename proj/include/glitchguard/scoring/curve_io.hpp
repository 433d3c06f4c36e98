#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "glitchguard/scoring/regularity.hpp"

namespace glitchguard {

// CSV with header frame_index,error,regularity; one row per frame. Values
// are written in shortest round-trip form, so reading back is exact.
void write_curve_csv(const RegularityCurve& curve, const std::filesystem::path& path);
// The video id is taken from the file stem.
RegularityCurve read_curve_csv(const std::filesystem::path& path);

struct PlotOptions {
  double width = 800.0;
  double height = 300.0;
  std::string title;
};

// Standalone SVG 1.1 RS diagram: one polyline vertex per frame, axes with
// labels, and one shaded rectangle per anomaly segment.
std::string render_plot_svg(const RegularityCurve& curve, std::span<const AnomalySegment> segments,
                            const PlotOptions& options = {});
void render_plot(const RegularityCurve& curve, std::span<const AnomalySegment> segments,
                 const std::filesystem::path& path, const PlotOptions& options = {});

}  // namespace glitchguard
