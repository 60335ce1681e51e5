#pragma once

#include <string>
#include <vector>

#include "eit/geometry.hpp"

namespace eit {

// Minimal self-contained SVG plots (polylines and axes only).
struct SvgSeries {
    std::string label;
    std::string color = "#1f6fb4";
    std::vector<Vec2> points;
};

// x/y plot with axes, tick labels, and one polyline per series.
std::string svg_line_plot(const std::string& title, const std::string& x_label,
                          const std::string& y_label, const std::vector<SvgSeries>& series,
                          const std::string& stamp);

// overlay of closed polygons on a fixed square viewport (e.g. hulls over the
// domain circle)
struct SvgPolygon {
    std::string label;
    std::string color = "#1f6fb4";
    bool closed = true;
    std::vector<Vec2> points;
};
std::string svg_overlay_plot(const std::string& title, const std::vector<SvgPolygon>& polys,
                             const std::string& stamp);

void write_text_file(const std::string& path, const std::string& content);

} // namespace eit
