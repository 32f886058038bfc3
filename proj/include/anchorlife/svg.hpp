#pragma once

#include <string>
#include <vector>

namespace anchorlife::svg
{

enum class SeriesKind
{
    Scatter,
    Line,
    Band,  ///< filled region between `y` (lower) and `y_upper`
    BandX, ///< filled region between `x` (lower) and `x_upper` at each `y`
};

struct Series
{
    SeriesKind kind = SeriesKind::Line;
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> y_upper; ///< Band only
    std::vector<double> x_upper; ///< BandX only
    std::string color = "#1f77b4";
};

struct Plot
{
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = true;
    bool log_y = true;
    std::vector<Series> series;
};

/// Standalone SVG document. Each series becomes exactly one <path>; axes,
/// ticks and labels use <line> and <text>. Non-positive values on a log axis
/// are dropped, and infinite band edges are drawn at the plot border.
std::string render(const Plot& plot);

} // namespace anchorlife::svg
