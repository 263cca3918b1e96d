// Minimal SVG line plots for error traces: log-scale y axis, one polyline
// per series, a filled marker at each series' selected step, and a legend.
// Output is plain SVG text and fully deterministic, so rendered files can be
// compared byte for byte.

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace krylreg {

struct PlotSeries {
    std::string label;          // legend entry
    std::vector<double> k;      // abscissae (iteration counts)
    std::vector<double> value;  // ordinates, plotted on a log scale
    long long k_star = -1;      // marked on the curve when it matches a k
};

// Writes a complete standalone SVG document. Values at or below the log-scale
// floor of 1e-18 are clamped; non-finite points are dropped from the curve.
// Throws std::invalid_argument when no series carries a plottable point.
void write_svg_plot(std::ostream& os, const std::string& title,
                    const std::vector<PlotSeries>& series);

}  // namespace krylreg
