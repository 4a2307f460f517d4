#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace snspd::plot {

/// One named curve. x and y must be the same nonzero length and finite.
struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool line = true;      // connect the points
    bool markers = false;  // draw a dot at every point
};

struct Axes {
    std::string title;
    std::string x_label;
    std::string y_label;
};

/// Deterministic SVG 1.1 chart: fixed 640x420 canvas, fixed-precision
/// coordinates and tick labels, colors assigned by series order. The same
/// input always produces the same bytes. Throws std::invalid_argument on an
/// empty series list, mismatched x/y lengths, or non-finite values.
[[nodiscard]] std::string emit_plot(const std::vector<Series>& series, const Axes& axes);

/// Deterministic SVG heatmap of a row-major ny-by-nx scalar grid; row 0 is
/// drawn at the bottom. NaN cells are left blank; grids wider than 220 cells
/// per axis are block-averaged first. Throws std::invalid_argument when the
/// value count does not match nx * ny or no cell is finite.
[[nodiscard]] std::string emit_heatmap(const std::vector<double>& values, std::size_t nx,
                                       std::size_t ny, const Axes& axes);

}  // namespace snspd::plot
