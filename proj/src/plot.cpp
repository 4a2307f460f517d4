#include "snspd/plot.hpp"

#include "snspd/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace snspd::plot {

namespace {

// Fixed canvas; the plot area leaves room for the title, tick labels, and a
// heatmap color bar.
constexpr double k_canvas_w = 640.0;
constexpr double k_canvas_h = 420.0;
constexpr double k_left = 72.0;
constexpr double k_right = 586.0;
constexpr double k_top = 46.0;
constexpr double k_bottom = 368.0;

constexpr const char* k_palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                     "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};
constexpr std::size_t k_palette_size = sizeof(k_palette) / sizeof(k_palette[0]);

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

/// Pixel coordinate, fixed to 1/100 px.
std::string px(double v) { return io::fmt_fixed(v, 2); }

/// Human-readable tick value.
std::string tick_label(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", v == 0.0 ? 0.0 : v);  // normalize -0
    return buf;
}

struct Range {
    double lo = 0.0;
    double hi = 1.0;
};

Range padded(double lo, double hi) {
    if (hi == lo) return {lo - 1.0, hi + 1.0};
    const double pad = 0.04 * (hi - lo);
    return {lo - pad, hi + pad};
}

struct Mapper {
    Range xr, yr;
    [[nodiscard]] double x(double v) const {
        return k_left + (v - xr.lo) / (xr.hi - xr.lo) * (k_right - k_left);
    }
    [[nodiscard]] double y(double v) const {
        return k_bottom - (v - yr.lo) / (yr.hi - yr.lo) * (k_bottom - k_top);
    }
};

void open_svg(std::string& svg) {
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"640\" "
           "height=\"420\" viewBox=\"0 0 640 420\">\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"" + px(k_canvas_w) + "\" height=\"" +
           px(k_canvas_h) + "\" fill=\"#ffffff\"/>\n";
}

void add_text(std::string& svg, double x, double y, const std::string& text,
              const std::string& anchor, int size, const std::string& extra = "") {
    svg += "<text x=\"" + px(x) + "\" y=\"" + px(y) + "\" text-anchor=\"" + anchor +
           "\" font-family=\"DejaVu Sans, sans-serif\" font-size=\"" + std::to_string(size) +
           "\"" + extra + ">" + xml_escape(text) + "</text>\n";
}

void add_titles(std::string& svg, const Axes& axes) {
    const double cx = 0.5 * (k_left + k_right);
    if (!axes.title.empty())
        add_text(svg, cx, 26.0, axes.title, "middle", 15, " font-weight=\"bold\"");
    if (!axes.x_label.empty()) add_text(svg, cx, 404.0, axes.x_label, "middle", 12);
    if (!axes.y_label.empty()) {
        svg += "<text transform=\"translate(18," + px(0.5 * (k_top + k_bottom)) +
               ") rotate(-90)\" text-anchor=\"middle\" font-family=\"DejaVu Sans, sans-serif\""
               " font-size=\"12\">" +
               xml_escape(axes.y_label) + "</text>\n";
    }
}

void add_frame(std::string& svg) {
    svg += "<rect x=\"" + px(k_left) + "\" y=\"" + px(k_top) + "\" width=\"" +
           px(k_right - k_left) + "\" height=\"" + px(k_bottom - k_top) +
           "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
}

void add_ticks(std::string& svg, const Mapper& m) {
    for (int i = 0; i <= 4; ++i) {
        const double f = i / 4.0;
        const double xv = m.xr.lo + f * (m.xr.hi - m.xr.lo);
        const double yv = m.yr.lo + f * (m.yr.hi - m.yr.lo);
        const double gx = m.x(xv);
        const double gy = m.y(yv);
        if (i > 0 && i < 4) {
            svg += "<line x1=\"" + px(gx) + "\" y1=\"" + px(k_top) + "\" x2=\"" + px(gx) +
                   "\" y2=\"" + px(k_bottom) + "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
            svg += "<line x1=\"" + px(k_left) + "\" y1=\"" + px(gy) + "\" x2=\"" + px(k_right) +
                   "\" y2=\"" + px(gy) + "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        }
        svg += "<line x1=\"" + px(gx) + "\" y1=\"" + px(k_bottom) + "\" x2=\"" + px(gx) +
               "\" y2=\"" + px(k_bottom + 5) + "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
        add_text(svg, gx, k_bottom + 19.0, tick_label(xv), "middle", 11);
        svg += "<line x1=\"" + px(k_left - 5) + "\" y1=\"" + px(gy) + "\" x2=\"" + px(k_left) +
               "\" y2=\"" + px(gy) + "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
        add_text(svg, k_left - 8.0, gy + 4.0, tick_label(yv), "end", 11);
    }
}

struct Rgb {
    double r, g, b;
};

/// Perceptually uniform dark-to-bright map (9 anchor colors, interpolated).
std::string heat_color(double t) {
    static constexpr Rgb anchors[] = {{68, 1, 84},    {71, 44, 122},  {59, 81, 139},
                                      {44, 113, 142}, {33, 144, 141}, {39, 173, 129},
                                      {92, 200, 99},  {170, 220, 50}, {253, 231, 37}};
    t = std::clamp(t, 0.0, 1.0) * 8.0;
    const int i = std::min(7, static_cast<int>(t));
    const double f = t - i;
    const auto lerp = [f](double a, double b) { return a + f * (b - a); };
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                  static_cast<int>(std::lround(lerp(anchors[i].r, anchors[i + 1].r))),
                  static_cast<int>(std::lround(lerp(anchors[i].g, anchors[i + 1].g))),
                  static_cast<int>(std::lround(lerp(anchors[i].b, anchors[i + 1].b))));
    return buf;
}

}  // namespace

std::string emit_plot(const std::vector<Series>& series, const Axes& axes) {
    if (series.empty()) throw std::invalid_argument("emit_plot: no series");
    double xlo = 0.0, xhi = 0.0, ylo = 0.0, yhi = 0.0;
    bool first = true;
    for (const auto& s : series) {
        if (s.x.size() != s.y.size())
            throw std::invalid_argument("emit_plot: series '" + s.label +
                                        "': x and y lengths differ");
        if (s.x.empty())
            throw std::invalid_argument("emit_plot: series '" + s.label + "' is empty");
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]))
                throw std::invalid_argument("emit_plot: series '" + s.label +
                                            "' has a non-finite value");
            if (first) {
                xlo = xhi = s.x[i];
                ylo = yhi = s.y[i];
                first = false;
            }
            xlo = std::min(xlo, s.x[i]);
            xhi = std::max(xhi, s.x[i]);
            ylo = std::min(ylo, s.y[i]);
            yhi = std::max(yhi, s.y[i]);
        }
    }
    const Mapper m{padded(xlo, xhi), padded(ylo, yhi)};

    std::string svg;
    open_svg(svg);
    svg += "<clipPath id=\"plot-area\"><rect x=\"" + px(k_left) + "\" y=\"" + px(k_top) +
           "\" width=\"" + px(k_right - k_left) + "\" height=\"" + px(k_bottom - k_top) +
           "\"/></clipPath>\n";
    add_ticks(svg, m);
    add_frame(svg);

    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const char* color = k_palette[si % k_palette_size];
        svg += "<g clip-path=\"url(#plot-area)\">\n";
        if (s.line && s.x.size() > 1) {
            svg += "<polyline fill=\"none\" stroke=\"";
            svg += color;
            svg += "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (i) svg += ' ';
                svg += px(m.x(s.x[i])) + "," + px(m.y(s.y[i]));
            }
            svg += "\"/>\n";
        }
        if (s.markers || !s.line || s.x.size() == 1) {
            for (std::size_t i = 0; i < s.x.size(); ++i)
                svg += "<circle cx=\"" + px(m.x(s.x[i])) + "\" cy=\"" + px(m.y(s.y[i])) +
                       "\" r=\"2.5\" fill=\"" + color + "\"/>\n";
        }
        svg += "</g>\n";
    }

    double ly = k_top + 14.0;
    for (std::size_t si = 0; si < series.size(); ++si) {
        if (series[si].label.empty()) continue;
        const char* color = k_palette[si % k_palette_size];
        const double lx = k_right - 150.0;
        svg += "<line x1=\"" + px(lx) + "\" y1=\"" + px(ly - 4.0) + "\" x2=\"" + px(lx + 18.0) +
               "\" y2=\"" + px(ly - 4.0) + "\" stroke=\"" + color +
               "\" stroke-width=\"2\"/>\n";
        add_text(svg, lx + 24.0, ly, series[si].label, "start", 11);
        ly += 16.0;
    }

    add_titles(svg, axes);
    svg += "</svg>\n";
    return svg;
}

std::string emit_heatmap(const std::vector<double>& values, std::size_t nx, std::size_t ny,
                         const Axes& axes) {
    if (nx == 0 || ny == 0 || values.size() != nx * ny)
        throw std::invalid_argument("emit_heatmap: value count does not match nx * ny");

    // Block-average oversized grids so the file stays a chart, not a raster.
    constexpr std::size_t k_max_cells = 220;
    std::vector<double> vals = values;
    std::size_t rnx = nx, rny = ny;
    if (nx > k_max_cells || ny > k_max_cells) {
        const std::size_t f = (std::max(nx, ny) + k_max_cells - 1) / k_max_cells;
        rnx = (nx + f - 1) / f;
        rny = (ny + f - 1) / f;
        vals.assign(rnx * rny, std::nan(""));
        for (std::size_t by = 0; by < rny; ++by)
            for (std::size_t bx = 0; bx < rnx; ++bx) {
                double sum = 0.0;
                std::size_t cnt = 0;
                for (std::size_t iy = by * f; iy < std::min(ny, (by + 1) * f); ++iy)
                    for (std::size_t ix = bx * f; ix < std::min(nx, (bx + 1) * f); ++ix) {
                        const double v = values[iy * nx + ix];
                        if (std::isfinite(v)) {
                            sum += v;
                            ++cnt;
                        }
                    }
                if (cnt) vals[by * rnx + bx] = sum / cnt;
            }
    }

    double vmin = 0.0, vmax = 0.0;
    bool any = false;
    for (double v : vals) {
        if (!std::isfinite(v)) continue;
        if (!any) {
            vmin = vmax = v;
            any = true;
        }
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
    }
    if (!any) throw std::invalid_argument("emit_heatmap: no finite cells");

    // Keep the drawn cells square so the geometry is not distorted.
    const double cell =
        std::min((k_right - k_left) / rnx, (k_bottom - k_top) / rny);
    const double x0 = k_left;
    const double y0 = k_bottom;

    std::string svg;
    open_svg(svg);
    for (std::size_t iy = 0; iy < rny; ++iy)
        for (std::size_t ix = 0; ix < rnx; ++ix) {
            const double v = vals[iy * rnx + ix];
            if (!std::isfinite(v)) continue;
            const double t = vmax > vmin ? (v - vmin) / (vmax - vmin) : 0.0;
            svg += "<rect x=\"" + px(x0 + ix * cell) + "\" y=\"" + px(y0 - (iy + 1) * cell) +
                   "\" width=\"" + px(cell + 0.05) + "\" height=\"" + px(cell + 0.05) +
                   "\" fill=\"" + heat_color(t) + "\"/>\n";
        }

    // Color bar with the value range.
    const double bar_x = k_right + 14.0;
    const double bar_h = (k_bottom - k_top) / 64.0;
    for (int i = 0; i < 64; ++i)
        svg += "<rect x=\"" + px(bar_x) + "\" y=\"" + px(k_bottom - (i + 1) * bar_h) +
               "\" width=\"14\" height=\"" + px(bar_h + 0.05) + "\" fill=\"" +
               heat_color((i + 0.5) / 64.0) + "\"/>\n";
    svg += "<rect x=\"" + px(bar_x) + "\" y=\"" + px(k_top) + "\" width=\"14\" height=\"" +
           px(k_bottom - k_top) + "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    add_text(svg, bar_x + 7.0, k_bottom + 16.0, tick_label(vmin), "middle", 10);
    add_text(svg, bar_x + 7.0, k_top - 6.0, tick_label(vmax), "middle", 10);

    add_frame(svg);
    add_titles(svg, axes);
    svg += "</svg>\n";
    return svg;
}

}  // namespace snspd::plot
