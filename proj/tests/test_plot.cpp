#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "snspd/plot.hpp"

#include <doctest.h>

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

using namespace snspd;

namespace {

std::size_t count_of(const std::string& hay, const std::string& needle) {
    std::size_t n = 0;
    for (std::size_t pos = hay.find(needle); pos != std::string::npos;
         pos = hay.find(needle, pos + needle.size()))
        ++n;
    return n;
}

plot::Series ramp(const std::string& label, double slope, std::size_t n = 11) {
    plot::Series s;
    s.label = label;
    for (std::size_t i = 0; i < n; ++i) {
        s.x.push_back(static_cast<double>(i));
        s.y.push_back(slope * static_cast<double>(i));
    }
    return s;
}

}  // namespace

TEST_CASE("chart output is byte-stable and structurally sane") {
    const std::vector<plot::Series> series{ramp("up", 1.0), ramp("down", -0.5)};
    const plot::Axes axes{"demo", "index", "value"};
    const std::string a = plot::emit_plot(series, axes);
    const std::string b = plot::emit_plot(series, axes);
    CHECK(a == b);
    CHECK(a.rfind("<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\"", 0) == 0);
    CHECK(a.find("</svg>") != std::string::npos);
    CHECK(count_of(a, "<polyline") == 2);
    CHECK(a.find("demo") != std::string::npos);
    CHECK(a.find("index") != std::string::npos);
    CHECK(a.find(">up<") != std::string::npos);
    CHECK(a.find(">down<") != std::string::npos);
    CHECK(a.find("nan") == std::string::npos);
}

TEST_CASE("marker and scatter styles draw circles") {
    plot::Series s = ramp("pts", 2.0, 5);
    s.line = false;
    s.markers = true;
    const std::string svg = plot::emit_plot({s}, {});
    CHECK(count_of(svg, "<circle") == 5);
    CHECK(count_of(svg, "<polyline") == 0);

    plot::Series both = ramp("both", 1.0, 4);
    both.markers = true;
    const std::string svg2 = plot::emit_plot({both}, {});
    CHECK(count_of(svg2, "<circle") == 4);
    CHECK(count_of(svg2, "<polyline") == 1);
}

TEST_CASE("single-point and constant series stay finite") {
    plot::Series one{"dot", {3.0}, {4.0}, true, false};
    const std::string svg = plot::emit_plot({one}, {});
    CHECK(count_of(svg, "<circle") == 1);
    CHECK(svg.find("nan") == std::string::npos);
    CHECK(svg.find("inf") == std::string::npos);

    plot::Series flat{"flat", {0.0, 1.0, 2.0}, {5.0, 5.0, 5.0}, true, false};
    const std::string svg2 = plot::emit_plot({flat}, {});
    CHECK(svg2.find("nan") == std::string::npos);
}

TEST_CASE("chart rejects bad series") {
    CHECK_THROWS_AS(static_cast<void>(plot::emit_plot({}, {})), std::invalid_argument);
    plot::Series mismatched{"m", {1.0, 2.0}, {1.0}, true, false};
    CHECK_THROWS_WITH_AS(static_cast<void>(plot::emit_plot({mismatched}, {})),
                         doctest::Contains("lengths differ"), std::invalid_argument);
    plot::Series empty{"e", {}, {}, true, false};
    CHECK_THROWS_AS(static_cast<void>(plot::emit_plot({empty}, {})), std::invalid_argument);
    plot::Series bad{"b", {1.0, 2.0}, {1.0, std::nan("")}, true, false};
    CHECK_THROWS_WITH_AS(static_cast<void>(plot::emit_plot({bad}, {})),
                         doctest::Contains("non-finite"), std::invalid_argument);
}

TEST_CASE("labels are XML-escaped") {
    plot::Series s = ramp("a<b&c", 1.0, 3);
    const std::string svg = plot::emit_plot({s}, {"x & y", "", "\"q\""});
    CHECK(svg.find("a&lt;b&amp;c") != std::string::npos);
    CHECK(svg.find("x &amp; y") != std::string::npos);
    CHECK(svg.find("&quot;q&quot;") != std::string::npos);
    CHECK(svg.find("a<b") == std::string::npos);
}

TEST_CASE("tick labels cover the data range") {
    const std::string svg = plot::emit_plot({ramp("r", 1.0, 11)}, {});
    // Ticks sit slightly outside [0, 10] because of the 4% range padding.
    CHECK(svg.find(">-0.4<") != std::string::npos);
    CHECK(svg.find(">10.4<") != std::string::npos);
}

TEST_CASE("heatmap output is byte-stable and skips blank cells") {
    std::vector<double> grid(6 * 4, 1.0);
    grid[0] = std::nan("");
    grid[7] = 3.0;
    const plot::Axes axes{"field", "x", "y"};
    const std::string a = plot::emit_heatmap(grid, 6, 4, axes);
    CHECK(a == plot::emit_heatmap(grid, 6, 4, axes));
    // 23 finite cells + 64 color-bar segments + background and two frames.
    CHECK(count_of(a, "<rect") == 23 + 64 + 3);
    CHECK(a.find("nan") == std::string::npos);
}

TEST_CASE("heatmap validates its input") {
    CHECK_THROWS_AS(static_cast<void>(plot::emit_heatmap({1.0, 2.0}, 3, 1, {})),
                    std::invalid_argument);
    CHECK_THROWS_AS(static_cast<void>(plot::emit_heatmap({}, 0, 0, {})),
                    std::invalid_argument);
    const std::vector<double> blank(4, std::nan(""));
    CHECK_THROWS_WITH_AS(static_cast<void>(plot::emit_heatmap(blank, 2, 2, {})),
                         doctest::Contains("finite"), std::invalid_argument);
}

TEST_CASE("oversized heatmaps are block-averaged deterministically") {
    const std::size_t nx = 500, ny = 3;
    std::vector<double> grid(nx * ny);
    for (std::size_t iy = 0; iy < ny; ++iy)
        for (std::size_t ix = 0; ix < nx; ++ix)
            grid[iy * nx + ix] = static_cast<double>(ix + iy);
    const std::string a = plot::emit_heatmap(grid, nx, ny, {});
    CHECK(a == plot::emit_heatmap(grid, nx, ny, {}));
    // 500 columns collapse to ceil(500/3) = 167 blocks of 3.
    CHECK(count_of(a, "<rect") < nx);
    CHECK(a.find("nan") == std::string::npos);
}

TEST_CASE("constant heatmap maps everything to the low color") {
    const std::vector<double> grid(9, 2.5);
    const std::string svg = plot::emit_heatmap(grid, 3, 3, {});
    CHECK(count_of(svg, "#440154") >= 9);  // all cells at the bottom anchor color
}
