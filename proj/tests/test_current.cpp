#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "snspd/current.hpp"
#include "snspd/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

using namespace snspd;
using namespace snspd::current;

namespace {

geom::PolygonSet rect_polys(double x0, double y0, double x1, double y1) {
    geom::PolygonSet polys;
    polys.rings.push_back(geom::Polygon{{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}});
    return polys;
}

/// Independent even-odd point test used as the rasterization oracle.
bool oracle_inside(const geom::PolygonSet& polys, geom::Vec2 p) {
    int crossings = 0;
    for (const auto& ring : polys.rings) {
        const auto& v = ring.pts;
        for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
            if ((v[i].y > p.y) == (v[j].y > p.y)) continue;
            double x_hit =
                v[j].x + (p.y - v[j].y) / (v[i].y - v[j].y) * (v[i].x - v[j].x);
            if (p.x < x_hit) ++crossings;
        }
    }
    return crossings % 2 == 1;
}

/// Dense Gaussian-elimination oracle for the stream-function system,
/// assembled directly from the grid's face classification.
std::vector<double> dense_psi(const DomainGrid& g) {
    std::vector<int> unknown(g.mask.size(), -1);
    std::vector<int> cells;
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix)
            if (g.mask[g.index(ix, iy)]) {
                unknown[g.index(ix, iy)] = static_cast<int>(cells.size());
                cells.push_back(static_cast<int>(g.index(ix, iy)));
            }
    int n = static_cast<int>(cells.size());
    std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
    const int dx[4] = {-1, 1, 0, 0}, dy[4] = {0, 0, -1, 1};
    for (int u = 0; u < n; ++u) {
        int c = cells[u];
        int ix = c % g.nx, iy = c / g.nx;
        for (int k = 0; k < 4; ++k) {
            double w = g.cell_size / g.wall_dist[c][k];
            switch (g.faces[c][k]) {
                case Face::interior: {
                    int v = unknown[g.index(ix + dx[k], iy + dy[k])];
                    a[u][u] += 1.0;
                    a[u][v] -= 1.0;
                    break;
                }
                case Face::bank0:
                    a[u][u] += w;
                    break;
                case Face::bank1:
                    a[u][u] += w;
                    a[u][n] += w;
                    break;
                case Face::contact:
                    break;
            }
        }
    }
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        std::swap(a[col], a[piv]);
        REQUIRE(std::abs(a[col][col]) > 1e-12);
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            double f = a[r][col] / a[col][col];
            if (f == 0.0) continue;
            for (int c2 = col; c2 <= n; ++c2) a[r][c2] -= f * a[col][c2];
        }
    }
    std::vector<double> psi(g.mask.size(), 0.0);
    for (int u = 0; u < n; ++u) psi[cells[u]] = a[u][n] / a[u][u];
    return psi;
}

FieldGrid solve_path(const geom::NanowirePath& path, double h, double tol = 1e-10) {
    auto polys = geom::inflate(path, std::min(0.5, h / 4.0));
    auto [inlet, outlet] = end_contacts(path);
    auto grid = rasterize(polys, h, path.width, inlet, outlet);
    return solve_stream(grid, tol);
}

/// Log-log slope of |J| vs distance along the inner wall of a right-angle
/// bend, approaching the corner.
double corner_slope(double h) {
    std::vector<geom::Vec2> corners = {{-400.0, 0.0}, {0.0, 0.0}, {0.0, 400.0}};
    auto path = geom::path_from_polyline(corners, 40.0, 129.0,
                                         geom::PathKind::standard_fractal, false);
    auto field = solve_path(path, h);

    int ix_wall = -1;
    double best = 1e30;
    for (int ix = 0; ix < field.nx; ++ix) {
        double x = field.origin.x + (ix + 0.5) * h;
        if (std::abs(x - (-20.0 + h / 2.0)) < best) {
            best = std::abs(x - (-20.0 + h / 2.0));
            ix_wall = ix;
        }
    }
    REQUIRE(ix_wall >= 0);

    std::vector<double> lx, ly;
    for (int iy = 0; iy < field.ny; ++iy) {
        if (!field.wire(ix_wall, iy)) continue;
        double d = field.origin.y + (iy + 0.5) * h - 20.0;
        if (d < 1.5 * h || d > 30.0) continue;
        lx.push_back(std::log(d));
        ly.push_back(std::log(field.jmag[field.index(ix_wall, iy)]));
    }
    REQUIRE(lx.size() >= 3);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    auto n = static_cast<double>(lx.size());
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Net current through the contiguous wire runs of one grid row.
std::vector<double> row_run_fluxes(const FieldGrid& f, int iy) {
    std::vector<double> fluxes;
    int ix = 0;
    while (ix < f.nx) {
        if (!f.wire(ix, iy)) {
            ++ix;
            continue;
        }
        double acc = 0.0;
        while (ix < f.nx && f.wire(ix, iy)) {
            acc += f.jy[f.index(ix, iy)] * f.cell_size;
            ++ix;
        }
        fluxes.push_back(acc);
    }
    return fluxes;
}

}  // namespace

TEST_CASE("rasterizing a rectangle gives the expected mask") {
    auto polys = rect_polys(0.0, 0.0, 40.0, 1000.0);
    ContactSpec bottom{{0.0, 0.0}, {40.0, 0.0}, {0.0, -1.0}};
    ContactSpec top{{0.0, 1000.0}, {40.0, 1000.0}, {0.0, 1.0}};
    auto grid = rasterize(polys, 5.0, 40.0, bottom, top);
    CHECK(grid.wire_cell_count() == 8 * 200);
    // Interior rows are exactly 8 cells wide.
    int rows_with_8 = 0;
    for (int iy = 0; iy < grid.ny; ++iy) {
        int w = 0;
        for (int ix = 0; ix < grid.nx; ++ix)
            if (grid.wire(ix, iy)) ++w;
        if (w == 8) ++rows_with_8;
    }
    CHECK(rows_with_8 == 200);
}

TEST_CASE("rasterization validates its inputs") {
    auto polys = rect_polys(0.0, 0.0, 40.0, 1000.0);
    ContactSpec bottom{{0.0, 0.0}, {40.0, 0.0}, {0.0, -1.0}};
    ContactSpec top{{0.0, 1000.0}, {40.0, 1000.0}, {0.0, 1.0}};
    // Coarser than 8 cells across the width.
    CHECK_THROWS_AS(static_cast<void>(rasterize(polys, 6.0, 40.0, bottom, top)),
                    std::invalid_argument);
    // Disjoint rectangles cannot carry a current.
    auto disjoint = rect_polys(0.0, 0.0, 40.0, 1000.0);
    disjoint.rings.push_back(rect_polys(200.0, 0.0, 240.0, 1000.0).rings[0]);
    CHECK_THROWS_AS(static_cast<void>(rasterize(disjoint, 5.0, 40.0, bottom, top)),
                    std::runtime_error);
    // A contact that misses the wire entirely.
    ContactSpec stray{{500.0, 0.0}, {540.0, 0.0}, {0.0, -1.0}};
    CHECK_THROWS_AS(static_cast<void>(rasterize(polys, 5.0, 40.0, stray, top)),
                    std::runtime_error);
}

TEST_CASE("raster occupancy matches an independent point-in-polygon oracle") {
    auto path = crowding_unit(geom::PathKind::arced_fractal, 40.0, 129.0);
    auto polys = geom::inflate(path, 0.5);
    auto [inlet, outlet] = end_contacts(path);
    auto grid = rasterize(polys, 5.0, 40.0, inlet, outlet);
    std::size_t oracle_count = 0;
    for (int iy = 0; iy < grid.ny; ++iy)
        for (int ix = 0; ix < grid.nx; ++ix)
            if (oracle_inside(polys, grid.center(ix, iy))) ++oracle_count;
    CHECK(grid.wire_cell_count() == oracle_count);
}

TEST_CASE("straight wire carries a uniform current density") {
    std::vector<geom::Vec2> corners = {{0.0, 0.0}, {0.0, 1000.0}};
    auto path = geom::path_from_polyline(corners, 40.0, 129.0,
                                         geom::PathKind::meander, false);
    auto field = solve_path(path, 5.0);
    CHECK(field.method == "sor");
    for (int iy = 0; iy < field.ny; ++iy) {
        for (int ix = 0; ix < field.nx; ++ix) {
            if (!field.wire(ix, iy)) continue;
            double y = field.origin.y + (iy + 0.5) * field.cell_size;
            if (y < 100.0 || y > 900.0) continue;  // away from the contacts
            CHECK(field.jmag[field.index(ix, iy)] ==
                  doctest::Approx(1.0 / 40.0).epsilon(0.01));
        }
    }
    auto result = crowding(field, 40.0, 5.0);
    CHECK(result.ratio_isw_ic == doctest::Approx(1.0).epsilon(0.01));
    CHECK(result.j_uniform == doctest::Approx(1.0 / 40.0));
}

TEST_CASE("solver matches a dense direct solve on a small bend") {
    std::vector<geom::Vec2> corners = {{-60.0, 0.0}, {0.0, 0.0}, {0.0, 60.0}};
    auto path = geom::path_from_polyline(corners, 40.0, 129.0,
                                         geom::PathKind::standard_fractal, false);
    auto polys = geom::inflate(path, 0.5);
    auto [inlet, outlet] = end_contacts(path);
    auto grid = rasterize(polys, 5.0, 40.0, inlet, outlet);
    auto field = solve_stream(grid, 1e-12);
    auto oracle = dense_psi(grid);
    double max_err = 0.0;
    for (std::size_t c = 0; c < grid.mask.size(); ++c)
        if (grid.mask[c]) max_err = std::max(max_err, std::abs(field.psi[c] - oracle[c]));
    CHECK(max_err < 1e-10);
}

TEST_CASE("current density diverges toward an inner corner with the right exponent") {
    double s1 = corner_slope(5.0);
    double s2 = corner_slope(2.5);
    double s3 = corner_slope(1.25);
    // Conformal mapping of a right-angle bend gives |J| ~ d^(-1/3).
    CHECK(std::abs(s3 + 1.0 / 3.0) < 0.10);
    CHECK(std::abs(s3 + 1.0 / 3.0) <= std::abs(s1 + 1.0 / 3.0) + 0.02);
    CHECK(s2 < 0.0);
    CHECK(s1 < 0.0);
}

TEST_CASE("hairpin solve conserves current and respects the maximum principle") {
    auto path = crowding_unit(geom::PathKind::meander, 40.0, 129.0);
    auto field = solve_path(path, 4.0);

    for (std::size_t c = 0; c < field.psi.size(); ++c) {
        CHECK(field.psi[c] >= -1e-6);
        CHECK(field.psi[c] <= 1.0 + 1e-6);
    }

    // Cut rows across the straight legs: every leg carries the full unit
    // current, one leg up and one leg down.
    int checked = 0;
    for (int pick = 0; pick < 10; ++pick) {
        double y = 180.0 + 30.0 * pick;  // straight zone between turn and contacts
        int iy = static_cast<int>((y - field.origin.y) / field.cell_size);
        auto fluxes = row_run_fluxes(field, iy);
        REQUIRE(fluxes.size() == 2);
        CHECK(std::abs(fluxes[0]) == doctest::Approx(1.0).epsilon(0.005));
        CHECK(std::abs(fluxes[1]) == doctest::Approx(1.0).epsilon(0.005));
        CHECK(fluxes[0] * fluxes[1] < 0.0);
        ++checked;
    }
    CHECK(checked == 10);
}

TEST_CASE("mirror-symmetric domain yields a mirror-symmetric current map") {
    // All coordinates are multiples of the cell size, so the raster and the
    // solve are exactly symmetric about x = 64.
    std::vector<geom::Vec2> corners = {{0.0, 516.0}, {0.0, 0.0}, {128.0, 0.0}, {128.0, 516.0}};
    auto path = geom::path_from_polyline(corners, 40.0, 128.0,
                                         geom::PathKind::meander, false);
    auto field = solve_path(path, 4.0, 1e-12);
    double max_rel = 0.0;
    for (int iy = 0; iy < field.ny; ++iy) {
        for (int ix = 0; ix < field.nx; ++ix) {
            if (!field.wire(ix, iy)) continue;
            double xm = 128.0 - (field.origin.x + (ix + 0.5) * field.cell_size);
            int ixm = static_cast<int>(std::lround((xm - field.origin.x) / field.cell_size - 0.5));
            REQUIRE(field.wire(ixm, iy));
            double a = field.jmag[field.index(ix, iy)];
            double b = field.jmag[field.index(ixm, iy)];
            max_rel = std::max(max_rel, std::abs(a - b) / std::max(std::abs(a), 1e-30));
        }
    }
    CHECK(max_rel < 1e-6);
}

TEST_CASE("hairpin crowding ratio is stable under mesh halving") {
    CrowdingConfig coarse;
    coarse.cell_size = 4.0;
    CrowdingConfig fine;
    fine.cell_size = 2.0;
    double r1 = crowding_ratio(geom::PathKind::meander, 40.0, 129.0, coarse).ratio_isw_ic;
    double r2 = crowding_ratio(geom::PathKind::meander, 40.0, 129.0, fine).ratio_isw_ic;
    CHECK(std::abs(r1 - r2) / r2 < 0.02);
}

TEST_CASE("crowding rejects an unresolvable regularization radius") {
    auto path = crowding_unit(geom::PathKind::meander, 40.0, 129.0);
    auto field = solve_path(path, 4.0);
    CHECK_THROWS_AS(static_cast<void>(crowding(field, 40.0, 2.0)), std::invalid_argument);
}

TEST_CASE("half-annulus solve matches the exact closed-form current density") {
    // A semicircular wire admits the exact stream function
    // psi = ln(rho/a)/ln(b/a) with |J| = K/rho, K = 1/ln(b/a).
    const double w = 40.0, rc = 64.5, h = 4.0;
    const double a = rc - w / 2.0, b = rc + w / 2.0;
    const double K = 1.0 / std::log(b / a);

    geom::NanowirePath path;
    path.width = w;
    path.pitch = 2.0 * rc;
    path.kind = geom::PathKind::meander;
    geom::PathSegment arc;
    arc.kind = geom::PathSegment::Kind::arc;
    arc.a = {0.0, 0.0};
    arc.b = {2.0 * rc, 0.0};
    arc.center = {rc, 0.0};
    arc.ccw = true;
    path.segments = {arc};

    auto field = solve_path(path, h);

    // Pointwise |J| against K/rho in the bottom half, away from the contacts.
    // The worst single cell sits on the staircased wall; the bulk is tight.
    double max_rel = 0.0, sum_rel = 0.0;
    int cells = 0;
    for (int iy = 0; iy < field.ny; ++iy) {
        for (int ix = 0; ix < field.nx; ++ix) {
            if (!field.wire(ix, iy)) continue;
            double x = field.origin.x + (ix + 0.5) * h - rc;
            double y = field.origin.y + (iy + 0.5) * h;
            if (y > -20.0) continue;
            double rho = std::hypot(x, y);
            double rel = std::abs(field.jmag[field.index(ix, iy)] - K / rho) / (K / rho);
            max_rel = std::max(max_rel, rel);
            sum_rel += rel;
            ++cells;
        }
    }
    REQUIRE(cells > 300);
    CHECK(sum_rel / cells < 0.02);
    CHECK(max_rel < 0.25);

    // The disc-regularized peak against a direct area integral of K/rho over
    // the same disc: radius xi, centered half a cell inside the inner wall.
    const double xi = 10.0;
    const double step = 0.05;
    double sum = 0.0;
    long n = 0;
    for (double sx = -xi; sx <= xi; sx += step) {
        for (double sy = -xi; sy <= xi; sy += step) {
            if (sx * sx + sy * sy > xi * xi) continue;
            double rho = std::hypot(sx, -(a + h / 2.0) + sy);
            if (rho < a || rho > b) continue;
            sum += K / rho;
            ++n;
        }
    }
    double disc_oracle = sum / static_cast<double>(n);

    auto cr = crowding(field, w, xi);
    CHECK(std::abs(cr.j_peak - disc_oracle) / disc_oracle < 0.04);
    // The peak must sit on the inner wall.
    double rho_peak = std::hypot(cr.peak_location.x - rc, cr.peak_location.y);
    CHECK(std::abs(rho_peak - a) < h);
}

TEST_CASE("geometry ordering: standard < arced <= meander at the working fill factor") {
    CrowdingConfig cfg;
    cfg.cell_size = 4.0;  // ten cells across the wire, the working resolution
    double meander = crowding_ratio(geom::PathKind::meander, 40.0, 129.0, cfg).ratio_isw_ic;
    double arced = crowding_ratio(geom::PathKind::arced_fractal, 40.0, 129.0, cfg).ratio_isw_ic;
    double standard =
        crowding_ratio(geom::PathKind::standard_fractal, 40.0, 129.0, cfg).ratio_isw_ic;
    CHECK(standard < arced);
    CHECK(arced <= meander + 1e-12);
    // Each layout lands in its expected switching-current band.
    CHECK(standard > 0.60);
    CHECK(standard < 0.74);
    CHECK(arced > 0.75);
    CHECK(arced < 0.87);
    CHECK(meander > 0.76);
    CHECK(meander < 0.88);
}

TEST_CASE("crowding solves are deterministic") {
    CrowdingConfig cfg;
    cfg.cell_size = 5.0;
    auto a = crowding_ratio(geom::PathKind::arced_fractal, 40.0, 129.0, cfg);
    auto b = crowding_ratio(geom::PathKind::arced_fractal, 40.0, 129.0, cfg);
    CHECK(a.ratio_isw_ic == b.ratio_isw_ic);
    CHECK(a.j_peak == b.j_peak);
    CHECK(a.peak_location.x == b.peak_location.x);
    CHECK(a.peak_location.y == b.peak_location.y);
}

TEST_CASE("fill-factor sweep flags failing points instead of aborting") {
    CHECK_THROWS_AS(static_cast<void>(sweep_fill_factor(
                        geom::PathKind::meander, {0.01}, 40.0)),
                    std::invalid_argument);
    CrowdingConfig bad;
    bad.cell_size = 6.0;  // coarser than width / 8 at width 40
    auto pts = sweep_fill_factor(geom::PathKind::meander, {0.2, 0.31}, 40.0, bad);
    REQUIRE(pts.size() == 2);
    CHECK_FALSE(pts[0].ok);
    CHECK_FALSE(pts[1].ok);
    CHECK(pts[0].error.find("cell size") != std::string::npos);
}

TEST_CASE("end contacts sit on the wire ends facing outward") {
    auto path = crowding_unit(geom::PathKind::meander, 40.0, 129.0);
    auto [inlet, outlet] = end_contacts(path);
    CHECK(geom::norm(inlet.b - inlet.a) == doctest::Approx(40.0));
    CHECK(geom::dot(inlet.outward, path.start_dir()) == doctest::Approx(-1.0));
    CHECK(geom::dot(outlet.outward, path.end_dir()) == doctest::Approx(1.0));
    // The cap midpoint is the path end itself.
    geom::Vec2 mid = 0.5 * (outlet.a + outlet.b);
    CHECK(geom::norm(mid - path.end()) < 1e-9);
}
