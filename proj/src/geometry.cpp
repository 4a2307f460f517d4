#include "snspd/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "snspd/io.hpp"

namespace snspd::geom {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTol = 1e-9;  // nm-scale geometric tolerance

double wrap_positive(double angle) {
    while (angle <= 0.0) angle += 2.0 * kPi;
    while (angle > 2.0 * kPi) angle -= 2.0 * kPi;
    return angle;
}

Vec2 rotate(Vec2 v, double angle) {
    double c = std::cos(angle), s = std::sin(angle);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

Vec2 unit(Vec2 v) {
    double n = norm(v);
    if (n < kTol) throw std::runtime_error("degenerate direction in path");
    return {v.x / n, v.y / n};
}

Vec2 perp_left(Vec2 v) { return {-v.y, v.x}; }

}  // namespace

// ============================================================ basic types

Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
double norm(Vec2 v) { return std::hypot(v.x, v.y); }

void Rect::expand(Vec2 p) {
    x0 = std::min(x0, p.x);
    y0 = std::min(y0, p.y);
    x1 = std::max(x1, p.x);
    y1 = std::max(y1, p.y);
}

void Rect::expand(const Rect& r) {
    expand(Vec2{r.x0, r.y0});
    expand(Vec2{r.x1, r.y1});
}

double PathSegment::radius() const {
    if (kind != Kind::arc) throw std::logic_error("radius() on straight segment");
    return norm(a - center);
}

double PathSegment::sweep_angle() const {
    if (kind != Kind::arc) throw std::logic_error("sweep_angle() on straight segment");
    double a0 = std::atan2(a.y - center.y, a.x - center.x);
    double a1 = std::atan2(b.y - center.y, b.x - center.x);
    double sweep = ccw ? (a1 - a0) : (a0 - a1);
    return wrap_positive(sweep);
}

double PathSegment::length() const {
    if (kind == Kind::straight) return norm(b - a);
    return radius() * sweep_angle();
}

Vec2 PathSegment::point_at(double t) const {
    if (kind == Kind::straight) return a + t * (b - a);
    double delta = sweep_angle() * t * (ccw ? 1.0 : -1.0);
    return center + rotate(a - center, delta);
}

Vec2 PathSegment::tangent_at(double t) const {
    if (kind == Kind::straight) return unit(b - a);
    Vec2 radial = unit(point_at(t) - center);
    return ccw ? perp_left(radial) : -1.0 * perp_left(radial);
}

Rect PathSegment::bounding_box() const {
    Rect box{a.x, a.y, a.x, a.y};
    box.expand(b);
    if (kind == Kind::arc) {
        double r = radius();
        double a0 = std::atan2(a.y - center.y, a.x - center.x);
        double sweep = sweep_angle();
        for (int k = -4; k <= 4; ++k) {
            double axis = k * (kPi / 2.0);
            double delta = ccw ? wrap_positive(axis - a0) : wrap_positive(a0 - axis);
            if (delta <= sweep) box.expand(center + rotate({r, 0.0}, axis));
        }
    }
    return box;
}

double NanowirePath::centerline_length() const {
    double total = 0.0;
    for (const auto& s : segments) total += s.length();
    return total;
}

Rect NanowirePath::bounding_box() const {
    if (segments.empty()) throw std::runtime_error("empty path");
    Rect box = segments.front().bounding_box();
    for (const auto& s : segments) box.expand(s.bounding_box());
    return box;
}

Vec2 NanowirePath::start() const {
    if (segments.empty()) throw std::runtime_error("empty path");
    return segments.front().a;
}

Vec2 NanowirePath::end() const {
    if (segments.empty()) throw std::runtime_error("empty path");
    return segments.back().b;
}

Vec2 NanowirePath::start_dir() const { return segments.front().tangent_at(0.0); }
Vec2 NanowirePath::end_dir() const { return segments.back().tangent_at(1.0); }

void NanowirePath::validate() const {
    if (width <= 0.0) throw std::invalid_argument("path width must be positive");
    if (pitch <= 0.0) throw std::invalid_argument("path pitch must be positive");
    if (segments.empty()) throw std::invalid_argument("path has no segments");
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const auto& s = segments[i];
        if (s.length() < kTol) throw std::invalid_argument("zero-length path segment");
        if (s.kind == PathSegment::Kind::arc) {
            double ra = norm(s.a - s.center), rb = norm(s.b - s.center);
            if (std::abs(ra - rb) > 1e-6)
                throw std::invalid_argument("arc endpoints not equidistant from center");
        }
        if (i > 0 && norm(s.a - segments[i - 1].b) > 1e-6)
            throw std::invalid_argument("path segments are not contiguous");
    }
}

bool operator==(const PathSegment& a, const PathSegment& b) {
    if (a.kind != b.kind) return false;
    auto same = [](Vec2 u, Vec2 v) { return u.x == v.x && u.y == v.y; };
    if (!same(a.a, b.a) || !same(a.b, b.b)) return false;
    if (a.kind == PathSegment::Kind::arc)
        return same(a.center, b.center) && a.ccw == b.ccw;
    return true;
}

bool operator==(const NanowirePath& a, const NanowirePath& b) {
    return a.width == b.width && a.pitch == b.pitch && a.kind == b.kind &&
           a.segments == b.segments;
}

std::string to_string(PathKind kind) {
    switch (kind) {
        case PathKind::meander: return "meander";
        case PathKind::standard_fractal: return "standard_fractal";
        case PathKind::arced_fractal: return "arced_fractal";
    }
    throw std::logic_error("unhandled path kind");
}

PathKind path_kind_from_string(const std::string& name) {
    if (name == "meander") return PathKind::meander;
    if (name == "standard_fractal") return PathKind::standard_fractal;
    if (name == "arced_fractal") return PathKind::arced_fractal;
    throw std::invalid_argument("unknown path kind: " + name);
}

double Polygon::signed_area() const {
    double acc = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const Vec2& p = pts[i];
        const Vec2& q = pts[(i + 1) % pts.size()];
        acc += cross(p, q);
    }
    return 0.5 * acc;
}

Rect Polygon::bounding_box() const {
    if (pts.empty()) throw std::runtime_error("empty polygon");
    Rect box{pts[0].x, pts[0].y, pts[0].x, pts[0].y};
    for (const auto& p : pts) box.expand(p);
    return box;
}

bool Polygon::contains(Vec2 p) const {
    bool inside = false;
    for (std::size_t i = 0, j = pts.size() - 1; i < pts.size(); j = i++) {
        const Vec2& a = pts[i];
        const Vec2& b = pts[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            double x_cross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if (p.x < x_cross) inside = !inside;
        }
    }
    return inside;
}

double PolygonSet::area() const {
    double acc = 0.0;
    for (const auto& r : rings) acc += r.signed_area();
    return acc;
}

Rect PolygonSet::bounding_box() const {
    if (rings.empty()) throw std::runtime_error("empty polygon set");
    Rect box = rings[0].bounding_box();
    for (const auto& r : rings) box.expand(r.bounding_box());
    return box;
}

bool PolygonSet::contains(Vec2 p) const {
    int winding = 0;
    for (const auto& r : rings)
        if (r.contains(p)) ++winding;
    return winding % 2 == 1;
}

double fill_factor(const NanowirePath& path) {
    if (path.pitch <= 0.0 || path.width <= 0.0)
        throw std::invalid_argument("fill factor needs positive width and pitch");
    if (path.width > path.pitch)
        throw std::invalid_argument("width exceeds pitch");
    return path.width / path.pitch;
}

// ============================================================ generators

namespace {

using LatticePoint = std::pair<std::int64_t, std::int64_t>;

std::int64_t pow3(int n) {
    std::int64_t v = 1;
    while (n-- > 0) v *= 3;
    return v;
}

/// Classic switchback Peano curve on a 3^order grid, from (0,0) to
/// (3^order-1, 3^order-1). Sub-cells are visited column-serpentine; the
/// sub-curve in cell (cx, cy) is x-flipped when cy is odd and y-flipped
/// when cx is odd, which chains entry and exit corners seamlessly.
std::vector<LatticePoint> peano_cell(int order) {
    if (order == 0) return {{0, 0}};
    auto sub = peano_cell(order - 1);
    std::int64_t m = pow3(order - 1);
    std::vector<LatticePoint> out;
    out.reserve(sub.size() * 9);
    for (int cx = 0; cx < 3; ++cx) {
        for (int step = 0; step < 3; ++step) {
            int cy = (cx % 2 == 0) ? step : 2 - step;
            bool fx = (cy % 2 == 1);
            bool fy = (cx % 2 == 1);
            for (auto [x, y] : sub) {
                std::int64_t xx = fx ? m - 1 - x : x;
                std::int64_t yy = fy ? m - 1 - y : y;
                out.emplace_back(cx * m + xx, cy * m + yy);
            }
        }
    }
    return out;
}

void append_cell(std::vector<LatticePoint>& out, const std::vector<LatticePoint>& base,
                 std::int64_t m, std::int64_t ox, std::int64_t oy, bool fx, bool fy) {
    for (auto [x, y] : base) {
        std::int64_t xx = fx ? m - 1 - x : x;
        std::int64_t yy = fy ? m - 1 - y : y;
        out.emplace_back(ox + xx, oy + yy);
    }
}

/// Chain an n x n tiling of Peano cells into one path. Rows alternate
/// direction; each cell is the base curve flipped so its entry corner meets
/// the previous exit; row-to-row connectors run through the one-pitch margin
/// beside the tiling (a Peano cell crosses between diagonal corners, so a
/// plain serpentine cannot turn around at the end of an even-length row).
std::vector<LatticePoint> peano_tiling(int order, std::int64_t n) {
    const auto base = peano_cell(order);
    const std::int64_t m = pow3(order);
    std::vector<LatticePoint> pts;
    pts.reserve(static_cast<std::size_t>(n * n) * base.size() + 16 * n);

    int ex = 0, ey = 0;  // entry corner of the next cell (0/1 per axis)
    for (std::int64_t row = 0; row < n; ++row) {
        bool rightward = (row % 2 == 0);
        for (std::int64_t k = 0; k < n; ++k) {
            std::int64_t col = rightward ? k : n - 1 - k;
            append_cell(pts, base, m, col * m, row * m, ex != 0, ey != 0);
            // exit corner is diagonally opposite; the horizontal move into
            // the next cell flips the x corner back
            ey = 1 - ey;
        }
        if (row + 1 < n) {
            // margin connector: one step out, climb to the bottom of the
            // next row band, one step back in; after the loop above `ey`
            // already equals the y corner the row exited at
            std::int64_t x_margin = rightward ? n * m : -1;
            std::int64_t y_exit = row * m + (ey == 1 ? m - 1 : 0);
            for (std::int64_t y = y_exit; y <= (row + 1) * m; ++y)
                pts.emplace_back(x_margin, y);
            ex = rightward ? 1 : 0;
            ey = 0;
        }
    }
    return pts;
}

/// Merge a unit-step lattice walk into straight runs, in nm.
std::vector<Vec2> lattice_to_vertices(const std::vector<LatticePoint>& pts, double pitch) {
    std::vector<Vec2> verts;
    verts.push_back({pts[0].first * pitch, pts[0].second * pitch});
    for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
        auto [x0, y0] = pts[i - 1];
        auto [x1, y1] = pts[i];
        auto [x2, y2] = pts[i + 1];
        bool collinear = (x1 - x0 == x2 - x1) && (y1 - y0 == y2 - y1);
        if (!collinear) verts.push_back({x1 * pitch, y1 * pitch});
    }
    verts.push_back({pts.back().first * pitch, pts.back().second * pitch});
    return verts;
}

std::vector<PathSegment> vertices_to_segments(const std::vector<Vec2>& verts) {
    std::vector<PathSegment> segs;
    for (std::size_t i = 0; i + 1 < verts.size(); ++i) {
        PathSegment s;
        s.kind = PathSegment::Kind::straight;
        s.a = verts[i];
        s.b = verts[i + 1];
        segs.push_back(s);
    }
    return segs;
}

/// Replace every interior corner of a polyline by a tangent circular arc of
/// radius r. Straights fully consumed by adjacent arcs are dropped, which
/// merges U-turn corner pairs into single semicircles at r = pitch/2.
std::vector<PathSegment> round_corners(const std::vector<Vec2>& verts, double r) {
    std::vector<PathSegment> segs;
    Vec2 cursor = verts[0];
    for (std::size_t i = 1; i + 1 < verts.size(); ++i) {
        Vec2 c = verts[i];
        Vec2 u = unit(c - verts[i - 1]);
        Vec2 v = unit(verts[i + 1] - c);
        if (std::abs(dot(u, v)) > kTol)
            throw std::runtime_error("corner rounding supports only 90-degree turns");
        Vec2 p1 = c - r * u;
        Vec2 p2 = c + r * v;
        if (norm(p1 - cursor) > kTol) {
            PathSegment s;
            s.kind = PathSegment::Kind::straight;
            s.a = cursor;
            s.b = p1;
            segs.push_back(s);
        } else if (dot(p1 - cursor, u) < -kTol) {
            throw std::runtime_error("arc radius exceeds available straight length");
        }
        PathSegment arc;
        arc.kind = PathSegment::Kind::arc;
        arc.a = p1;
        arc.b = p2;
        arc.center = c - r * u + r * v;
        arc.ccw = cross(u, v) > 0.0;
        segs.push_back(arc);
        cursor = p2;
    }
    if (norm(verts.back() - cursor) > kTol) {
        PathSegment s;
        s.kind = PathSegment::Kind::straight;
        s.a = cursor;
        s.b = verts.back();
        segs.push_back(s);
    }
    return segs;
}

void check_generator_args(double area_side, double width, double pitch) {
    if (width <= 0.0 || pitch <= 0.0 || area_side <= 0.0)
        throw std::invalid_argument("geometry dimensions must be positive");
    if (pitch < width)
        throw std::invalid_argument("pitch must be at least the wire width");
    if (area_side < pitch)
        throw std::invalid_argument("area side smaller than one pitch");
}

}  // namespace

NanowirePath gen_meander(double area_side, double width, double pitch) {
    check_generator_args(area_side, width, pitch);
    auto n_lines = static_cast<std::int64_t>(std::floor(area_side / pitch + kTol));
    double r = pitch / 2.0;
    double top = area_side - r;

    NanowirePath path;
    path.width = width;
    path.pitch = pitch;
    path.kind = PathKind::meander;
    if (n_lines == 1) {
        PathSegment s;
        s.kind = PathSegment::Kind::straight;
        s.a = {0.0, 0.0};
        s.b = {0.0, area_side};
        path.segments.push_back(s);
        return path;
    }

    for (std::int64_t i = 0; i < n_lines; ++i) {
        double x = i * pitch;
        bool upward = (i % 2 == 0);
        bool first = (i == 0), last = (i == n_lines - 1);
        // free line ends (no U-turn attached) extend to the region edge
        double y_lo = (first && upward) || (last && !upward) ? 0.0 : r;
        double y_hi = (last && upward) ? area_side : top;
        PathSegment leg;
        leg.kind = PathSegment::Kind::straight;
        leg.a = {x, upward ? y_lo : y_hi};
        leg.b = {x, upward ? y_hi : y_lo};
        path.segments.push_back(leg);
        if (i + 1 < n_lines) {
            PathSegment turn;
            turn.kind = PathSegment::Kind::arc;
            double y_turn = upward ? top : r;
            turn.a = {x, y_turn};
            turn.b = {x + pitch, y_turn};
            turn.center = {x + r, y_turn};
            turn.ccw = !upward;
            path.segments.push_back(turn);
        }
    }
    path.validate();
    return path;
}

std::vector<LatticePoint> peano_lattice(double area_side, double pitch, int order) {
    if (order != 1 && order != 2)
        throw std::invalid_argument("Peano order " + std::to_string(order) +
                                    " unsupported (only 1 and 2)");
    std::int64_t m = pow3(order);
    double span = static_cast<double>(m) * pitch;
    auto n = static_cast<std::int64_t>(std::floor(area_side / span + kTol));
    if (n < 1)
        throw std::invalid_argument("area side smaller than one Peano cell span");
    return peano_tiling(order, n);
}

NanowirePath gen_fractal(double area_side, double width, double pitch, int order,
                         bool arced, double arc_radius_frac) {
    check_generator_args(area_side, width, pitch);
    if (arc_radius_frac < 0.0 || arc_radius_frac > 0.5)
        throw std::invalid_argument("arc_radius_frac must lie in [0, 0.5]");

    auto pts = peano_lattice(area_side, pitch, order);
    auto verts = lattice_to_vertices(pts, pitch);
    PathKind kind = (arced && arc_radius_frac * pitch > kTol) ? PathKind::arced_fractal
                                                              : PathKind::standard_fractal;
    return path_from_polyline(verts, width, pitch, kind, arced, arc_radius_frac);
}

NanowirePath path_from_polyline(const std::vector<Vec2>& corners, double width,
                                double pitch, PathKind kind, bool arced,
                                double arc_radius_frac) {
    if (corners.size() < 2) throw std::invalid_argument("polyline needs at least 2 points");
    if (width <= 0.0 || pitch <= 0.0)
        throw std::invalid_argument("width and pitch must be positive");
    if (arc_radius_frac < 0.0 || arc_radius_frac > 0.5)
        throw std::invalid_argument("arc_radius_frac must lie in [0, 0.5]");

    std::vector<Vec2> verts;
    verts.push_back(corners.front());
    for (std::size_t i = 1; i + 1 < corners.size(); ++i) {
        Vec2 u = corners[i] - corners[i - 1];
        Vec2 v = corners[i + 1] - corners[i];
        if (norm(v) < kTol) continue;
        bool collinear = std::abs(cross(u, v)) < kTol * norm(u) * norm(v) && dot(u, v) > 0.0;
        if (!collinear) verts.push_back(corners[i]);
    }
    verts.push_back(corners.back());

    NanowirePath path;
    path.width = width;
    path.pitch = pitch;
    path.kind = kind;
    double r = arc_radius_frac * pitch;
    if (arced && r > kTol) {
        if (r <= width / 2.0)
            throw std::invalid_argument("arc radius must exceed half the wire width");
        path.segments = round_corners(verts, r);
    } else {
        path.segments = vertices_to_segments(verts);
    }
    path.validate();
    return path;
}

// ============================================================ inflation

namespace {

struct OffsetSide {
    std::vector<Vec2> pts;
};

void append_point(std::vector<Vec2>& pts, Vec2 p) {
    if (!pts.empty() && norm(pts.back() - p) < kTol) return;
    pts.push_back(p);
}

/// Discretized circular arc from angle a0 through `sweep` (signed), sagitta
/// bounded by tol. Endpoints are exact.
void append_arc(std::vector<Vec2>& pts, Vec2 center, double radius, double a0,
                double sweep, double tol) {
    double max_step = 2.0 * std::acos(std::max(0.0, 1.0 - tol / std::max(radius, tol)));
    if (max_step <= 0.0) max_step = 0.1;
    int n = std::max(1, static_cast<int>(std::ceil(std::abs(sweep) / max_step)));
    for (int k = 0; k <= n; ++k) {
        double ang = a0 + sweep * (static_cast<double>(k) / n);
        append_point(pts, center + rotate({radius, 0.0}, ang));
    }
}

Vec2 line_intersection(Vec2 p, Vec2 u, Vec2 q, Vec2 v) {
    double denom = cross(u, v);
    if (std::abs(denom) < 1e-12)
        throw std::runtime_error("cannot miter nearly parallel segments");
    double t = cross(q - p, v) / denom;
    return p + t * u;
}

struct SegmentEdge {
    Vec2 a, b;
    std::size_t index;
};

bool proper_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    auto orient = [](Vec2 p, Vec2 q, Vec2 r) { return cross(q - p, r - p); };
    double o1 = orient(a, b, c), o2 = orient(a, b, d);
    double o3 = orient(c, d, a), o4 = orient(c, d, b);
    const double eps = 1e-9;
    if (((o1 > eps && o2 < -eps) || (o1 < -eps && o2 > eps)) &&
        ((o3 > eps && o4 < -eps) || (o3 < -eps && o4 > eps)))
        return true;
    return false;
}

/// Spatial-hash pass over all polygon edges; throws on any crossing between
/// non-adjacent edges.
void check_self_intersection(const Polygon& poly) {
    const auto& pts = poly.pts;
    std::size_t n = pts.size();
    if (n < 4) throw std::runtime_error("inflated polygon degenerate");

    double total_len = 0.0;
    for (std::size_t i = 0; i < n; ++i) total_len += norm(pts[(i + 1) % n] - pts[i]);
    double cell = std::max(total_len / static_cast<double>(n) * 2.0, 1.0);

    auto key = [](std::int64_t gx, std::int64_t gy) {
        return static_cast<std::uint64_t>(gx) * 0x9E3779B97F4A7C15ull +
               static_cast<std::uint64_t>(gy);
    };
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets;
    auto bucket_range = [&](Vec2 a, Vec2 b) {
        auto gx0 = static_cast<std::int64_t>(std::floor(std::min(a.x, b.x) / cell));
        auto gx1 = static_cast<std::int64_t>(std::floor(std::max(a.x, b.x) / cell));
        auto gy0 = static_cast<std::int64_t>(std::floor(std::min(a.y, b.y) / cell));
        auto gy1 = static_cast<std::int64_t>(std::floor(std::max(a.y, b.y) / cell));
        return std::tuple{gx0, gx1, gy0, gy1};
    };
    for (std::size_t i = 0; i < n; ++i) {
        auto [gx0, gx1, gy0, gy1] = bucket_range(pts[i], pts[(i + 1) % n]);
        for (auto gx = gx0; gx <= gx1; ++gx)
            for (auto gy = gy0; gy <= gy1; ++gy) buckets[key(gx, gy)].push_back(i);
    }
    std::unordered_set<std::uint64_t> tested;
    for (auto& [k, edges] : buckets) {
        for (std::size_t p = 0; p < edges.size(); ++p) {
            for (std::size_t q = p + 1; q < edges.size(); ++q) {
                std::size_t i = edges[p], j = edges[q];
                if (i == j) continue;
                std::size_t lo = std::min(i, j), hi = std::max(i, j);
                if (hi - lo == 1 || (lo == 0 && hi == n - 1)) continue;  // adjacent
                std::uint64_t pair_key = (static_cast<std::uint64_t>(lo) << 32) | hi;
                if (!tested.insert(pair_key).second) continue;
                if (proper_intersect(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n]))
                    throw std::runtime_error(
                        "inflated wire self-intersects (width too large for geometry)");
            }
        }
    }
}

}  // namespace

PolygonSet inflate(const NanowirePath& path, double chord_tol) {
    path.validate();
    if (chord_tol <= 0.0) throw std::invalid_argument("chord tolerance must be positive");
    double hw = path.width / 2.0;

    // left/right offset polylines along the walk direction
    std::vector<Vec2> left, right;
    const auto& segs = path.segments;
    for (std::size_t i = 0; i < segs.size(); ++i) {
        const auto& s = segs[i];
        if (i > 0 && (s.kind == PathSegment::Kind::arc ||
                      segs[i - 1].kind == PathSegment::Kind::arc)) {
            Vec2 t0 = segs[i - 1].tangent_at(1.0);
            Vec2 t1 = s.tangent_at(0.0);
            if (norm(t0 - t1) > 1e-6)
                throw std::runtime_error("non-tangent arc junction unsupported by inflate");
        }
        if (s.kind == PathSegment::Kind::straight) {
            Vec2 u = unit(s.b - s.a);
            Vec2 nl = perp_left(u);
            Vec2 la = s.a + hw * nl, lb = s.b + hw * nl;
            Vec2 ra = s.a - hw * nl, rb = s.b - hw * nl;
            // sharp corner with the previous straight: miter both sides
            if (i > 0 && segs[i - 1].kind == PathSegment::Kind::straight) {
                Vec2 up = unit(segs[i - 1].b - segs[i - 1].a);
                if (std::abs(cross(up, u)) > kTol) {
                    Vec2 miter_l = line_intersection(left.back(), up, la, u);
                    Vec2 miter_r = line_intersection(right.back(), up, ra, u);
                    left.back() = miter_l;
                    right.back() = miter_r;
                    la = miter_l;
                    ra = miter_r;
                }
            }
            append_point(left, la);
            append_point(left, lb);
            append_point(right, ra);
            append_point(right, rb);
        } else {
            double r = s.radius();
            if (r <= hw + kTol)
                throw std::runtime_error("arc radius must exceed half the wire width");
            double a0 = std::atan2(s.a.y - s.center.y, s.a.x - s.center.x);
            double sweep = s.sweep_angle() * (s.ccw ? 1.0 : -1.0);
            double r_left = s.ccw ? r - hw : r + hw;
            double r_right = s.ccw ? r + hw : r - hw;
            append_arc(left, s.center, r_left, a0, sweep, chord_tol);
            append_arc(right, s.center, r_right, a0, sweep, chord_tol);
        }
    }

    Polygon ring;
    ring.pts.reserve(left.size() + right.size() + 2);
    for (const auto& p : right) append_point(ring.pts, p);
    for (auto it = left.rbegin(); it != left.rend(); ++it) append_point(ring.pts, *it);
    if (ring.pts.size() >= 2 && norm(ring.pts.front() - ring.pts.back()) < kTol)
        ring.pts.pop_back();
    if (ring.signed_area() < 0.0)
        std::reverse(ring.pts.begin(), ring.pts.end());

    check_self_intersection(ring);

    PolygonSet out;
    out.rings.push_back(std::move(ring));
    return out;
}

// ============================================================ serialization

namespace {

void emit_vec(std::string& out, Vec2 v) {
    out += '[';
    out += io::fmt_fixed(v.x, 3);
    out += ", ";
    out += io::fmt_fixed(v.y, 3);
    out += ']';
}

}  // namespace

std::string layout_json(const NanowirePath& path) {
    std::string out = "{\n";
    out += "  \"kind\": \"nanowire_path\",\n";
    out += "  \"pattern\": \"" + to_string(path.kind) + "\",\n";
    out += "  \"width_nm\": " + io::fmt_fixed(path.width, 3) + ",\n";
    out += "  \"pitch_nm\": " + io::fmt_fixed(path.pitch, 3) + ",\n";
    out += "  \"segments\": [\n";
    for (std::size_t i = 0; i < path.segments.size(); ++i) {
        const auto& s = path.segments[i];
        out += "    {\"type\": ";
        if (s.kind == PathSegment::Kind::straight) {
            out += "\"straight\", \"a\": ";
            emit_vec(out, s.a);
            out += ", \"b\": ";
            emit_vec(out, s.b);
        } else {
            out += "\"arc\", \"a\": ";
            emit_vec(out, s.a);
            out += ", \"b\": ";
            emit_vec(out, s.b);
            out += ", \"center\": ";
            emit_vec(out, s.center);
            out += ", \"ccw\": ";
            out += s.ccw ? "true" : "false";
        }
        out += i + 1 < path.segments.size() ? "},\n" : "}\n";
    }
    out += "  ]\n}\n";
    return out;
}

NanowirePath path_from_layout_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    if (j.value("kind", "") != "nanowire_path")
        throw std::runtime_error("layout JSON is not a nanowire_path document");
    NanowirePath path;
    path.kind = path_kind_from_string(j.at("pattern").get<std::string>());
    path.width = j.at("width_nm").get<double>();
    path.pitch = j.at("pitch_nm").get<double>();
    for (const auto& js : j.at("segments")) {
        PathSegment s;
        std::string type = js.at("type").get<std::string>();
        auto vec = [&js](const char* key) {
            const auto& a = js.at(key);
            return Vec2{a.at(0).get<double>(), a.at(1).get<double>()};
        };
        s.a = vec("a");
        s.b = vec("b");
        if (type == "straight") {
            s.kind = PathSegment::Kind::straight;
        } else if (type == "arc") {
            s.kind = PathSegment::Kind::arc;
            s.center = vec("center");
            s.ccw = js.at("ccw").get<bool>();
        } else {
            throw std::runtime_error("unknown segment type: " + type);
        }
        path.segments.push_back(s);
    }
    path.validate();
    return path;
}

std::string polygons_to_layout_json(const PolygonSet& polys) {
    std::string out = "{\"unit\":\"nm\",\"polygons\":[";
    for (std::size_t r = 0; r < polys.rings.size(); ++r) {
        if (r > 0) out += ',';
        out += '[';
        const auto& pts = polys.rings[r].pts;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (i > 0) out += ',';
            emit_vec(out, pts[i]);
        }
        out += ']';
    }
    out += "]}\n";
    return out;
}

PolygonSet polygons_from_layout_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    if (j.value("unit", "") != "nm")
        throw std::runtime_error("layout JSON must declare unit nm");
    PolygonSet polys;
    for (const auto& ring : j.at("polygons")) {
        Polygon poly;
        for (const auto& pt : ring)
            poly.pts.push_back({pt.at(0).get<double>(), pt.at(1).get<double>()});
        if (poly.pts.size() < 3)
            throw std::runtime_error("polygon ring with fewer than 3 vertices");
        polys.rings.push_back(std::move(poly));
    }
    return polys;
}

void write_layout_svg(std::ostream& os, const NanowirePath& path,
                      const PolygonSet& polys) {
    Rect box = polys.bounding_box();
    double margin = std::max(path.width, 0.02 * std::max(box.width(), box.height()));
    double x0 = box.x0 - margin, y0 = box.y0 - margin;
    double w = box.width() + 2 * margin, h = box.height() + 2 * margin;
    auto f = [](double v) { return io::fmt_fixed(v, 3); };

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"" << f(x0)
       << " " << f(-y0 - h) << " " << f(w) << " " << f(h) << "\">\n";
    os << "<g transform=\"scale(1,-1)\">\n";
    os << "<rect x=\"" << f(x0) << "\" y=\"" << f(y0) << "\" width=\"" << f(w)
       << "\" height=\"" << f(h) << "\" fill=\"#ffffff\"/>\n";
    os << "<path fill=\"#26415d\" fill-rule=\"evenodd\" d=\"";
    for (const auto& ring : polys.rings) {
        for (std::size_t i = 0; i < ring.pts.size(); ++i) {
            os << (i == 0 ? "M" : "L") << f(ring.pts[i].x) << " " << f(ring.pts[i].y);
        }
        os << "Z";
    }
    os << "\"/>\n";
    os << "</g>\n</svg>\n";
}

}  // namespace snspd::geom
