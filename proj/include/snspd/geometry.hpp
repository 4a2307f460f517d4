#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace snspd::geom {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

[[nodiscard]] Vec2 operator+(Vec2 a, Vec2 b);
[[nodiscard]] Vec2 operator-(Vec2 a, Vec2 b);
[[nodiscard]] Vec2 operator*(double s, Vec2 v);
[[nodiscard]] double dot(Vec2 a, Vec2 b);
[[nodiscard]] double cross(Vec2 a, Vec2 b);
[[nodiscard]] double norm(Vec2 v);

/// Axis-aligned box, all coordinates in nm.
struct Rect {
    double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
    [[nodiscard]] double width() const { return x1 - x0; }
    [[nodiscard]] double height() const { return y1 - y0; }
    [[nodiscard]] double area() const { return width() * height(); }
    void expand(Vec2 p);
    void expand(const Rect& r);
};

/// One centerline piece: a straight segment or a circular arc.
/// Arcs are parameterized by endpoints, center, and orientation; the swept
/// angle is always the one consistent with `ccw` and is less than 2*pi.
struct PathSegment {
    enum class Kind { straight, arc };

    Kind kind = Kind::straight;
    Vec2 a;       // start point
    Vec2 b;       // end point
    Vec2 center;  // arc only
    bool ccw = true;

    [[nodiscard]] double radius() const;
    [[nodiscard]] double sweep_angle() const;  // radians, in (0, 2*pi)
    [[nodiscard]] double length() const;
    [[nodiscard]] Vec2 point_at(double t) const;  // t in [0, 1]
    [[nodiscard]] Vec2 tangent_at(double t) const;
    [[nodiscard]] Rect bounding_box() const;  // of the centerline
};

enum class PathKind { meander, standard_fractal, arced_fractal };

[[nodiscard]] std::string to_string(PathKind kind);
[[nodiscard]] PathKind path_kind_from_string(const std::string& name);

/// Open nanowire centerline: a contiguous chain of segments with a wire
/// width and the pitch it was generated at. Lengths in nm.
struct NanowirePath {
    double width = 0.0;
    double pitch = 0.0;
    PathKind kind = PathKind::meander;
    std::vector<PathSegment> segments;

    [[nodiscard]] double centerline_length() const;
    [[nodiscard]] Rect bounding_box() const;  // centerline bbox
    [[nodiscard]] Vec2 start() const;
    [[nodiscard]] Vec2 end() const;
    [[nodiscard]] Vec2 start_dir() const;  // unit tangent at start
    [[nodiscard]] Vec2 end_dir() const;

    /// Throws if segments are not a contiguous chain.
    void validate() const;
};

[[nodiscard]] bool operator==(const PathSegment& a, const PathSegment& b);
[[nodiscard]] bool operator==(const NanowirePath& a, const NanowirePath& b);

/// Simple polygon ring; positive signed area = counter-clockwise = outer.
struct Polygon {
    std::vector<Vec2> pts;
    [[nodiscard]] double signed_area() const;
    [[nodiscard]] Rect bounding_box() const;
    [[nodiscard]] bool contains(Vec2 p) const;  // even-odd rule
};

/// A set of rings; outer boundaries CCW, holes CW.
struct PolygonSet {
    std::vector<Polygon> rings;
    [[nodiscard]] double area() const;  // sum of signed areas
    [[nodiscard]] Rect bounding_box() const;
    [[nodiscard]] bool contains(Vec2 p) const;
};

/// Fill factor of the generated pattern, defined as width / pitch.
[[nodiscard]] double fill_factor(const NanowirePath& path);

/// Boustrophedon meander: floor(area_side / pitch) vertical lines joined by
/// semicircular U-turns of centerline radius pitch/2.
[[nodiscard]] NanowirePath gen_meander(double area_side, double width, double pitch);

/// Tiling of Peano curve cells (order 1 or 2) over a square region.
/// floor(area_side / (3^order * pitch)) cells per side; cells are chained into
/// a single self-avoiding path with margin connectors. With `arced`, every
/// 90-degree corner is replaced by a tangent circular arc of radius
/// arc_radius_frac * pitch; at 0.5 consecutive corner pairs merge into
/// semicircular U-turns.
[[nodiscard]] NanowirePath gen_fractal(double area_side, double width, double pitch,
                                       int order, bool arced,
                                       double arc_radius_frac = 0.5);

/// Lattice visit sequence underlying a generated fractal path (pitch units).
/// Exposed for property tests and for topology comparison between the arced
/// and standard variants.
[[nodiscard]] std::vector<std::pair<std::int64_t, std::int64_t>>
peano_lattice(double area_side, double pitch, int order);

/// Path through polyline corners (collinear runs merged). With `arced`,
/// every corner becomes a tangent arc of radius arc_radius_frac * pitch;
/// corners must then be right angles.
[[nodiscard]] NanowirePath path_from_polyline(const std::vector<Vec2>& corners,
                                              double width, double pitch, PathKind kind,
                                              bool arced, double arc_radius_frac = 0.5);

/// Inflate the centerline to a wire polygon of the path's width. Sharp
/// corners get mitered outer joins; arcs are discretized to `chord_tol` nm
/// sagitta. Throws if the result would self-intersect or an arc is tighter
/// than half the width.
[[nodiscard]] PolygonSet inflate(const NanowirePath& path, double chord_tol = 0.5);

/// Deterministic layout serialization (fixed 3-decimal coordinates).
[[nodiscard]] std::string layout_json(const NanowirePath& path);
[[nodiscard]] NanowirePath path_from_layout_json(const std::string& text);

/// Polygon-level layout exchange format:
/// {"unit":"nm","polygons":[[[x,y],...],...]} with fixed 3-decimal numbers.
[[nodiscard]] std::string polygons_to_layout_json(const PolygonSet& polys);
[[nodiscard]] PolygonSet polygons_from_layout_json(const std::string& text);

/// SVG 1.1 rendering of the inflated wire (and centerline, for debugging).
void write_layout_svg(std::ostream& os, const NanowirePath& path,
                      const PolygonSet& polys);

}  // namespace snspd::geom
