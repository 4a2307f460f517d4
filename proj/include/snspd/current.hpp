#pragma once

#include "snspd/geometry.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace snspd::current {

/// Electrical terminal on the wire boundary: the end-cap segment of the
/// inflated wire plus the outward direction current leaves through it.
struct ContactSpec {
    geom::Vec2 a;
    geom::Vec2 b;
    geom::Vec2 outward;
};

/// Terminals at the two open ends of a path.
[[nodiscard]] std::pair<ContactSpec, ContactSpec> end_contacts(const geom::NanowirePath& path);

/// What lies on the far side of a wire-cell face.
enum class Face : std::uint8_t { interior, bank0, bank1, contact };

/// Rasterized wire domain. Cell (ix, iy) spans
/// [origin + (ix, iy) * cell_size, origin + (ix+1, iy+1) * cell_size];
/// faces are stored per cell in the order -x, +x, -y, +y.
struct DomainGrid {
    double cell_size = 0.0;
    double wire_width = 0.0;
    geom::Vec2 origin;
    int nx = 0, ny = 0;
    std::vector<std::uint8_t> mask;
    std::vector<std::array<Face, 4>> faces;
    // Distance from the cell center to the true polygon wall along each face
    // direction. Meaningful for bank faces (raster staircase puts the wall
    // anywhere within one cell, not at the face midpoint); cell_size/2 otherwise.
    std::vector<std::array<double, 4>> wall_dist;

    [[nodiscard]] std::size_t index(int ix, int iy) const {
        return static_cast<std::size_t>(iy) * nx + ix;
    }
    [[nodiscard]] bool wire(int ix, int iy) const {
        return ix >= 0 && ix < nx && iy >= 0 && iy < ny && mask[index(ix, iy)] != 0;
    }
    [[nodiscard]] geom::Vec2 center(int ix, int iy) const {
        return {origin.x + (ix + 0.5) * cell_size, origin.y + (iy + 0.5) * cell_size};
    }
    [[nodiscard]] std::size_t wire_cell_count() const;
};

/// Occupancy by cell-center test on a one-cell-padded grid around the
/// polygons. Verifies 4-connectivity of the wire and classifies every
/// boundary face as one of the two insulating banks or a contact.
/// Requires wire_width / cell_size >= 8.
[[nodiscard]] DomainGrid rasterize(const geom::PolygonSet& polys, double cell_size,
                                   double wire_width, const ContactSpec& inlet,
                                   const ContactSpec& outlet);

/// Stream function and sheet current density per unit total current.
struct FieldGrid {
    double cell_size = 0.0;
    geom::Vec2 origin;
    int nx = 0, ny = 0;
    std::vector<std::uint8_t> mask;
    std::vector<std::array<double, 4>> wall_dist;  // carried from the domain grid
    std::vector<double> psi;                  // dimensionless, 0 outside wire
    std::vector<double> jx, jy, jmag;         // 1/nm, 0 outside wire
    double residual = 0.0;                    // final relative residual
    long iterations = 0;
    std::string method;                       // "sor" or "sor+cg"

    [[nodiscard]] std::size_t index(int ix, int iy) const {
        return static_cast<std::size_t>(iy) * nx + ix;
    }
    [[nodiscard]] bool wire(int ix, int iy) const {
        return ix >= 0 && ix < nx && iy >= 0 && iy < ny && mask[index(ix, iy)] != 0;
    }
};

/// Solve the stream-function Laplace problem: psi = 0 and 1 on the two
/// insulating banks, natural condition at the contacts, then
/// J = (d(psi)/dy, -d(psi)/dx). Red-black SOR with auto-tuned relaxation
/// and a conjugate-gradient fallback; tol must lie in (0, 1e-3].
[[nodiscard]] FieldGrid solve_stream(const DomainGrid& grid, double tol = 1e-8);

struct CrowdingResult {
    double j_peak = 0.0;        // 1/nm, disc-regularized
    double j_uniform = 0.0;     // 1/nm, straight wire of the same width
    double ratio_isw_ic = 0.0;  // j_uniform / j_peak
    geom::Vec2 peak_location;   // nm
};

/// Peak |J| over discs of radius xi centered on boundary-adjacent cells,
/// and the switching-current ratio it implies. xi must be >= cell_size.
/// The default radius is calibrated on the standard-fractal reference
/// geometry, the one most sensitive to this regularization choice.
[[nodiscard]] CrowdingResult crowding(const FieldGrid& field, double width, double xi = 10.0);

/// Representative single-turn unit used for crowding studies: one hairpin
/// period of a meander, or one second-order fractal cell, with straight
/// leads long enough to keep the contacts away from every turn.
[[nodiscard]] geom::NanowirePath crowding_unit(geom::PathKind kind, double width,
                                               double pitch, double arc_radius_frac = 0.5);

struct CrowdingConfig {
    double xi = 10.0;            // nm; disc radius for peak regularization
    double cell_size = 0.0;      // nm; 0 selects width / 10
    double tol = 1e-8;
    double arc_radius_frac = 0.5;
};

/// Full pipeline for one geometry: unit -> inflate -> rasterize -> solve.
[[nodiscard]] CrowdingResult crowding_ratio(geom::PathKind kind, double width, double pitch,
                                            const CrowdingConfig& cfg = {});

struct SweepPoint {
    double fill_factor = 0.0;
    double ratio_isw_ic = 0.0;
    bool ok = false;
    std::string error;
};

/// One crowding solve per fill factor at fixed width. Solver failures are
/// recorded per point and do not abort the sweep.
[[nodiscard]] std::vector<SweepPoint> sweep_fill_factor(geom::PathKind kind,
                                                        const std::vector<double>& ff_list,
                                                        double width,
                                                        const CrowdingConfig& cfg = {});

}  // namespace snspd::current
