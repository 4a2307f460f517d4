#include "snspd/current.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace snspd::current {

namespace {

constexpr double kPi = 3.14159265358979323846;

geom::Vec2 rot90(geom::Vec2 v) { return {-v.y, v.x}; }

constexpr int kDx[4] = {-1, 1, 0, 0};
constexpr int kDy[4] = {0, 0, -1, 1};

/// Compact row storage for the 5-point system A psi = b over wire cells:
/// diag * psi_c - sum(psi_neighbors) = rhs.
struct LinearSystem {
    std::vector<double> diag;
    std::vector<double> rhs;
    std::vector<std::array<std::int32_t, 4>> nb;  // unknown ids, -1 if absent
    std::vector<std::int32_t> cell_of;            // unknown -> grid cell
    std::vector<std::int32_t> color_ids[2];       // red-black partition
};

LinearSystem assemble(const DomainGrid& g) {
    std::vector<std::int32_t> unknown_of(g.mask.size(), -1);
    LinearSystem sys;
    for (int iy = 0; iy < g.ny; ++iy) {
        for (int ix = 0; ix < g.nx; ++ix) {
            std::size_t c = g.index(ix, iy);
            if (!g.mask[c]) continue;
            unknown_of[c] = static_cast<std::int32_t>(sys.cell_of.size());
            sys.cell_of.push_back(static_cast<std::int32_t>(c));
        }
    }
    std::size_t n = sys.cell_of.size();
    sys.diag.assign(n, 0.0);
    sys.rhs.assign(n, 0.0);
    sys.nb.assign(n, {-1, -1, -1, -1});
    for (std::size_t u = 0; u < n; ++u) {
        std::int32_t c = sys.cell_of[u];
        int ix = static_cast<int>(c % g.nx);
        int iy = static_cast<int>(c / g.nx);
        for (int k = 0; k < 4; ++k) {
            // Finite-volume face fluxes: unit coefficient between cell
            // centers, h/d for a Dirichlet wall a distance d from the center
            // (the raster staircase rarely puts the wall at the face midpoint),
            // zero flux through a contact. Keeps the matrix symmetric.
            double w = g.cell_size / g.wall_dist[c][k];
            switch (g.faces[c][k]) {
                case Face::interior:
                    sys.nb[u][k] = unknown_of[g.index(ix + kDx[k], iy + kDy[k])];
                    sys.diag[u] += 1.0;
                    break;
                case Face::bank0:
                    sys.diag[u] += w;
                    break;
                case Face::bank1:
                    sys.diag[u] += w;
                    sys.rhs[u] += w;
                    break;
                case Face::contact:
                    break;
            }
        }
        sys.color_ids[(ix + iy) & 1].push_back(static_cast<std::int32_t>(u));
    }
    return sys;
}

double l2_norm(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
}

double residual_norm(const LinearSystem& sys, const std::vector<double>& psi) {
    double acc = 0.0;
    for (std::size_t u = 0; u < psi.size(); ++u) {
        double sum = 0.0;
        for (std::int32_t j : sys.nb[u])
            if (j >= 0) sum += psi[j];
        double r = sys.rhs[u] + sum - sys.diag[u] * psi[u];
        acc += r * r;
    }
    return std::sqrt(acc);
}

void sor_sweep(const LinearSystem& sys, std::vector<double>& psi, double omega) {
    for (const auto& ids : sys.color_ids) {
        for (std::int32_t u : ids) {
            double sum = 0.0;
            for (std::int32_t j : sys.nb[u])
                if (j >= 0) sum += psi[j];
            double gs = (sys.rhs[u] + sum) / sys.diag[u];
            psi[u] += omega * (gs - psi[u]);
        }
    }
}

void apply_matrix(const LinearSystem& sys, const std::vector<double>& x,
                  std::vector<double>& y) {
    for (std::size_t u = 0; u < x.size(); ++u) {
        double sum = 0.0;
        for (std::int32_t j : sys.nb[u])
            if (j >= 0) sum += x[j];
        y[u] = sys.diag[u] * x[u] - sum;
    }
}

/// Jacobi-preconditioned conjugate gradient, warm-started from psi.
bool conjugate_gradient(const LinearSystem& sys, std::vector<double>& psi,
                        double tol_abs, long cap, long& used) {
    std::size_t n = psi.size();
    std::vector<double> r(n), z(n), p(n), ap(n);
    apply_matrix(sys, psi, ap);
    for (std::size_t u = 0; u < n; ++u) r[u] = sys.rhs[u] - ap[u];
    for (std::size_t u = 0; u < n; ++u) z[u] = r[u] / sys.diag[u];
    p = z;
    double rz = 0.0;
    for (std::size_t u = 0; u < n; ++u) rz += r[u] * z[u];
    for (used = 0; used < cap; ++used) {
        if (l2_norm(r) <= tol_abs) return true;
        apply_matrix(sys, p, ap);
        double pap = 0.0;
        for (std::size_t u = 0; u < n; ++u) pap += p[u] * ap[u];
        if (pap <= 0.0) return false;
        double alpha = rz / pap;
        for (std::size_t u = 0; u < n; ++u) psi[u] += alpha * p[u];
        for (std::size_t u = 0; u < n; ++u) r[u] -= alpha * ap[u];
        for (std::size_t u = 0; u < n; ++u) z[u] = r[u] / sys.diag[u];
        double rz_next = 0.0;
        for (std::size_t u = 0; u < n; ++u) rz_next += r[u] * z[u];
        double beta = rz_next / rz;
        rz = rz_next;
        for (std::size_t u = 0; u < n; ++u) p[u] = z[u] + beta * p[u];
    }
    return l2_norm(r) <= tol_abs;
}

double wall_value(Face f) { return f == Face::bank1 ? 1.0 : 0.0; }

/// One-dimensional derivative of psi at a wire cell, from the quadratic
/// through the samples at distances a (left) and b (right); insulating walls
/// carry known values at their true distance. Contacts contribute no sample,
/// so the stencil falls back to one-sided differences there.
double psi_derivative(const DomainGrid& g, const std::vector<double>& psi_grid,
                      int ix, int iy, int axis) {
    double h = g.cell_size;
    std::size_t c = g.index(ix, iy);
    Face fl = g.faces[c][axis * 2];
    Face fr = g.faces[c][axis * 2 + 1];
    double pc = psi_grid[c];
    double pl = 0.0, pr = 0.0, a = h, b = h;
    if (fl == Face::interior) {
        pl = psi_grid[g.index(ix - (axis == 0), iy - (axis == 1))];
    } else {
        pl = wall_value(fl);
        a = g.wall_dist[c][axis * 2];
    }
    if (fr == Face::interior) {
        pr = psi_grid[g.index(ix + (axis == 0), iy + (axis == 1))];
    } else {
        pr = wall_value(fr);
        b = g.wall_dist[c][axis * 2 + 1];
    }

    bool cl = fl == Face::contact, cr = fr == Face::contact;
    if (cl && cr) return 0.0;
    if (cl) return (pr - pc) / (fr == Face::interior ? h : b);
    if (cr) return (pc - pl) / (fl == Face::interior ? h : a);
    return -pl * b / (a * (a + b)) + pc * (b - a) / (a * b) + pr * a / (b * (a + b));
}

}  // namespace

std::size_t DomainGrid::wire_cell_count() const {
    std::size_t n = 0;
    for (std::uint8_t m : mask) n += m;
    return n;
}

std::pair<ContactSpec, ContactSpec> end_contacts(const geom::NanowirePath& path) {
    path.validate();
    auto cap = [&path](geom::Vec2 p, geom::Vec2 out) {
        geom::Vec2 n = rot90(out);
        return ContactSpec{p + (path.width / 2.0) * n, p - (path.width / 2.0) * n, out};
    };
    return {cap(path.start(), -1.0 * path.start_dir()), cap(path.end(), path.end_dir())};
}

DomainGrid rasterize(const geom::PolygonSet& polys, double cell_size, double wire_width,
                     const ContactSpec& inlet, const ContactSpec& outlet) {
    if (cell_size <= 0.0) throw std::invalid_argument("cell size must be positive");
    if (wire_width <= 0.0) throw std::invalid_argument("wire width must be positive");
    if (wire_width / cell_size < 8.0 - 1e-9)
        throw std::invalid_argument(
            "cell size too coarse: need at least 8 cells across the wire width");
    if (polys.rings.empty()) throw std::invalid_argument("empty polygon set");

    geom::Rect bb = polys.bounding_box();
    DomainGrid g;
    g.cell_size = cell_size;
    g.wire_width = wire_width;
    g.origin = {bb.x0 - cell_size, bb.y0 - cell_size};
    g.nx = static_cast<int>(std::ceil(bb.width() / cell_size)) + 2;
    g.ny = static_cast<int>(std::ceil(bb.height() / cell_size)) + 2;
    g.mask.assign(static_cast<std::size_t>(g.nx) * g.ny, 0);

    // Scanline occupancy at cell-center rows, even-odd rule. The crossing
    // positions double as the exact wall locations along each axis, kept for
    // the per-face wall distances below.
    std::vector<std::vector<double>> row_cross(g.ny), col_cross(g.nx);
    for (int iy = 0; iy < g.ny; ++iy) {
        double y = g.origin.y + (iy + 0.5) * cell_size;
        auto& xs = row_cross[iy];
        for (const auto& ring : polys.rings) {
            const auto& v = ring.pts;
            for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
                if ((v[i].y > y) == (v[j].y > y)) continue;
                xs.push_back(v[j].x +
                             (y - v[j].y) / (v[i].y - v[j].y) * (v[i].x - v[j].x));
            }
        }
        std::sort(xs.begin(), xs.end());
        for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
            int ix0 = static_cast<int>(std::floor((xs[k] - g.origin.x) / cell_size - 0.5)) + 1;
            int ix1 = static_cast<int>(std::ceil((xs[k + 1] - g.origin.x) / cell_size - 0.5)) - 1;
            ix0 = std::max(ix0, 0);
            ix1 = std::min(ix1, g.nx - 1);
            for (int ix = ix0; ix <= ix1; ++ix) g.mask[g.index(ix, iy)] = 1;
        }
    }
    for (int ix = 0; ix < g.nx; ++ix) {
        double x = g.origin.x + (ix + 0.5) * cell_size;
        auto& ys = col_cross[ix];
        for (const auto& ring : polys.rings) {
            const auto& v = ring.pts;
            for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
                if ((v[i].x > x) == (v[j].x > x)) continue;
                ys.push_back(v[j].y +
                             (x - v[j].x) / (v[i].x - v[j].x) * (v[i].y - v[j].y));
            }
        }
        std::sort(ys.begin(), ys.end());
    }

    std::size_t wire_cells = g.wire_cell_count();
    if (wire_cells == 0) throw std::runtime_error("rasterization produced no wire cells");

    // 4-connectivity check.
    std::vector<std::int32_t> stack;
    std::vector<std::uint8_t> seen(g.mask.size(), 0);
    for (std::size_t c = 0; c < g.mask.size(); ++c) {
        if (g.mask[c]) {
            stack.push_back(static_cast<std::int32_t>(c));
            seen[c] = 1;
            break;
        }
    }
    std::size_t reached = 0;
    while (!stack.empty()) {
        std::int32_t c = stack.back();
        stack.pop_back();
        ++reached;
        int ix = static_cast<int>(c % g.nx);
        int iy = static_cast<int>(c / g.nx);
        for (int k = 0; k < 4; ++k) {
            int jx = ix + kDx[k], jy = iy + kDy[k];
            if (!g.wire(jx, jy)) continue;
            std::size_t n = g.index(jx, jy);
            if (!seen[n]) {
                seen[n] = 1;
                stack.push_back(static_cast<std::int32_t>(n));
            }
        }
    }
    if (reached != wire_cells)
        throw std::runtime_error("wire raster is disconnected between the contacts");

    // Boundary face classification: contact if the face midpoint lies on a
    // terminal cap (within resolution) and faces the same way.
    const ContactSpec* specs[2] = {&inlet, &outlet};
    auto contact_id = [&](geom::Vec2 m, geom::Vec2 nrm) -> int {
        for (int s = 0; s < 2; ++s) {
            geom::Vec2 t = specs[s]->b - specs[s]->a;
            double len = geom::norm(t);
            if (len < 1e-12) continue;
            t = (1.0 / len) * t;
            geom::Vec2 d = m - specs[s]->a;
            double along = geom::dot(d, t);
            double off = std::abs(geom::cross(t, d));
            if (off <= 0.75 * cell_size && along >= -cell_size && along <= len + cell_size &&
                geom::dot(nrm, specs[s]->outward) > 0.5)
                return s;
        }
        return -1;
    };

    g.faces.assign(g.mask.size(), {Face::interior, Face::interior, Face::interior,
                                   Face::interior});
    g.wall_dist.assign(g.mask.size(),
                       {cell_size / 2.0, cell_size / 2.0, cell_size / 2.0, cell_size / 2.0});
    // Nearest polygon crossing from the cell center heading out through face
    // k, from the stored scanline crossings of the center row/column.
    auto wall_distance = [&](int ix, int iy, int k) {
        const std::vector<double>& line = k < 2 ? row_cross[iy] : col_cross[ix];
        geom::Vec2 ctr = g.center(ix, iy);
        double c0 = k < 2 ? ctr.x : ctr.y;
        double d = cell_size / 2.0;
        if (kDx[k] + kDy[k] < 0) {
            auto it = std::lower_bound(line.begin(), line.end(), c0);
            if (it != line.begin()) d = c0 - *std::prev(it);
        } else {
            auto it = std::upper_bound(line.begin(), line.end(), c0);
            if (it != line.end()) d = *it - c0;
        }
        // A wall face always has its crossing within one cell; anything else
        // is a degenerate sliver, so fall back to the face midpoint.
        if (!(d > 0.0) || d > cell_size) d = cell_size / 2.0;
        return std::max(d, 0.05 * cell_size);
    };
    struct BoundaryFace {
        std::int32_t cell;
        std::int8_t dir;
    };
    std::vector<BoundaryFace> insulating;
    int contact_faces[2] = {0, 0};
    for (int iy = 0; iy < g.ny; ++iy) {
        for (int ix = 0; ix < g.nx; ++ix) {
            std::size_t c = g.index(ix, iy);
            if (!g.mask[c]) continue;
            geom::Vec2 ctr = g.center(ix, iy);
            for (int k = 0; k < 4; ++k) {
                if (g.wire(ix + kDx[k], iy + kDy[k])) continue;
                geom::Vec2 nrm{static_cast<double>(kDx[k]), static_cast<double>(kDy[k])};
                geom::Vec2 mid = ctr + (cell_size / 2.0) * nrm;
                int s = contact_id(mid, nrm);
                if (s >= 0) {
                    g.faces[c][k] = Face::contact;
                    ++contact_faces[s];
                } else {
                    g.faces[c][k] = Face::bank0;  // provisional; banks split below
                    g.wall_dist[c][k] = wall_distance(ix, iy, k);
                    insulating.push_back({static_cast<std::int32_t>(c),
                                          static_cast<std::int8_t>(k)});
                }
            }
        }
    }
    if (contact_faces[0] == 0) throw std::runtime_error("inlet does not touch the wire boundary");
    if (contact_faces[1] == 0) throw std::runtime_error("outlet does not touch the wire boundary");

    // Split the insulating boundary into connected banks by walking shared
    // grid corners; the two contacts must leave exactly two of them.
    auto face_corners = [&g](const BoundaryFace& f) -> std::pair<std::int64_t, std::int64_t> {
        int ix = static_cast<int>(f.cell % g.nx);
        int iy = static_cast<int>(f.cell / g.nx);
        std::int64_t stride = g.nx + 1;
        auto corner = [stride](int cx, int cy) { return cy * stride + cx; };
        switch (f.dir) {
            case 0: return {corner(ix, iy), corner(ix, iy + 1)};
            case 1: return {corner(ix + 1, iy), corner(ix + 1, iy + 1)};
            case 2: return {corner(ix, iy), corner(ix + 1, iy)};
            default: return {corner(ix, iy + 1), corner(ix + 1, iy + 1)};
        }
    };
    std::unordered_map<std::int64_t, std::vector<std::int32_t>> at_corner;
    at_corner.reserve(insulating.size() * 2);
    for (std::size_t e = 0; e < insulating.size(); ++e) {
        auto [c0, c1] = face_corners(insulating[e]);
        at_corner[c0].push_back(static_cast<std::int32_t>(e));
        at_corner[c1].push_back(static_cast<std::int32_t>(e));
    }
    std::vector<std::int8_t> bank(insulating.size(), -1);
    int banks_found = 0;
    for (std::size_t seed = 0; seed < insulating.size(); ++seed) {
        if (bank[seed] >= 0) continue;
        if (banks_found == 2)
            throw std::runtime_error(
                "insulating boundary splits into more than two banks; check the contacts");
        std::vector<std::int32_t> todo{static_cast<std::int32_t>(seed)};
        bank[seed] = static_cast<std::int8_t>(banks_found);
        while (!todo.empty()) {
            std::int32_t e = todo.back();
            todo.pop_back();
            auto [c0, c1] = face_corners(insulating[e]);
            for (std::int64_t corner : {c0, c1}) {
                for (std::int32_t other : at_corner[corner]) {
                    if (bank[other] < 0) {
                        bank[other] = bank[e];
                        todo.push_back(other);
                    }
                }
            }
        }
        ++banks_found;
    }
    if (banks_found != 2)
        throw std::runtime_error("insulating boundary forms a single bank; contacts too close");
    for (std::size_t e = 0; e < insulating.size(); ++e)
        g.faces[insulating[e].cell][insulating[e].dir] =
            bank[e] == 0 ? Face::bank0 : Face::bank1;

    return g;
}

FieldGrid solve_stream(const DomainGrid& grid, double tol) {
    if (!(tol > 0.0 && tol <= 1e-3))
        throw std::invalid_argument("tol must lie in (0, 1e-3]");
    LinearSystem sys = assemble(grid);
    std::size_t n = sys.cell_of.size();
    if (n == 0) throw std::invalid_argument("grid has no wire cells");

    double bnorm = l2_norm(sys.rhs);
    if (bnorm <= 0.0) throw std::runtime_error("no driven bank; cannot normalize current");

    // Relaxation factor from the transverse Dirichlet spacing: across the
    // width the solution is pinned every (width / cell) cells, which sets
    // the Jacobi spectral radius regardless of how long the wire snakes.
    int nw = std::max(2, static_cast<int>(std::lround(grid.wire_width / grid.cell_size)));
    double rho_j = 0.5 * (1.0 + std::cos(kPi / (nw + 1)));
    double omega = 2.0 / (1.0 + std::sqrt(1.0 - rho_j * rho_j));
    omega = std::clamp(omega, 1.0, 1.95);

    std::vector<double> psi(n, 0.5);
    const long cap = 200L * std::max(grid.nx, grid.ny);
    const int check = 50;
    std::vector<double> history;
    double prev = -1.0;
    bool converged = false;
    long sweeps = 0;
    while (sweeps < cap) {
        sor_sweep(sys, psi, omega);
        ++sweeps;
        if (sweeps % check != 0) continue;
        double res = residual_norm(sys, psi);
        history.push_back(res);
        if (res / bnorm <= tol) {
            converged = true;
            break;
        }
        if (prev > 0.0 && res > 0.0 && res < prev) {
            // Young's update: infer the Jacobi radius from the measured
            // contraction and retune omega toward its optimum.
            double mu = std::pow(res / prev, 1.0 / check);
            if (mu > omega - 1.0 + 1e-6 && mu < 1.0) {
                double num = mu + omega - 1.0;
                double rho2 = num * num / (omega * omega * mu);
                if (rho2 < 1.0)
                    omega = std::clamp(2.0 / (1.0 + std::sqrt(1.0 - rho2)), 1.0, 1.95);
            }
        }
        prev = res;
    }

    std::string method = "sor";
    long cg_used = 0;
    if (!converged) {
        method = "sor+cg";
        converged = conjugate_gradient(sys, psi, tol * bnorm, cap, cg_used);
    }
    double final_res = residual_norm(sys, psi) / bnorm;
    if (!converged) {
        std::string msg = "stream solver did not converge: relative residual " +
                          std::to_string(final_res) + " after " + std::to_string(sweeps) +
                          " SOR sweeps and " + std::to_string(cg_used) +
                          " CG iterations; residual history:";
        for (std::size_t i = 0; i < history.size();
             i += std::max<std::size_t>(1, history.size() / 8))
            msg += " " + std::to_string(history[i] / bnorm);
        throw std::runtime_error(msg);
    }

    FieldGrid f;
    f.cell_size = grid.cell_size;
    f.origin = grid.origin;
    f.nx = grid.nx;
    f.ny = grid.ny;
    f.mask = grid.mask;
    f.wall_dist = grid.wall_dist;
    f.residual = final_res;
    f.iterations = sweeps + cg_used;
    f.method = method;
    f.psi.assign(grid.mask.size(), 0.0);
    for (std::size_t u = 0; u < n; ++u) f.psi[sys.cell_of[u]] = psi[u];

    f.jx.assign(grid.mask.size(), 0.0);
    f.jy.assign(grid.mask.size(), 0.0);
    f.jmag.assign(grid.mask.size(), 0.0);
    for (int iy = 0; iy < grid.ny; ++iy) {
        for (int ix = 0; ix < grid.nx; ++ix) {
            std::size_t c = grid.index(ix, iy);
            if (!grid.mask[c]) continue;
            double dpdx = psi_derivative(grid, f.psi, ix, iy, 0);
            double dpdy = psi_derivative(grid, f.psi, ix, iy, 1);
            f.jx[c] = dpdy;
            f.jy[c] = -dpdx;
            f.jmag[c] = std::hypot(f.jx[c], f.jy[c]);
        }
    }
    return f;
}

namespace {

/// Bilinear |J| at an arbitrary point, built from the four surrounding cell
/// centers with non-wire corners masked out. Returns false outside the wire.
bool jmag_at(const FieldGrid& f, geom::Vec2 p, double& out) {
    double gx = (p.x - f.origin.x) / f.cell_size - 0.5;
    double gy = (p.y - f.origin.y) / f.cell_size - 0.5;
    int i0 = static_cast<int>(std::floor(gx));
    int j0 = static_cast<int>(std::floor(gy));
    double fx = gx - i0, fy = gy - j0;
    double wsum = 0.0, vsum = 0.0;
    for (int dj = 0; dj <= 1; ++dj) {
        for (int di = 0; di <= 1; ++di) {
            if (!f.wire(i0 + di, j0 + dj)) continue;
            double w = (di ? fx : 1.0 - fx) * (dj ? fy : 1.0 - fy);
            wsum += w;
            vsum += w * f.jmag[f.index(i0 + di, j0 + dj)];
        }
    }
    if (wsum < 1e-12) return false;
    out = vsum / wsum;
    return true;
}

}  // namespace

CrowdingResult crowding(const FieldGrid& field, double width, double xi) {
    if (width <= 0.0) throw std::invalid_argument("width must be positive");
    if (xi < field.cell_size)
        throw std::invalid_argument("regularization radius smaller than one cell");

    // Area samples of the xi-disc on a sub-cell lattice; the average is the
    // continuum disc integral of interpolated |J| clipped to the wire, so it
    // no longer depends on how the disc happens to straddle whole cells.
    double step = field.cell_size / 4.0;
    int m = static_cast<int>(std::ceil(xi / step));
    std::vector<geom::Vec2> samples;
    for (int dy = -m; dy <= m; ++dy)
        for (int dx = -m; dx <= m; ++dx)
            if ((static_cast<double>(dx) * dx + static_cast<double>(dy) * dy) * step * step <=
                xi * xi * (1.0 + 1e-12))
                samples.push_back({dx * step, dy * step});

    CrowdingResult out;
    out.j_uniform = 1.0 / width;
    geom::Vec2 best{0.0, 0.0};
    bool found = false;
    double h = field.cell_size;
    for (int iy = 0; iy < field.ny; ++iy) {
        for (int ix = 0; ix < field.nx; ++ix) {
            if (!field.wire(ix, iy)) continue;
            bool boundary = !field.wire(ix - 1, iy) || !field.wire(ix + 1, iy) ||
                            !field.wire(ix, iy - 1) || !field.wire(ix, iy + 1);
            if (!boundary) continue;
            // Anchor the disc half a cell inside the true wall, not at the
            // raw cell center: the staircase puts centers anywhere within a
            // cell of the wall, and the peak must not depend on that phase.
            geom::Vec2 ctr{field.origin.x + (ix + 0.5) * h,
                           field.origin.y + (iy + 0.5) * h};
            const auto& wd = field.wall_dist[field.index(ix, iy)];
            if (!field.wire(ix - 1, iy) && field.wire(ix + 1, iy)) ctr.x -= wd[0] - h / 2.0;
            if (!field.wire(ix + 1, iy) && field.wire(ix - 1, iy)) ctr.x += wd[1] - h / 2.0;
            if (!field.wire(ix, iy - 1) && field.wire(ix, iy + 1)) ctr.y -= wd[2] - h / 2.0;
            if (!field.wire(ix, iy + 1) && field.wire(ix, iy - 1)) ctr.y += wd[3] - h / 2.0;
            double sum = 0.0;
            int cnt = 0;
            for (const auto& off : samples) {
                double j;
                if (!jmag_at(field, ctr + off, j)) continue;
                sum += j;
                ++cnt;
            }
            if (cnt == 0) continue;
            double avg = sum / cnt;
            if (avg > out.j_peak) {
                out.j_peak = avg;
                best = ctr;
                found = true;
            }
        }
    }
    if (!found) throw std::runtime_error("no boundary-adjacent wire cells found");
    out.peak_location = best;
    // The patterned wire cannot carry more than the straight-wire critical
    // current, so the ratio is capped at 1.
    out.ratio_isw_ic = std::min(1.0, out.j_uniform / out.j_peak);
    return out;
}

geom::NanowirePath crowding_unit(geom::PathKind kind, double width, double pitch,
                                 double arc_radius_frac) {
    if (width <= 0.0 || pitch <= width)
        throw std::invalid_argument("need 0 < width < pitch");
    double lead = std::max(4.0 * pitch, 10.0 * width);

    if (kind == geom::PathKind::meander) {
        double r = pitch / 2.0;
        double top = lead + r;
        geom::NanowirePath path;
        path.width = width;
        path.pitch = pitch;
        path.kind = kind;
        geom::PathSegment down;
        down.a = {0.0, top};
        down.b = {0.0, r};
        geom::PathSegment turn;
        turn.kind = geom::PathSegment::Kind::arc;
        turn.a = {0.0, r};
        turn.b = {pitch, r};
        turn.center = {r, r};
        turn.ccw = true;
        geom::PathSegment up;
        up.a = {pitch, r};
        up.b = {pitch, top};
        path.segments = {down, turn, up};
        path.validate();
        return path;
    }

    auto lat = geom::peano_lattice(9.0 * pitch, pitch, 2);
    std::vector<geom::Vec2> corners;
    corners.reserve(lat.size() + 2);
    corners.push_back({0.0, -lead});
    for (auto [x, y] : lat)
        corners.push_back({static_cast<double>(x) * pitch, static_cast<double>(y) * pitch});
    corners.push_back({8.0 * pitch, 8.0 * pitch + lead});
    return geom::path_from_polyline(corners, width, pitch, kind,
                                    kind == geom::PathKind::arced_fractal, arc_radius_frac);
}

CrowdingResult crowding_ratio(geom::PathKind kind, double width, double pitch,
                              const CrowdingConfig& cfg) {
    auto path = crowding_unit(kind, width, pitch, cfg.arc_radius_frac);
    double h = cfg.cell_size > 0.0 ? cfg.cell_size : width / 10.0;
    auto polys = geom::inflate(path, std::min(0.5, h / 4.0));
    auto [inlet, outlet] = end_contacts(path);
    auto grid = rasterize(polys, h, width, inlet, outlet);
    auto field = solve_stream(grid, cfg.tol);
    return crowding(field, width, cfg.xi);
}

std::vector<SweepPoint> sweep_fill_factor(geom::PathKind kind,
                                          const std::vector<double>& ff_list, double width,
                                          const CrowdingConfig& cfg) {
    for (double ff : ff_list)
        if (!(ff > 0.05 && ff < 0.8))
            throw std::invalid_argument("fill factors must lie in (0.05, 0.8)");
    std::vector<SweepPoint> out;
    out.reserve(ff_list.size());
    for (double ff : ff_list) {
        SweepPoint p;
        p.fill_factor = ff;
        try {
            p.ratio_isw_ic = crowding_ratio(kind, width, width / ff, cfg).ratio_isw_ic;
            p.ok = true;
        } catch (const std::exception& e) {
            p.error = e.what();
        }
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace snspd::current
