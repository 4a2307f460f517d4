#include "snspd/optics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace snspd::optics {

std::string to_string(Polarization p) { return p == Polarization::te ? "TE" : "TM"; }

EmtResult emt_indices(double fill_factor, cdouble eps_metal, cdouble eps_host) {
    if (!(fill_factor >= 0.0) || !(fill_factor <= 1.0))
        throw std::invalid_argument("fill factor must lie in [0, 1]");
    EmtResult r;
    r.eps_parallel = fill_factor * eps_metal + (1.0 - fill_factor) * eps_host;
    r.eps_perpendicular = 1.0 / (fill_factor / eps_metal + (1.0 - fill_factor) / eps_host);
    return r;
}

namespace {

/// Complex index with the sign convention used internally: forward waves go
/// as exp(-i beta z), so absorption means a negative imaginary part.
cdouble internal_index(cdouble nk) { return {nk.real(), -nk.imag()}; }

cdouble index_from_eps(cdouble eps) {
    // Public convention: eps = (n + i k)^2 with k >= 0.
    cdouble nk = std::sqrt(eps);
    if (nk.real() < 0.0) nk = -nk;
    return nk;
}

struct ResolvedStack {
    cdouble n0;                   // incidence medium
    cdouble nsub;                 // substrate
    std::vector<cdouble> n;       // one per layer
    std::vector<double> d;        // nm
    int grating_index = -1;
};

ResolvedStack resolve(const LayerStack& stack, double wl, const MaterialLib& lib) {
    auto lookup = [&](const std::string& name) -> cdouble {
        auto it = lib.find(name);
        if (it == lib.end()) throw std::invalid_argument("unknown material '" + name + "'");
        return it->second.index_at(wl);
    };
    ResolvedStack r;
    r.n0 = internal_index(lookup(stack.incidence));
    if (r.n0.imag() != 0.0)
        throw std::invalid_argument("incidence medium must be transparent");
    r.nsub = internal_index(lookup(stack.substrate));
    for (const auto& layer : stack.layers) {
        if (layer.thickness < 0.0) throw std::invalid_argument("layer thickness must be >= 0");
        cdouble nk;
        if (layer.grating) {
            if (r.grating_index >= 0)
                throw std::invalid_argument("at most one grating layer per stack");
            r.grating_index = static_cast<int>(r.n.size());
            const auto& g = *layer.grating;
            cdouble nm = lookup(g.metal), nh = lookup(g.host);
            auto emt = emt_indices(g.fill_factor, nm * nm, nh * nh);
            cdouble eps;
            switch (g.orientation) {
                case GratingModel::parallel: eps = emt.eps_parallel; break;
                case GratingModel::perpendicular: eps = emt.eps_perpendicular; break;
                case GratingModel::isotropic:
                    eps = 0.5 * (emt.eps_parallel + emt.eps_perpendicular);
                    break;
            }
            nk = index_from_eps(eps);
        } else {
            nk = lookup(layer.material);
        }
        r.n.push_back(internal_index(nk));
        r.d.push_back(layer.thickness);
    }
    return r;
}

/// cos(theta) in a medium from Snell's law, branch chosen so that forward
/// waves decay (Im(n cos) <= 0; for the lossless propagating case Re >= 0).
cdouble snell_cos(cdouble n, cdouble n0_sin) {
    cdouble s = n0_sin / n;
    cdouble c = std::sqrt(1.0 - s * s);
    cdouble prod = n * c;
    if (prod.imag() > 1e-14 || (std::abs(prod.imag()) <= 1e-14 && prod.real() < 0.0)) c = -c;
    return c;
}

cdouble admittance(cdouble n, cdouble cos_t, Polarization pol) {
    return pol == Polarization::te ? n * cos_t : n / cos_t;
}

struct Planes {
    // Tangential-field flux at the left edge of each medium 1..N, then the
    // substrate plane, all normalized to a unit forward amplitude at entry;
    // plus the total amplitude reflectance.
    std::vector<double> flux;  // size N + 1
    cdouble r_amp;
};

/// Characteristic-matrix pass: back-propagate (E, H) from the substrate.
Planes matrix_pass(const std::vector<cdouble>& eta, const std::vector<cdouble>& delta,
                   cdouble eta0, cdouble eta_sub) {
    std::size_t nl = eta.size();
    std::vector<cdouble> ve(nl + 1), vh(nl + 1);
    ve[nl] = 1.0;
    vh[nl] = eta_sub;
    for (std::size_t j = nl; j-- > 0;) {
        cdouble cd = std::cos(delta[j]), sd = std::sin(delta[j]);
        ve[j] = cd * ve[j + 1] + cdouble(0, 1) * sd / eta[j] * vh[j + 1];
        vh[j] = cdouble(0, 1) * eta[j] * sd * ve[j + 1] + cd * vh[j + 1];
    }
    cdouble e_inc = 0.5 * (ve[0] + vh[0] / eta0);
    cdouble e_ref = 0.5 * (ve[0] - vh[0] / eta0);
    double p_inc = eta0.real() * std::norm(e_inc);
    Planes out;
    out.r_amp = e_ref / e_inc;
    out.flux.resize(nl + 1);
    for (std::size_t j = 0; j <= nl; ++j)
        out.flux[j] = (ve[j] * std::conj(vh[j])).real() / p_inc;
    return out;
}

struct SMat {
    cdouble tf{1.0}, rf{0.0}, tb{1.0}, rb{0.0};
};

SMat star(const SMat& a, const SMat& b) {
    cdouble den = 1.0 - a.rb * b.rf;
    SMat s;
    s.tf = b.tf * a.tf / den;
    s.rf = a.rf + a.tb * b.rf * a.tf / den;
    s.rb = b.rb + b.tf * a.rb * b.tb / den;
    s.tb = a.tb * b.tb / den;
    return s;
}

SMat interface_s(cdouble eta_i, cdouble eta_j) {
    SMat s;
    cdouble den = eta_i + eta_j;
    s.rf = (eta_i - eta_j) / den;
    s.tf = 2.0 * eta_i / den;
    s.rb = -s.rf;
    s.tb = 2.0 * eta_j / den;
    return s;
}

SMat prop_s(cdouble delta) {
    SMat s;
    cdouble p = std::exp(cdouble(0, -1) * delta);  // |p| <= 1 for absorbing media
    s.tf = p;
    s.tb = p;
    return s;
}

struct Amplitudes {
    std::vector<cdouble> a, b;  // at the left edge of media 1..N+1
    cdouble r_amp;
};

/// Scattering-matrix pass: unconditionally stable amplitude reconstruction.
Amplitudes smatrix_pass(const std::vector<cdouble>& eta, const std::vector<cdouble>& delta,
                        cdouble eta0, cdouble eta_sub) {
    std::size_t nl = eta.size();
    // Media 0..nl+1; eta_of(m) gives the admittance of medium m.
    auto eta_of = [&](std::size_t m) { return m == 0 ? eta0 : (m <= nl ? eta[m - 1] : eta_sub); };
    // Prefix: from the entry plane up to the left edge of medium m.
    std::vector<SMat> pre(nl + 2);
    pre[1] = interface_s(eta_of(0), eta_of(1));
    for (std::size_t m = 2; m <= nl + 1; ++m)
        pre[m] = star(star(pre[m - 1], prop_s(delta[m - 2])), interface_s(eta_of(m - 1), eta_of(m)));
    // Suffix: from the left edge of medium m to the substrate.
    std::vector<SMat> suf(nl + 2);
    suf[nl + 1] = SMat{};
    for (std::size_t m = nl; m >= 1; --m)
        suf[m] = star(star(prop_s(delta[m - 1]), interface_s(eta_of(m), eta_of(m + 1))), suf[m + 1]);
    Amplitudes out;
    out.a.resize(nl + 2);
    out.b.resize(nl + 2);
    for (std::size_t m = 1; m <= nl + 1; ++m) {
        cdouble den = 1.0 - pre[m].rb * suf[m].rf;
        out.a[m] = pre[m].tf / den;
        out.b[m] = suf[m].rf * out.a[m];
    }
    out.r_amp = pre[nl + 1].rf;  // pre[nl+1] spans the whole chain
    return out;
}

Planes smatrix_planes(const std::vector<cdouble>& eta, const std::vector<cdouble>& delta,
                      cdouble eta0, cdouble eta_sub) {
    auto amp = smatrix_pass(eta, delta, eta0, eta_sub);
    std::size_t nl = eta.size();
    Planes out;
    out.r_amp = amp.r_amp;
    out.flux.resize(nl + 1);
    double p_inc = eta0.real();  // unit forward amplitude
    for (std::size_t m = 1; m <= nl + 1; ++m) {
        cdouble e = amp.a[m] + amp.b[m];
        cdouble h = (m <= nl ? eta[m - 1] : eta_sub) * (amp.a[m] - amp.b[m]);
        out.flux[m - 1] = (e * std::conj(h)).real() / p_inc;
    }
    return out;
}

}  // namespace

TmmResult tmm(const LayerStack& stack, double wavelength_nm, Polarization pol, double aoi_rad,
              const MaterialLib& lib, TmmMethod method) {
    if (!(wavelength_nm > 0.0)) throw std::invalid_argument("wavelength must be positive");
    if (!(aoi_rad >= 0.0) || !(aoi_rad < M_PI / 2.0))
        throw std::invalid_argument("angle of incidence must lie in [0, pi/2)");
    auto rs = resolve(stack, wavelength_nm, lib);

    cdouble n0_sin = rs.n0 * std::sin(aoi_rad);
    cdouble cos0 = snell_cos(rs.n0, n0_sin);
    cdouble eta0 = admittance(rs.n0, cos0, pol);
    cdouble eta_sub = admittance(rs.nsub, snell_cos(rs.nsub, n0_sin), pol);

    std::size_t nl = rs.n.size();
    std::vector<cdouble> eta(nl), delta(nl);
    double max_gain = 0.0;
    for (std::size_t j = 0; j < nl; ++j) {
        cdouble c = snell_cos(rs.n[j], n0_sin);
        eta[j] = admittance(rs.n[j], c, pol);
        delta[j] = 2.0 * M_PI * rs.n[j] * c * rs.d[j] / wavelength_nm;
        max_gain = std::max(max_gain, -delta[j].imag());
    }

    bool scatter = method == TmmMethod::scattering ||
                   (method == TmmMethod::automatic && max_gain > std::log(1e8));
    Planes planes = scatter ? smatrix_planes(eta, delta, eta0, eta_sub)
                            : matrix_pass(eta, delta, eta0, eta_sub);

    TmmResult out;
    out.method = scatter ? "scattering" : "matrix";
    out.reflectance = std::norm(planes.r_amp);
    out.transmittance = planes.flux[nl];
    out.layer_absorptance.resize(nl);
    // flux[j] is the net flux entering layer j+1; the drop across each layer
    // is what it absorbed, and the telescoping sum equals A_total exactly.
    for (std::size_t j = 0; j < nl; ++j)
        out.layer_absorptance[j] = planes.flux[j] - planes.flux[j + 1];
    out.absorptance = planes.flux[0] - planes.flux[nl];
    return out;
}

Spectrum device_absorptance(const LayerStack& stack, geom::PathKind kind,
                            const std::vector<double>& wavelengths_nm, const MaterialLib& lib) {
    int gi = -1;
    for (std::size_t j = 0; j < stack.layers.size(); ++j)
        if (stack.layers[j].grating) gi = static_cast<int>(j);
    if (gi < 0) throw std::invalid_argument("device stack needs a wire grating layer");

    LayerStack s = stack;
    auto& grating = *s.layers[gi].grating;

    Spectrum spec;
    for (double wl : wavelengths_nm) {
        if (kind == geom::PathKind::meander) {
            grating.orientation = GratingModel::parallel;
            auto te = tmm(s, wl, Polarization::te, 0.0, lib);
            grating.orientation = GratingModel::perpendicular;
            auto tm = tmm(s, wl, Polarization::tm, 0.0, lib);
            spec.te.push_back({wl, te.reflectance, te.transmittance, te.absorptance,
                               te.layer_absorptance[gi]});
            spec.tm.push_back({wl, tm.reflectance, tm.transmittance, tm.absorptance,
                               tm.layer_absorptance[gi]});
        } else {
            // Wires split equally between two orthogonal in-plane orientations,
            // so at normal incidence every linear polarization sees the same
            // areal average of the two grating responses.  Model the layer with
            // the isotropic permittivity mix, computed once and reused for both
            // polarizations.
            grating.orientation = GratingModel::isotropic;
            auto iso = tmm(s, wl, Polarization::te, 0.0, lib);
            SpectrumPoint p{wl, iso.reflectance, iso.transmittance, iso.absorptance,
                            iso.layer_absorptance[gi]};
            spec.te.push_back(p);
            spec.tm.push_back(p);
        }
    }
    return spec;
}

std::vector<FieldPoint> field_profile(const LayerStack& stack, double wavelength_nm,
                                      const std::vector<double>& z_nm, Polarization pol,
                                      const MaterialLib& lib) {
    for (const auto& layer : stack.layers)
        if (layer.grating)
            throw std::invalid_argument(
                "field profile expects the wire layer replaced by its host material");
    auto rs = resolve(stack, wavelength_nm, lib);
    std::size_t nl = rs.n.size();
    cdouble eta0 = admittance(rs.n0, 1.0, pol);
    cdouble eta_sub = admittance(rs.nsub, 1.0, pol);
    std::vector<cdouble> eta(nl), delta(nl);
    for (std::size_t j = 0; j < nl; ++j) {
        eta[j] = admittance(rs.n[j], 1.0, pol);
        delta[j] = 2.0 * M_PI * rs.n[j] * rs.d[j] / wavelength_nm;
    }
    auto amp = smatrix_pass(eta, delta, eta0, eta_sub);

    std::vector<double> z_left(nl + 1, 0.0);
    for (std::size_t j = 0; j < nl; ++j) z_left[j + 1] = z_left[j] + rs.d[j];
    double z_total = z_left[nl];

    std::vector<FieldPoint> out;
    out.reserve(z_nm.size());
    for (double z : z_nm) {
        cdouble e;
        if (z < 0.0) {
            cdouble ph = 2.0 * M_PI * rs.n0 * z / wavelength_nm;
            e = std::exp(cdouble(0, -1) * ph) + amp.r_amp * std::exp(cdouble(0, 1) * ph);
        } else if (z >= z_total) {
            cdouble ph = 2.0 * M_PI * rs.nsub * (z - z_total) / wavelength_nm;
            e = (amp.a[nl + 1] + amp.b[nl + 1]) * std::exp(cdouble(0, -1) * ph);
        } else {
            std::size_t m = nl;
            for (std::size_t j = 0; j < nl; ++j)
                if (z < z_left[j + 1]) {
                    m = j;
                    break;
                }
            cdouble ph = 2.0 * M_PI * rs.n[m] * (z - z_left[m]) / wavelength_nm;
            e = amp.a[m + 1] * std::exp(cdouble(0, -1) * ph) +
                amp.b[m + 1] * std::exp(cdouble(0, 1) * ph);
        }
        out.push_back({z, std::norm(e)});
    }
    return out;
}

std::vector<RatioPoint> polarization_ratio(const Spectrum& spec) {
    if (spec.te.size() != spec.tm.size())
        throw std::invalid_argument("TE and TM spectra must share one wavelength grid");
    std::vector<RatioPoint> out;
    out.reserve(spec.te.size());
    for (std::size_t i = 0; i < spec.te.size(); ++i) {
        if (spec.te[i].wavelength != spec.tm[i].wavelength)
            throw std::invalid_argument("TE and TM spectra must share one wavelength grid");
        RatioPoint p;
        p.wavelength = spec.te[i].wavelength;
        if (spec.tm[i].wire_absorptance == 0.0) {
            p.defined = false;
            p.ratio = 0.0;
        } else {
            p.ratio = spec.te[i].wire_absorptance / spec.tm[i].wire_absorptance;
        }
        out.push_back(p);
    }
    return out;
}

namespace {

double objective(const OptimizeSpec& spec, const MaterialLib& lib,
                 const std::vector<double>& params, int gi) {
    LayerStack s = spec.stack;
    for (std::size_t i = 0; i < spec.free_layers.size(); ++i) {
        s.layers[spec.free_layers[i]].thickness = params[i];
        if (i < spec.ties.size())
            for (std::size_t idx : spec.ties[i]) s.layers[idx].thickness = params[i];
    }
    auto r = tmm(s, spec.target_wavelength, spec.pol, 0.0, lib);
    return r.layer_absorptance[gi];
}

}  // namespace

OptimizeResult optimize_stack(const OptimizeSpec& spec, const MaterialLib& lib) {
    if (spec.free_layers.empty() || spec.free_layers.size() > 6)
        throw std::invalid_argument("between 1 and 6 free layers");
    if (spec.bounds.size() != spec.free_layers.size())
        throw std::invalid_argument("one bounds pair per free layer");
    for (auto [lo, hi] : spec.bounds)
        if (!(lo > 0.0) || !(hi > lo)) throw std::invalid_argument("bounds must be positive and ordered");
    for (std::size_t idx : spec.free_layers)
        if (idx >= spec.stack.layers.size()) throw std::invalid_argument("free layer out of range");
    if (!spec.ties.empty() && spec.ties.size() != spec.free_layers.size())
        throw std::invalid_argument("one tie list per free layer when ties are given");
    for (const auto& group : spec.ties)
        for (std::size_t idx : group)
            if (idx >= spec.stack.layers.size()) throw std::invalid_argument("tied layer out of range");
    int gi = -1;
    for (std::size_t j = 0; j < spec.stack.layers.size(); ++j)
        if (spec.stack.layers[j].grating) gi = static_cast<int>(j);
    if (gi < 0) throw std::invalid_argument("optimization target needs a wire grating layer");

    std::size_t np = spec.free_layers.size();
    std::vector<double> best(np), lo(np), hi(np);
    for (std::size_t i = 0; i < np; ++i) {
        lo[i] = spec.bounds[i].first;
        hi[i] = spec.bounds[i].second;
        best[i] = 0.5 * (lo[i] + hi[i]);
    }
    auto f = [&](const std::vector<double>& p) { return objective(spec, lib, p, gi); };
    double best_val = f(best);

    // Coordinate grid refinement: scan each parameter on a shrinking bracket.
    std::vector<double> blo = lo, bhi = hi;
    for (int round = 0; round < 3; ++round) {
        for (std::size_t i = 0; i < np; ++i) {
            const int kGrid = 33;
            double arg = best[i];
            for (int g = 0; g < kGrid; ++g) {
                std::vector<double> p = best;
                p[i] = blo[i] + (bhi[i] - blo[i]) * g / (kGrid - 1);
                double v = f(p);
                if (v > best_val) {
                    best_val = v;
                    arg = p[i];
                }
            }
            best[i] = arg;
        }
        for (std::size_t i = 0; i < np; ++i) {
            double span = 0.25 * (bhi[i] - blo[i]);
            blo[i] = std::max(lo[i], best[i] - span);
            bhi[i] = std::min(hi[i], best[i] + span);
        }
    }

    OptimizeResult out;
    if (best_val < 1e-12) {
        out.degenerate = true;
        out.achieved = std::max(best_val, 0.0);
        out.thicknesses = best;
        out.stack = spec.stack;
        return out;
    }

    // Nelder-Mead polish, clamped to the bounds.
    auto clamp = [&](std::vector<double>& p) {
        for (std::size_t i = 0; i < np; ++i) p[i] = std::min(hi[i], std::max(lo[i], p[i]));
    };
    std::vector<std::vector<double>> simplex(np + 1, best);
    for (std::size_t i = 0; i < np; ++i) {
        simplex[i + 1][i] += 0.05 * (hi[i] - lo[i]);
        clamp(simplex[i + 1]);
    }
    std::vector<double> fv(np + 1);
    for (std::size_t i = 0; i <= np; ++i) fv[i] = -f(simplex[i]);  // minimize -A
    for (int iter = 0; iter < 200; ++iter) {
        std::vector<std::size_t> ord(np + 1);
        for (std::size_t i = 0; i <= np; ++i) ord[i] = i;
        std::sort(ord.begin(), ord.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        std::vector<std::vector<double>> sx(np + 1);
        std::vector<double> sf(np + 1);
        for (std::size_t i = 0; i <= np; ++i) {
            sx[i] = simplex[ord[i]];
            sf[i] = fv[ord[i]];
        }
        simplex = sx;
        fv = sf;
        if (std::abs(fv[np] - fv[0]) < 1e-14) break;
        std::vector<double> centroid(np, 0.0);
        for (std::size_t i = 0; i < np; ++i)
            for (std::size_t j = 0; j < np; ++j) centroid[j] += simplex[i][j] / np;
        auto blend = [&](double t) {
            std::vector<double> p(np);
            for (std::size_t j = 0; j < np; ++j) p[j] = centroid[j] + t * (centroid[j] - simplex[np][j]);
            clamp(p);
            return p;
        };
        auto xr = blend(1.0);
        double fr = -f(xr);
        if (fr < fv[0]) {
            auto xe = blend(2.0);
            double fe = -f(xe);
            if (fe < fr) {
                simplex[np] = xe;
                fv[np] = fe;
            } else {
                simplex[np] = xr;
                fv[np] = fr;
            }
        } else if (fr < fv[np - 1]) {
            simplex[np] = xr;
            fv[np] = fr;
        } else {
            auto xc = blend(0.5);
            double fc = -f(xc);
            if (fc < fv[np]) {
                simplex[np] = xc;
                fv[np] = fc;
            } else {
                for (std::size_t i = 1; i <= np; ++i) {
                    for (std::size_t j = 0; j < np; ++j)
                        simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
                    fv[i] = -f(simplex[i]);
                }
            }
        }
    }
    std::size_t win = 0;
    for (std::size_t i = 1; i <= np; ++i)
        if (fv[i] < fv[win]) win = i;
    if (-fv[win] > best_val) {
        best = simplex[win];
        best_val = -fv[win];
    }

    out.thicknesses = best;
    out.achieved = best_val;
    out.stack = spec.stack;
    for (std::size_t i = 0; i < np; ++i) {
        out.stack.layers[spec.free_layers[i]].thickness = best[i];
        if (i < spec.ties.size())
            for (std::size_t idx : spec.ties[i]) out.stack.layers[idx].thickness = best[i];
    }
    return out;
}

LayerStack cavity_stack(double fill_factor, bool with_wires) {
    LayerStack s;
    s.incidence = "air";
    s.substrate = "si";
    for (int i = 0; i < 3; ++i) {
        s.layers.push_back({"sio2", 264.0, std::nullopt});
        s.layers.push_back({"ta2o5", 180.0, std::nullopt});
    }
    if (with_wires) {
        s.layers.push_back({"sio2", 260.0, std::nullopt});
        Layer wire;
        wire.material = "sio2";
        wire.thickness = 9.0;
        wire.grating = GratingSpec{fill_factor, "nbtin", "sio2"};
        s.layers.push_back(wire);
        s.layers.push_back({"sio2", 260.0, std::nullopt});
    } else {
        s.layers.push_back({"sio2", 529.0, std::nullopt});
    }
    for (int i = 0; i < 6; ++i) {
        s.layers.push_back({"ta2o5", 180.0, std::nullopt});
        s.layers.push_back({"sio2", 264.0, std::nullopt});
    }
    return s;
}

LayerStack parse_stack_file(const std::string& text) {
    LayerStack s;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    bool saw_substrate = false;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string word;
        if (!(ls >> word)) continue;
        auto fail = [&](const std::string& why) {
            throw std::invalid_argument("stack file line " + std::to_string(lineno) + ": " + why);
        };
        if (word == "incidence") {
            if (!(ls >> s.incidence)) fail("expected a material name");
        } else if (word == "substrate") {
            if (!(ls >> s.substrate)) fail("expected a material name");
            saw_substrate = true;
        } else if (word == "layer") {
            Layer layer;
            if (!(ls >> layer.material >> layer.thickness)) fail("expected material and thickness");
            s.layers.push_back(layer);
        } else if (word == "grating") {
            Layer layer;
            GratingSpec g;
            std::string fill;
            if (!(ls >> g.metal >> g.host >> layer.thickness >> fill))
                fail("expected metal, host, thickness, fill=<f>");
            if (fill.rfind("fill=", 0) != 0) fail("expected fill=<f>");
            g.fill_factor = std::stod(fill.substr(5));
            std::string orient;
            if (ls >> orient) {
                if (orient == "orient=parallel") g.orientation = GratingModel::parallel;
                else if (orient == "orient=perpendicular") g.orientation = GratingModel::perpendicular;
                else if (orient == "orient=isotropic") g.orientation = GratingModel::isotropic;
                else fail("expected orient=parallel|perpendicular|isotropic");
            }
            layer.material = g.host;
            layer.grating = g;
            s.layers.push_back(layer);
        } else {
            fail("unknown record '" + word + "'");
        }
    }
    if (!saw_substrate) throw std::invalid_argument("stack file: missing substrate record");
    return s;
}

}  // namespace snspd::optics
