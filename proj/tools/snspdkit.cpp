// Command-line front end: every run writes its artifacts plus a manifest
// echoing the fully resolved configuration into one output directory, and any
// manifest can be replayed later to reproduce those artifacts byte for byte.

#include "snspd/analysis.hpp"
#include "snspd/circuit.hpp"
#include "snspd/coupling.hpp"
#include "snspd/current.hpp"
#include "snspd/geometry.hpp"
#include "snspd/io.hpp"
#include "snspd/optics.hpp"
#include "snspd/plot.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <future>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace {

using json = nlohmann::json;
using namespace snspd;

constexpr int k_exit_compute = 1;
constexpr int k_exit_usage = 2;

/// Bad invocation, configuration, or manifest (exit code 2); anything else
/// thrown below is a computation failure (exit code 1).
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string one_line(std::string s) {
    for (char& c : s)
        if (c == '\n' || c == '\r') c = ';';
    return s;
}

/// The only place artifacts are written: flat file names inside the
/// configured output directory.
class OutputDir {
public:
    explicit OutputDir(const std::string& dir) : dir_(dir) {
        if (dir.empty()) throw UsageError("output directory must not be empty");
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (!std::filesystem::is_directory(dir_))
            throw UsageError("cannot create output directory '" + dir + "'");
    }
    void write(const std::string& name, const std::string& content) const {
        if (name.empty() || name.find('/') != std::string::npos ||
            name.find('\\') != std::string::npos)
            throw std::logic_error("artifact names must be flat: '" + name + "'");
        io::write_text_file((dir_ / name).string(), content);
    }

private:
    std::filesystem::path dir_;
};

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Declarative parameters: one field list per subcommand drives the CLI
// option, the manifest echo, and the manifest reload, so the three can never
// disagree.

class ParamSet {
public:
    void number(const std::string& key, double* p, const std::string& help,
                bool required = false) {
        fields_.push_back({Kind::number, key, help, required, p, {}, {}, {}, {}});
    }
    void integer(const std::string& key, int* p, const std::string& help) {
        fields_.push_back({Kind::integer, key, help, false, {}, p, {}, {}, {}});
    }
    void text(const std::string& key, std::string* p, const std::string& help,
              bool required = false, bool positional = false) {
        fields_.push_back({positional ? Kind::positional : Kind::text, key, help, required,
                           {}, {}, p, {}, {}});
    }
    void flag(const std::string& key, bool* p, const std::string& help) {
        fields_.push_back({Kind::flag, key, help, false, {}, {}, {}, p, {}});
    }
    void numbers(const std::string& key, std::vector<double>* p, const std::string& help) {
        fields_.push_back({Kind::numbers, key, help, false, {}, {}, {}, {}, p});
    }

    void bind(CLI::App* cmd) {
        for (const Field& f : fields_) {
            const std::string name = f.kind == Kind::positional ? f.key : "--" + flag_name(f.key);
            CLI::Option* opt = nullptr;
            switch (f.kind) {
                case Kind::number: opt = cmd->add_option(name, *f.num, f.help); break;
                case Kind::integer: opt = cmd->add_option(name, *f.inum, f.help); break;
                case Kind::text:
                case Kind::positional: opt = cmd->add_option(name, *f.str, f.help); break;
                case Kind::flag: opt = cmd->add_flag(name, *f.flg, f.help); break;
                case Kind::numbers: opt = cmd->add_option(name, *f.vec, f.help); break;
            }
            opt->capture_default_str();
            if (f.required) opt->required();
            options_[f.key] = opt;
        }
    }

    [[nodiscard]] CLI::Option* option(const std::string& key) const { return options_.at(key); }

    [[nodiscard]] json to_json() const {
        json j = json::object();
        for (const Field& f : fields_) switch (f.kind) {
                case Kind::number: j[f.key] = *f.num; break;
                case Kind::integer: j[f.key] = *f.inum; break;
                case Kind::text:
                case Kind::positional: j[f.key] = *f.str; break;
                case Kind::flag: j[f.key] = *f.flg; break;
                case Kind::numbers: j[f.key] = *f.vec; break;
            }
        return j;
    }

    /// Overwrite the bound values from a manifest echo; the key set must
    /// match the field list exactly.
    void load(const json& j) const {
        if (!j.is_object()) throw UsageError("manifest config must be an object");
        for (const auto& item : j.items()) {
            if (std::none_of(fields_.begin(), fields_.end(),
                             [&](const Field& f) { return f.key == item.key(); }))
                throw UsageError("unknown key '" + item.key() + "' in manifest config");
        }
        for (const Field& f : fields_) {
            if (!j.contains(f.key))
                throw UsageError("missing key '" + f.key + "' in manifest config");
            const json& v = j.at(f.key);
            const bool ok = [&] {
                switch (f.kind) {
                    case Kind::number:
                        if (!v.is_number()) return false;
                        *f.num = v.get<double>();
                        return true;
                    case Kind::integer:
                        if (!v.is_number_integer()) return false;
                        *f.inum = v.get<int>();
                        return true;
                    case Kind::text:
                    case Kind::positional:
                        if (!v.is_string()) return false;
                        *f.str = v.get<std::string>();
                        return true;
                    case Kind::flag:
                        if (!v.is_boolean()) return false;
                        *f.flg = v.get<bool>();
                        return true;
                    case Kind::numbers:
                        if (!v.is_array()) return false;
                        f.vec->clear();
                        for (const json& e : v) {
                            if (!e.is_number()) return false;
                            f.vec->push_back(e.get<double>());
                        }
                        return true;
                }
                return false;
            }();
            if (!ok) throw UsageError("wrong type for key '" + f.key + "' in manifest config");
        }
    }

private:
    enum class Kind { number, integer, text, positional, flag, numbers };
    struct Field {
        Kind kind;
        std::string key;
        std::string help;
        bool required;
        double* num;
        int* inum;
        std::string* str;
        bool* flg;
        std::vector<double>* vec;
    };
    static std::string flag_name(std::string key) {
        for (char& c : key)
            if (c == '_') c = '-';
        return key;
    }
    std::vector<Field> fields_;
    std::map<std::string, CLI::Option*> options_;
};

// ---------------------------------------------------------------------------
// Shared helpers.

std::vector<double> linspace(double lo, double hi, int points) {
    if (points < 2) throw UsageError("points must be at least 2");
    if (!(hi > lo)) throw UsageError("range must be increasing");
    std::vector<double> v(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) v[i] = lo + (hi - lo) * i / (points - 1);
    return v;
}

geom::PathKind parse_kind(const std::string& name) {
    try {
        return geom::path_kind_from_string(name);
    } catch (const std::exception&) {
        throw UsageError("unknown geometry kind '" + name + "'");
    }
}

optics::Polarization parse_pol(const std::string& name) {
    if (name == "te") return optics::Polarization::te;
    if (name == "tm") return optics::Polarization::tm;
    throw UsageError("polarization must be te or tm");
}

double stack_thickness(const optics::LayerStack& stack) {
    double t = 0.0;
    for (const auto& layer : stack.layers) t += layer.thickness;
    return t;
}

/// Depth interval of the wire (grating) layer, when the stack has one.
std::optional<std::pair<double, double>> wire_depth(const optics::LayerStack& stack) {
    double z = 0.0;
    for (const auto& layer : stack.layers) {
        if (layer.grating) return std::make_pair(z, z + layer.thickness);
        z += layer.thickness;
    }
    return std::nullopt;
}

/// Thin every series to at most `cap` points so charts stay small.
plot::Series thinned(plot::Series s, std::size_t cap = 2000) {
    if (s.x.size() <= cap) return s;
    const std::size_t stride = (s.x.size() + cap - 1) / cap;
    plot::Series out;
    out.label = std::move(s.label);
    out.line = s.line;
    out.markers = s.markers;
    for (std::size_t i = 0; i < s.x.size(); i += stride) {
        out.x.push_back(s.x[i]);
        out.y.push_back(s.y[i]);
    }
    if (out.x.back() != s.x.back()) {
        out.x.push_back(s.x.back());
        out.y.push_back(s.y.back());
    }
    return out;
}

// ---------------------------------------------------------------------------
// geometry

struct GeometryParams {
    std::string kind = "arced_fractal";
    double side_um = 10.2;
    double width_nm = 40.0;
    double pitch_nm = 129.0;
    int order = 2;
    double arc_frac = 0.5;
    bool unit = false;
};

void run_geometry(const GeometryParams& g, const OutputDir& out) {
    const geom::PathKind kind = parse_kind(g.kind);
    geom::NanowirePath path;
    if (g.unit) {
        path = current::crowding_unit(kind, g.width_nm, g.pitch_nm, g.arc_frac);
    } else if (kind == geom::PathKind::meander) {
        path = geom::gen_meander(g.side_um * 1000.0, g.width_nm, g.pitch_nm);
    } else {
        path = geom::gen_fractal(g.side_um * 1000.0, g.width_nm, g.pitch_nm, g.order,
                                 kind == geom::PathKind::arced_fractal, g.arc_frac);
    }
    const geom::PolygonSet polys = geom::inflate(path);

    out.write("layout.json", geom::layout_json(path));
    std::ostringstream svg;
    geom::write_layout_svg(svg, path, polys);
    out.write("layout.svg", svg.str());

    const geom::Rect bbox = path.bounding_box();
    json j;
    j["bbox_x0_nm"] = bbox.x0;
    j["bbox_x1_nm"] = bbox.x1;
    j["bbox_y0_nm"] = bbox.y0;
    j["bbox_y1_nm"] = bbox.y1;
    j["centerline_length_nm"] = path.centerline_length();
    j["fill_factor"] = geom::fill_factor(path);
    j["kind"] = geom::to_string(path.kind);
    j["segment_count"] = path.segments.size();
    j["wire_area_nm2"] = polys.area();
    out.write("geometry.json", dump_json(j));
}

// ---------------------------------------------------------------------------
// solve-current

struct SolveCurrentParams {
    std::string layout;
    double cell_nm = 0.0;  // 0 selects width / 10
    double xi_nm = 10.0;
    double tol = 1e-8;
};

void run_solve_current(const SolveCurrentParams& s, const OutputDir& out) {
    const geom::NanowirePath path = geom::path_from_layout_json(io::read_text_file(s.layout));
    const auto contacts = current::end_contacts(path);
    const geom::PolygonSet polys = geom::inflate(path);
    const double cell = s.cell_nm > 0.0 ? s.cell_nm : path.width / 10.0;
    const current::DomainGrid grid =
        current::rasterize(polys, cell, path.width, contacts.first, contacts.second);
    const current::FieldGrid field = current::solve_stream(grid, s.tol);
    const current::CrowdingResult cr = current::crowding(field, path.width, s.xi_nm);

    json j;
    j["cell_nm"] = field.cell_size;
    j["grid_nx"] = field.nx;
    j["grid_ny"] = field.ny;
    j["iterations"] = field.iterations;
    j["j_peak_per_nm"] = cr.j_peak;
    j["j_uniform_per_nm"] = cr.j_uniform;
    j["method"] = field.method;
    j["peak_x_nm"] = cr.peak_location.x;
    j["peak_y_nm"] = cr.peak_location.y;
    j["ratio_isw_ic"] = cr.ratio_isw_ic;
    j["residual"] = field.residual;
    out.write("current.json", dump_json(j));

    io::CsvWriter csv({"x_nm", "y_nm", "j_per_nm"});
    std::vector<double> cells(static_cast<std::size_t>(field.nx) * field.ny, std::nan(""));
    for (int iy = 0; iy < field.ny; ++iy)
        for (int ix = 0; ix < field.nx; ++ix) {
            if (!field.wire(ix, iy)) continue;
            const std::size_t idx = field.index(ix, iy);
            const double x = field.origin.x + (ix + 0.5) * field.cell_size;
            const double y = field.origin.y + (iy + 0.5) * field.cell_size;
            csv.add_row({io::fmt_fixed(x, 3), io::fmt_fixed(y, 3),
                         io::fmt_fixed(field.jmag[idx], 9)});
            cells[idx] = field.jmag[idx];
        }
    out.write("jmag.csv", csv.str());
    out.write("jmag.svg",
              plot::emit_heatmap(cells, static_cast<std::size_t>(field.nx),
                                 static_cast<std::size_t>(field.ny),
                                 {"sheet current density |J|", "x", "y"}));
}

// ---------------------------------------------------------------------------
// absorptance

struct AbsorptanceParams {
    std::string stack;  // stack description file; empty selects the built-in cavity
    std::string device = "arced_fractal";
    double fill_factor = 0.31;
    double from_nm = 1400.0;
    double to_nm = 1700.0;
    int points = 151;
};

optics::LayerStack resolve_stack(const std::string& file, double fill_factor) {
    if (file.empty()) return optics::cavity_stack(fill_factor, true);
    return optics::parse_stack_file(io::read_text_file(file));
}

void run_absorptance(const AbsorptanceParams& a, const OutputDir& out) {
    const optics::LayerStack stack = resolve_stack(a.stack, a.fill_factor);
    const geom::PathKind kind = parse_kind(a.device);
    const std::vector<double> wl = linspace(a.from_nm, a.to_nm, a.points);
    const optics::Spectrum spec = optics::device_absorptance(stack, kind, wl);

    io::CsvWriter csv({"wavelength_nm", "wire_a_te", "wire_a_tm", "total_a_te", "total_a_tm",
                       "r_te", "r_tm", "t_te", "t_tm"});
    plot::Series te{"TE", {}, {}, true, false}, tm{"TM", {}, {}, true, false};
    std::size_t peak_te = 0, peak_tm = 0;
    for (std::size_t i = 0; i < wl.size(); ++i) {
        const auto& pe = spec.te[i];
        const auto& pm = spec.tm[i];
        csv.add_row({io::fmt_fixed(pe.wavelength, 3), io::fmt_fixed(pe.wire_absorptance, 9),
                     io::fmt_fixed(pm.wire_absorptance, 9), io::fmt_fixed(pe.absorptance, 9),
                     io::fmt_fixed(pm.absorptance, 9), io::fmt_fixed(pe.reflectance, 9),
                     io::fmt_fixed(pm.reflectance, 9), io::fmt_fixed(pe.transmittance, 9),
                     io::fmt_fixed(pm.transmittance, 9)});
        te.x.push_back(pe.wavelength);
        te.y.push_back(pe.wire_absorptance);
        tm.x.push_back(pm.wavelength);
        tm.y.push_back(pm.wire_absorptance);
        if (pe.wire_absorptance > spec.te[peak_te].wire_absorptance) peak_te = i;
        if (pm.wire_absorptance > spec.tm[peak_tm].wire_absorptance) peak_tm = i;
    }
    out.write("spectrum.csv", csv.str());
    out.write("spectrum.svg",
              plot::emit_plot({te, tm}, {"wire absorptance", "wavelength (nm)", "absorptance"}));

    json j;
    j["device"] = geom::to_string(kind);
    j["peak_wavelength_te_nm"] = spec.te[peak_te].wavelength;
    j["peak_wavelength_tm_nm"] = spec.tm[peak_tm].wavelength;
    j["peak_wire_a_te"] = spec.te[peak_te].wire_absorptance;
    j["peak_wire_a_tm"] = spec.tm[peak_tm].wire_absorptance;
    out.write("absorptance.json", dump_json(j));
}

// ---------------------------------------------------------------------------
// field

struct FieldParams {
    std::string stack;
    double fill_factor = 0.31;
    double wavelength_nm = 1550.0;
    double z_step_nm = 2.0;
    double margin_nm = 400.0;
    std::string pol = "te";
};

void write_field_profile(const optics::LayerStack& stack, double wavelength_nm,
                         double z_step_nm, double margin_nm, optics::Polarization pol,
                         const OutputDir& out, const std::string& stem) {
    if (!(z_step_nm > 0.0)) throw UsageError("z step must be positive");
    if (margin_nm < 0.0) throw UsageError("margin must be non-negative");
    const double total = stack_thickness(stack);
    const int n = static_cast<int>(std::floor((total + 2.0 * margin_nm) / z_step_nm)) + 1;
    std::vector<double> z(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) z[static_cast<std::size_t>(i)] = -margin_nm + i * z_step_nm;
    const auto prof = optics::field_profile(stack, wavelength_nm, z, pol);

    io::CsvWriter csv({"z_nm", "intensity"});
    plot::Series line{"|E|^2", {}, {}, true, false};
    double max_i = 0.0, z_max = 0.0;
    for (const auto& p : prof) {
        csv.add_row({io::fmt_fixed(p.z, 3), io::fmt_fixed(p.intensity, 9)});
        line.x.push_back(p.z);
        line.y.push_back(p.intensity);
        if (p.intensity > max_i) {
            max_i = p.intensity;
            z_max = p.z;
        }
    }
    out.write(stem + ".csv", csv.str());

    std::vector<plot::Series> series{thinned(std::move(line))};
    if (const auto wire = wire_depth(stack)) {
        const double zc = 0.5 * (wire->first + wire->second);
        series.push_back({"wire layer", {zc, zc}, {0.0, max_i}, true, false});
    }
    out.write(stem + ".svg",
              plot::emit_plot(series, {"standing-wave intensity", "depth (nm)", "|E|^2"}));

    json j;
    j["max_intensity"] = max_i;
    j["total_thickness_nm"] = total;
    j["z_at_max_nm"] = z_max;
    out.write(stem + ".json", dump_json(j));
}

void run_field(const FieldParams& f, const OutputDir& out) {
    write_field_profile(resolve_stack(f.stack, f.fill_factor), f.wavelength_nm, f.z_step_nm,
                        f.margin_nm, parse_pol(f.pol), out, "field");
}

// ---------------------------------------------------------------------------
// couple

struct CoupleParams {
    double mfd_um = 10.7;
    double side_um = 10.2;
    double max_offset_um = 5.0;
    int points = 51;
    double eta_target = 0.0;  // 0 disables the misalignment budget
};

void run_couple(const CoupleParams& c, const OutputDir& out) {
    const double centered = coupling::coupling_efficiency({c.mfd_um, c.side_um, 0.0, 0.0});
    const std::vector<double> offsets = linspace(0.0, c.max_offset_um, c.points);

    io::CsvWriter csv({"offset_um", "efficiency"});
    plot::Series line{"diagonal offset", {}, {}, true, false};
    for (double r : offsets) {
        const double d = r / std::sqrt(2.0);
        const double eta = coupling::coupling_efficiency({c.mfd_um, c.side_um, d, d});
        csv.add_row({io::fmt_fixed(r, 6), io::fmt_fixed(eta, 9)});
        line.x.push_back(r);
        line.y.push_back(eta);
    }
    out.write("coupling.csv", csv.str());
    out.write("coupling.svg", plot::emit_plot({line}, {"fiber-to-area coupling",
                                                       "radial offset (um)", "efficiency"}));

    json j;
    j["centered_efficiency"] = centered;
    j["eta_target"] = c.eta_target;
    j["mfd_um"] = c.mfd_um;
    j["side_um"] = c.side_um;
    if (c.eta_target > 0.0)
        j["budget_offset_um"] = coupling::misalignment_budget(c.mfd_um, c.side_um, c.eta_target);
    else
        j["budget_offset_um"] = nullptr;
    out.write("coupling.json", dump_json(j));
}

// ---------------------------------------------------------------------------
// pulse-sim

struct PulseParams {
    int sections = 16;
    double l_wire_nh = 50.0;
    double l_series_nh = 2.125;
    double r_hotspot_ohm = 1000.0;
    double tau_hotspot_ns = 0.02;
    double retrap_fraction = 0.5;
    double r_load_ohm = 50.0;
    double i_bias_ua = 19.5;
    double i_sw_ua = 10.835;
    int fire = 0;  // wire index; -1 runs the unperturbed network
    double dt_ps = 1.0;
    double horizon_ns = 100.0;
    int decimate = 10;
};

void run_pulse(const PulseParams& p, const OutputDir& out) {
    if (p.decimate < 1) throw UsageError("decimate must be at least 1");
    circuit::SnapParams sp;
    sp.n_sections = p.sections;
    sp.l_wire = p.l_wire_nh;
    sp.l_series = p.l_series_nh;
    sp.r_hotspot = p.r_hotspot_ohm;
    sp.tau_hotspot = p.tau_hotspot_ns;
    sp.retrap_fraction = p.retrap_fraction;
    sp.r_load = p.r_load_ohm;
    sp.i_bias = p.i_bias_ua;
    sp.i_sw_wire = p.i_sw_ua;
    const circuit::SnapNetwork net = circuit::build_cascade(sp);
    const circuit::PulseTrace tr =
        circuit::simulate_detection(net, p.fire, p.dt_ps * 1e-3, p.horizon_ns);

    const std::size_t wires = tr.i_wire.size();
    std::vector<std::string> header{"t_ns", "i_load_ua"};
    for (std::size_t w = 0; w < wires; ++w) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "i_wire_%02zu", w);
        header.emplace_back(buf);
    }
    io::CsvWriter csv(std::move(header));
    const std::size_t n = tr.t.size();
    for (std::size_t k = 0; k < n; ++k) {
        if (k % static_cast<std::size_t>(p.decimate) != 0 && k != n - 1) continue;
        std::vector<std::string> row{io::fmt_fixed(tr.t[k], 6), io::fmt_fixed(tr.i_load[k], 9)};
        for (std::size_t w = 0; w < wires; ++w)
            row.push_back(io::fmt_fixed(tr.i_wire[w][k], 9));
        csv.add_row(std::move(row));
    }
    out.write("trace.csv", csv.str());

    double peak = 0.0;
    for (double v : tr.i_load) peak = std::max(peak, std::abs(v));
    json ev;
    ev["energy_drift"] = tr.energy_drift;
    ev["events"] = json::array();
    for (const auto& e : tr.events)
        ev["events"].push_back(
            {{"kind", e.switched ? "switch" : "heal"}, {"t_ns", e.t}, {"wire", e.wire}});
    ev["latch_risk"] = net.latch_risk;
    ev["peak_i_load_ua"] = peak;
    try {
        ev["recovery_tau_ns"] = circuit::recovery_time(tr);
    } catch (const std::exception&) {
        ev["recovery_tau_ns"] = nullptr;  // no usable falling edge
    }
    out.write("events.json", dump_json(ev));

    std::vector<plot::Series> series;
    plot::Series load{"load", tr.t, tr.i_load, true, false};
    series.push_back(thinned(std::move(load)));
    if (p.fire >= 0 && static_cast<std::size_t>(p.fire) < wires) {
        const std::size_t partner = static_cast<std::size_t>(p.fire) ^ 1u;
        char buf[32];
        std::snprintf(buf, sizeof buf, "wire %d", p.fire);
        series.push_back(thinned({buf, tr.t, tr.i_wire[static_cast<std::size_t>(p.fire)],
                                  true, false}));
        std::snprintf(buf, sizeof buf, "wire %zu", partner);
        series.push_back(thinned({buf, tr.t, tr.i_wire[partner], true, false}));
    }
    out.write("pulse.svg", plot::emit_plot(series, {"detection pulse", "time (ns)",
                                                    "current (uA)"}));
}

// ---------------------------------------------------------------------------
// fit-jitter

struct FitJitterParams {
    std::string histogram;
};

void write_fit_artifacts(const analysis::Histogram& h, const OutputDir& out,
                         const std::string& svg_name) {
    const analysis::EmgFit fit = analysis::fit_emg(h);

    json j;
    j["amplitude"] = fit.params.amplitude;
    j["chi2"] = fit.diagnostics.chi2;
    j["converged"] = fit.diagnostics.converged;
    j["fwhm_ps"] = fit.fwhm_ps;
    j["iterations"] = fit.diagnostics.iterations;
    j["mu_ps"] = fit.params.mu;
    j["sigma_pinned"] = fit.diagnostics.sigma_pinned;
    j["sigma_ps"] = fit.params.sigma;
    j["tau_pinned"] = fit.diagnostics.tau_pinned;
    j["tau_ps"] = fit.params.tau;
    out.write("fit.json", dump_json(j));

    io::CsvWriter csv({"bin_center_ps", "count", "model"});
    plot::Series data{"data", {}, {}, false, true};
    plot::Series model{"fit", {}, {}, true, false};
    for (std::size_t i = 0; i + 1 < h.edges.size(); ++i) {
        const double c = 0.5 * (h.edges[i] + h.edges[i + 1]);
        const double w = h.edges[i + 1] - h.edges[i];
        const double m = fit.params.amplitude * w * analysis::emg_pdf(fit.params, c);
        csv.add_row({io::fmt_fixed(c, 3), io::fmt_fixed(h.counts[i], 6), io::fmt_fixed(m, 6)});
        data.x.push_back(c);
        data.y.push_back(h.counts[i]);
        model.x.push_back(c);
        model.y.push_back(m);
    }
    out.write("fit.csv", csv.str());
    out.write(svg_name, plot::emit_plot({data, model}, {"arrival-time histogram", "time (ps)",
                                                        "events per bin"}));
}

void run_fit_jitter(const FitJitterParams& f, const OutputDir& out) {
    write_fit_artifacts(analysis::parse_histogram_csv(io::read_text_file(f.histogram)), out,
                        "fit.svg");
}

// ---------------------------------------------------------------------------
// sde

struct SdeParams {
    double counts_cps = 0.0;
    double false_cps = 0.0;
    double power_w = 0.0;
    double wavelength_nm = 1550.0;
    double bias_ua = 0.0;
    double dcr_cps = 0.0;
    double end_facet_r = -1.0;  // negative disables the correction
    double end_facet_u = 0.0;
    double attenuation = -1.0;  // negative disables the correction
    double attenuation_u = 0.0;
    double integration_s = 1.0;
    double ps_max = -1.0;  // negative skips the polarization ratio
    double ps_max_u = 0.0;
    double ps_min = -1.0;
    double ps_min_u = 0.0;
    std::vector<double> budget;  // empty or {fiber, coupling, absorptance, registration}
};

void run_sde(const SdeParams& s, const OutputDir& out) {
    const double rate = analysis::photon_rate(s.power_w, s.wavelength_nm);
    analysis::SdeCorrections corr;
    if (s.end_facet_r >= 0.0) corr.end_facet_reflectance = {s.end_facet_r, s.end_facet_u};
    if (s.attenuation >= 0.0) corr.attenuation = {s.attenuation, s.attenuation_u};
    corr.integration_time_s = s.integration_s;

    analysis::DetectionMetrics m = analysis::compute_sde(s.counts_cps, s.false_cps, rate, corr);
    m.dcr = s.dcr_cps;
    m.bias_ua = s.bias_ua;
    m.wavelength_nm = s.wavelength_nm;

    if ((s.ps_max >= 0.0) != (s.ps_min >= 0.0))
        throw UsageError("ps-max and ps-min must be supplied together");
    if (s.ps_max >= 0.0) {
        const analysis::PsResult pr =
            analysis::polarization_sensitivity({s.ps_max, s.ps_max_u}, {s.ps_min, s.ps_min_u});
        m.ps = pr.ps;
        m.sde_max = std::max(s.ps_max, s.ps_min);
        m.sde_min = std::min(s.ps_max, s.ps_min);
        if (pr.swapped)
            m.warnings.emplace_back("polarization efficiencies arrived in min/max order");
    }
    out.write("metrics.json", analysis::metrics_json(m));

    if (!s.budget.empty()) {
        if (s.budget.size() != 4)
            throw UsageError("budget needs exactly 4 factors: fiber transmittance, coupling, "
                             "absorptance, registration");
        const analysis::SdeBudget b =
            analysis::sde_budget(s.budget[0], s.budget[1], s.budget[2], s.budget[3]);
        json j;
        j["absorptance"] = b.absorptance;
        j["coupling"] = b.coupling;
        j["fiber_transmittance"] = b.fiber_transmittance;
        j["product"] = b.product;
        j["registration"] = b.registration;
        out.write("budget.json", dump_json(j));
    }
}

// ---------------------------------------------------------------------------
// optimize

struct OptimizeParams {
    double target_nm = 1550.0;
    double lo_nm = 150.0;
    double hi_nm = 350.0;
    double fill_factor = 0.31;
};

void run_optimize(const OptimizeParams& o, const OutputDir& out) {
    if (!(o.hi_nm > o.lo_nm)) throw UsageError("bounds must satisfy lo < hi");
    optics::OptimizeSpec spec;
    spec.stack = optics::cavity_stack(o.fill_factor, true);
    spec.free_layers = {6};  // half-defect above the wire layer
    spec.ties = {{8}};       // the half below moves with it
    spec.bounds = {{o.lo_nm, o.hi_nm}};
    spec.target_wavelength = o.target_nm;
    spec.pol = optics::Polarization::te;
    const optics::OptimizeResult res = optics::optimize_stack(spec);

    const double total = res.stack.layers[6].thickness + res.stack.layers[7].thickness +
                         res.stack.layers[8].thickness;
    json j;
    j["achieved_wire_absorptance"] = res.achieved;
    j["defect_half_nm"] = res.thicknesses[0];
    j["defect_total_nm"] = total;
    j["degenerate"] = res.degenerate;
    j["target_nm"] = o.target_nm;
    out.write("optimize.json", dump_json(j));
}

// ---------------------------------------------------------------------------
// reproduce: canned analysis pipelines with fixed, documented parameters.

struct ReproduceParams {
    std::string pipeline;
};

void pipeline_field_profile(const OutputDir& out) {
    write_field_profile(optics::cavity_stack(0.31, true), 1550.0, 2.0, 400.0,
                        optics::Polarization::te, out, "profile");
}

void pipeline_crowding_sweep(const OutputDir& out, int jobs) {
    const std::vector<double> ffs{0.20, 0.25, 0.31, 0.40, 0.45};
    const double width = 40.0;
    const geom::PathKind kinds[] = {geom::PathKind::meander, geom::PathKind::standard_fractal,
                                    geom::PathKind::arced_fractal};
    std::vector<std::vector<current::SweepPoint>> results(3);
    const auto solve_one = [&](std::size_t i) {
        return current::sweep_fill_factor(kinds[i], ffs, width, {});
    };
    if (jobs > 1) {
        std::vector<std::future<std::vector<current::SweepPoint>>> futs;
        futs.reserve(3);
        for (std::size_t i = 0; i < 3; ++i)
            futs.push_back(std::async(std::launch::async, solve_one, i));
        for (std::size_t i = 0; i < 3; ++i) results[i] = futs[i].get();
    } else {
        for (std::size_t i = 0; i < 3; ++i) results[i] = solve_one(i);
    }
    for (std::size_t i = 0; i < 3; ++i)
        for (const auto& pt : results[i])
            if (!pt.ok)
                throw std::runtime_error("crowding solve failed for " +
                                         geom::to_string(kinds[i]) + ": " + pt.error);

    io::CsvWriter csv({"fill_factor", "ratio_meander", "ratio_standard_fractal",
                       "ratio_arced_fractal"});
    std::vector<plot::Series> series{{"meander", {}, {}, true, true},
                                     {"standard fractal", {}, {}, true, true},
                                     {"arced fractal", {}, {}, true, true}};
    for (std::size_t k = 0; k < ffs.size(); ++k) {
        csv.add_row({io::fmt_fixed(ffs[k], 6), io::fmt_fixed(results[0][k].ratio_isw_ic, 6),
                     io::fmt_fixed(results[1][k].ratio_isw_ic, 6),
                     io::fmt_fixed(results[2][k].ratio_isw_ic, 6)});
        for (std::size_t i = 0; i < 3; ++i) {
            series[i].x.push_back(ffs[k]);
            series[i].y.push_back(results[i][k].ratio_isw_ic);
        }
    }
    out.write("sweep.csv", csv.str());
    out.write("sweep.svg", plot::emit_plot(series, {"switching-current suppression",
                                                    "fill factor", "I_sw / I_c"}));
}

void pipeline_cavity_spectrum(const OutputDir& out) {
    const std::vector<double> wl = linspace(1400.0, 1700.0, 151);
    const optics::Spectrum spec = optics::device_absorptance(
        optics::cavity_stack(0.31, true), geom::PathKind::arced_fractal, wl);
    io::CsvWriter csv({"wavelength_nm", "wire_a_te", "wire_a_tm"});
    plot::Series te{"TE", {}, {}, true, false}, tm{"TM", {}, {}, true, false};
    for (std::size_t i = 0; i < wl.size(); ++i) {
        csv.add_row({io::fmt_fixed(spec.te[i].wavelength, 3),
                     io::fmt_fixed(spec.te[i].wire_absorptance, 9),
                     io::fmt_fixed(spec.tm[i].wire_absorptance, 9)});
        te.x.push_back(spec.te[i].wavelength);
        te.y.push_back(spec.te[i].wire_absorptance);
        tm.x.push_back(spec.tm[i].wavelength);
        tm.y.push_back(spec.tm[i].wire_absorptance);
    }
    out.write("spectrum.csv", csv.str());
    out.write("spectrum.svg", plot::emit_plot({te, tm}, {"cavity wire absorptance",
                                                         "wavelength (nm)", "absorptance"}));
}

void pipeline_polarization_ratio(const OutputDir& out) {
    const std::vector<double> wl{600.0, 1000.0, 1550.0, 2000.0, 3000.0, 4000.0, 5000.0};
    const optics::LayerStack stack = optics::cavity_stack(0.31, true);
    const auto ratios = [&](geom::PathKind kind) {
        const auto r = optics::polarization_ratio(optics::device_absorptance(stack, kind, wl));
        for (const auto& pt : r)
            if (!pt.defined)
                throw std::runtime_error("polarization ratio undefined at " +
                                         io::fmt_fixed(pt.wavelength, 1) + " nm");
        return r;
    };
    const auto meander = ratios(geom::PathKind::meander);
    const auto fractal = ratios(geom::PathKind::arced_fractal);

    io::CsvWriter csv({"wavelength_nm", "ratio_meander", "ratio_arced_fractal"});
    plot::Series sm{"meander", {}, {}, true, true};
    plot::Series sf{"arced fractal", {}, {}, true, true};
    for (std::size_t i = 0; i < wl.size(); ++i) {
        csv.add_row({io::fmt_fixed(wl[i], 3), io::fmt_fixed(meander[i].ratio, 9),
                     io::fmt_fixed(fractal[i].ratio, 9)});
        sm.x.push_back(wl[i]);
        sm.y.push_back(std::log10(meander[i].ratio));
        sf.x.push_back(wl[i]);
        sf.y.push_back(std::log10(fractal[i].ratio));
    }
    out.write("ratios.csv", csv.str());
    // The chart is logarithmic so the polarization-neutral curve at exactly 1
    // stays readable next to the meander's strong anisotropy.
    const plot::Series unity{"ratio = 1", {wl.front(), wl.back()}, {0.0, 0.0}, true, false};
    out.write("ratio.svg",
              plot::emit_plot({sm, sf, unity}, {"polarization ratio", "wavelength (nm)",
                                                "log10(A_TE / A_TM)"}));
}

void pipeline_jitter_fit(const OutputDir& out) {
    // Synthetic demo histogram at the published device's jitter scale:
    // a 7.56 ps core with a 6 ps tail, 1e5 events, 1 ps bins.
    const analysis::EmgParams truth{100.0, 7.56, 6.0, 1.0};
    const double total = 1e5;
    analysis::Histogram h;
    std::string csv = "# bin_start_ps,count\n";
    for (int b = 40; b < 220; ++b) {
        const double count = std::round(total * analysis::emg_pdf(truth, b + 0.5));
        h.edges.push_back(b);
        h.counts.push_back(count);
        csv += io::fmt_fixed(b, 3) + "," + io::fmt_fixed(count, 0) + "\n";
    }
    h.edges.push_back(220.0);
    out.write("histogram.csv", csv);
    write_fit_artifacts(h, out, "jitter.svg");
}

void run_reproduce(const ReproduceParams& r, const OutputDir& out, int jobs) {
    if (r.pipeline == "field-profile")
        pipeline_field_profile(out);
    else if (r.pipeline == "crowding-sweep")
        pipeline_crowding_sweep(out, jobs);
    else if (r.pipeline == "cavity-spectrum")
        pipeline_cavity_spectrum(out);
    else if (r.pipeline == "polarization-ratio")
        pipeline_polarization_ratio(out);
    else if (r.pipeline == "jitter-fit")
        pipeline_jitter_fit(out);
    else
        throw UsageError("unknown pipeline '" + r.pipeline + "'");
}

// ---------------------------------------------------------------------------
// Invocation plumbing.

struct Command {
    std::string name;
    std::string help;
    ParamSet params;
    std::function<void(const OutputDir&, int)> handler;
};

const std::vector<std::string> k_pipelines{"field-profile", "crowding-sweep", "cavity-spectrum",
                                           "polarization-ratio", "jitter-fit"};

int run_cli(int argc, char** argv) {
    CLI::App app{"superconducting-nanowire single-photon detector design toolkit"};
    app.require_subcommand(0, 1);

    std::string out_dir = ".";
    std::uint64_t seed = 0;
    int jobs = 1;
    std::string from_manifest;
    app.add_option("--out", out_dir, "directory all artifacts are written into")
        ->capture_default_str();
    app.add_option("--seed", seed, "random seed echoed into the manifest")
        ->capture_default_str();
    app.add_option("--jobs", jobs, "worker threads for sweep pipelines")
        ->check(CLI::Range(1, 64))
        ->capture_default_str();
    app.add_option("--from-manifest", from_manifest,
                   "replay the invocation recorded in a manifest file")
        ->check(CLI::ExistingFile);
    app.set_config("--config", "",
                   "key = value configuration file with [subcommand] tables");

    GeometryParams geometry_p;
    SolveCurrentParams solve_p;
    AbsorptanceParams absorb_p;
    FieldParams field_p;
    CoupleParams couple_p;
    PulseParams pulse_p;
    FitJitterParams jitter_p;
    SdeParams sde_p;
    OptimizeParams optimize_p;
    ReproduceParams reproduce_p;

    std::vector<Command> commands;
    commands.reserve(10);

    {
        Command c{"geometry", "generate a nanowire layout and its rendering", {}, {}};
        c.params.text("kind", &geometry_p.kind, "meander, standard_fractal, or arced_fractal");
        c.params.number("side_um", &geometry_p.side_um, "square active-area side");
        c.params.number("width_nm", &geometry_p.width_nm, "wire width");
        c.params.number("pitch_nm", &geometry_p.pitch_nm, "wire pitch");
        c.params.integer("order", &geometry_p.order, "tiling order (1 or 2)");
        c.params.number("arc_frac", &geometry_p.arc_frac, "arc radius as a fraction of pitch");
        c.params.flag("unit", &geometry_p.unit,
                      "emit the single-turn unit used for crowding studies");
        c.handler = [&](const OutputDir& out, int) { run_geometry(geometry_p, out); };
        commands.push_back(std::move(c));
    }
    {
        Command c{"solve-current", "current-crowding solve on a saved layout", {}, {}};
        c.params.text("layout", &solve_p.layout, "layout JSON produced by the geometry command",
                      true);
        c.params.number("cell_nm", &solve_p.cell_nm, "grid cell size; 0 selects width/10");
        c.params.number("xi_nm", &solve_p.xi_nm, "peak-regularization disc radius");
        c.params.number("tol", &solve_p.tol, "solver residual tolerance");
        c.handler = [&](const OutputDir& out, int) { run_solve_current(solve_p, out); };
        commands.push_back(std::move(c));
    }
    {
        Command c{"absorptance", "absorptance spectra of a patterned-wire stack", {}, {}};
        c.params.text("stack", &absorb_p.stack,
                      "stack description file; empty selects the built-in cavity");
        c.params.text("device", &absorb_p.device, "wire pattern kind for the grating layer");
        c.params.number("fill_factor", &absorb_p.fill_factor,
                        "wire fill factor of the built-in cavity");
        c.params.number("from_nm", &absorb_p.from_nm, "first wavelength");
        c.params.number("to_nm", &absorb_p.to_nm, "last wavelength");
        c.params.integer("points", &absorb_p.points, "number of wavelength samples");
        c.handler = [&](const OutputDir& out, int) { run_absorptance(absorb_p, out); };
        commands.push_back(std::move(c));
    }
    {
        Command c{"field", "standing-wave intensity profile through a stack", {}, {}};
        c.params.text("stack", &field_p.stack,
                      "stack description file; empty selects the built-in cavity");
        c.params.number("fill_factor", &field_p.fill_factor,
                        "wire fill factor of the built-in cavity");
        c.params.number("wavelength_nm", &field_p.wavelength_nm, "probe wavelength");
        c.params.number("z_step_nm", &field_p.z_step_nm, "depth sampling step");
        c.params.number("margin_nm", &field_p.margin_nm,
                        "extra depth beyond the stack on both sides");
        c.params.text("pol", &field_p.pol, "incident polarization (te or tm)");
        c.handler = [&](const OutputDir& out, int) { run_field(field_p, out); };
        commands.push_back(std::move(c));
    }
    {
        Command c{"couple", "Gaussian fiber-mode coupling onto a square area", {}, {}};
        c.params.number("mfd_um", &couple_p.mfd_um, "fiber mode-field diameter");
        c.params.number("side_um", &couple_p.side_um, "photosensitive square side");
        c.params.number("max_offset_um", &couple_p.max_offset_um, "offset sweep end");
        c.params.integer("points", &couple_p.points, "number of sweep samples");
        c.params.number("eta_target", &couple_p.eta_target,
                        "efficiency target for the misalignment budget; 0 disables");
        c.handler = [&](const OutputDir& out, int) { run_couple(couple_p, out); };
        commands.push_back(std::move(c));
    }
    {
        Command c{"pulse-sim", "transient of the cascaded detector network", {}, {}};
        c.params.integer("sections", &pulse_p.sections, "cascaded two-wire sections");
        c.params.number("l_wire_nh", &pulse_p.l_wire_nh, "kinetic inductance per wire");
        c.params.number("l_series_nh", &pulse_p.l_series_nh, "series choke per section");
        c.params.number("r_hotspot_ohm", &pulse_p.r_hotspot_ohm, "resistance of a fired wire");
        c.params.number("tau_hotspot_ns", &pulse_p.tau_hotspot_ns,
                        "minimum resistive lifetime");
        c.params.number("retrap_fraction", &pulse_p.retrap_fraction,
                        "healing threshold as a fraction of the wire switching current");
        c.params.number("r_load_ohm", &pulse_p.r_load_ohm, "readout load");
        c.params.number("i_bias_ua", &pulse_p.i_bias_ua, "bias current");
        c.params.number("i_sw_ua", &pulse_p.i_sw_ua, "switching current per wire");
        c.params.integer("fire", &pulse_p.fire, "wire forced resistive at t = 0; -1 for none");
        c.params.number("dt_ps", &pulse_p.dt_ps, "integration step");
        c.params.number("horizon_ns", &pulse_p.horizon_ns, "simulated span");
        c.params.integer("decimate", &pulse_p.decimate, "keep every n-th trace sample");
        c.handler = [&](const OutputDir& out, int) { run_pulse(pulse_p, out); };
        commands.push_back(std::move(c));
    }
    {
        Command c{"fit-jitter", "tailed-Gaussian fit of an arrival-time histogram", {}, {}};
        c.params.text("histogram", &jitter_p.histogram,
                      "arrival-time histogram CSV (bin_start_ps,count)", true);
        c.handler = [&](const OutputDir& out, int) { run_fit_jitter(jitter_p, out); };
        commands.push_back(std::move(c));
    }
    {
        Command c{"sde", "detection-efficiency metrics with uncertainties", {}, {}};
        c.params.number("counts_cps", &sde_p.counts_cps, "measured count rate", true);
        c.params.number("false_cps", &sde_p.false_cps, "false-count rate subtracted");
        c.params.number("power_w", &sde_p.power_w, "optical power at the detector", true);
        c.params.number("wavelength_nm", &sde_p.wavelength_nm, "photon wavelength");
        c.params.number("bias_ua", &sde_p.bias_ua, "bias current, recorded in the output");
        c.params.number("dcr_cps", &sde_p.dcr_cps, "dark-count rate, recorded in the output");
        c.params.number("end_facet_r", &sde_p.end_facet_r,
                        "fiber end-facet reflectance; negative disables");
        c.params.number("end_facet_u", &sde_p.end_facet_u, "its k=1 uncertainty");
        c.params.number("attenuation", &sde_p.attenuation,
                        "attenuation-chain transmission; negative disables");
        c.params.number("attenuation_u", &sde_p.attenuation_u, "its k=1 uncertainty");
        c.params.number("integration_s", &sde_p.integration_s, "counting integration time");
        c.params.number("ps_max", &sde_p.ps_max,
                        "polarization-maximized efficiency; negative skips");
        c.params.number("ps_max_u", &sde_p.ps_max_u, "its k=1 uncertainty");
        c.params.number("ps_min", &sde_p.ps_min,
                        "polarization-minimized efficiency; negative skips");
        c.params.number("ps_min_u", &sde_p.ps_min_u, "its k=1 uncertainty");
        c.params.numbers("budget", &sde_p.budget,
                         "efficiency budget: fiber coupling absorptance registration");
        c.handler = [&](const OutputDir& out, int) { run_sde(sde_p, out); };
        commands.push_back(std::move(c));
    }
    {
        Command c{"optimize", "cavity defect-thickness optimization", {}, {}};
        c.params.number("target_nm", &optimize_p.target_nm, "wavelength to maximize at");
        c.params.number("lo_nm", &optimize_p.lo_nm, "lower half-defect bound");
        c.params.number("hi_nm", &optimize_p.hi_nm, "upper half-defect bound");
        c.params.number("fill_factor", &optimize_p.fill_factor, "wire fill factor");
        c.handler = [&](const OutputDir& out, int) { run_optimize(optimize_p, out); };
        commands.push_back(std::move(c));
    }
    {
        Command c{"reproduce", "canned end-to-end pipelines with fixed inputs", {}, {}};
        c.params.text("pipeline", &reproduce_p.pipeline,
                      "field-profile, crowding-sweep, cavity-spectrum, polarization-ratio, "
                      "or jitter-fit",
                      true, true);
        c.handler = [&](const OutputDir& out, int j) { run_reproduce(reproduce_p, out, j); };
        commands.push_back(std::move(c));
    }

    std::map<std::string, Command*> by_name;
    for (Command& c : commands) {
        CLI::App* sub = app.add_subcommand(c.name, c.help);
        sub->fallthrough();
        sub->configurable();
        c.params.bind(sub);
        by_name[c.name] = &c;
    }
    by_name["geometry"]->params.option("kind")->check(
        CLI::IsMember({"meander", "standard_fractal", "arced_fractal"}));
    by_name["absorptance"]->params.option("device")->check(
        CLI::IsMember({"meander", "standard_fractal", "arced_fractal"}));
    by_name["field"]->params.option("pol")->check(CLI::IsMember({"te", "tm"}));
    by_name["solve-current"]->params.option("layout")->check(CLI::ExistingFile);
    by_name["fit-jitter"]->params.option("histogram")->check(CLI::ExistingFile);
    by_name["sde"]->params.option("budget")->expected(4);
    by_name["reproduce"]->params.option("pipeline")->check(CLI::IsMember(k_pipelines));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
        std::cerr << "error: " << one_line(e.what()) << "\n";
        return k_exit_usage;
    }

    Command* chosen = nullptr;
    if (!from_manifest.empty()) {
        if (!app.get_subcommands().empty())
            throw UsageError("--from-manifest replaces the subcommand; give one or the other");
        json m;
        try {
            m = json::parse(io::read_text_file(from_manifest));
        } catch (const json::exception& e) {
            throw UsageError("cannot parse manifest: " + one_line(e.what()));
        }
        for (const auto& item : m.items())
            if (item.key() != "config" && item.key() != "seed" && item.key() != "subcommand" &&
                item.key() != "tool")
                throw UsageError("unknown key '" + item.key() + "' in manifest");
        if (!m.contains("tool") || m["tool"] != "snspdkit")
            throw UsageError("manifest was not written by this tool");
        if (!m.contains("subcommand") || !m["subcommand"].is_string())
            throw UsageError("manifest is missing a subcommand");
        const auto it = by_name.find(m["subcommand"].get<std::string>());
        if (it == by_name.end())
            throw UsageError("manifest names unknown subcommand '" +
                             m["subcommand"].get<std::string>() + "'");
        if (!m.contains("seed") || !m["seed"].is_number_unsigned())
            throw UsageError("manifest is missing a seed");
        if (!m.contains("config")) throw UsageError("manifest is missing its config");
        chosen = it->second;
        chosen->params.load(m["config"]);
        seed = m["seed"].get<std::uint64_t>();
    } else {
        const auto subs = app.get_subcommands();
        if (subs.size() != 1)
            throw UsageError("exactly one subcommand (or --from-manifest) is required");
        chosen = by_name.at(subs.front()->get_name());
    }

    const OutputDir out(out_dir);
    chosen->handler(out, jobs);

    json manifest;
    manifest["config"] = chosen->params.to_json();
    manifest["seed"] = seed;
    manifest["subcommand"] = chosen->name;
    manifest["tool"] = "snspdkit";
    out.write("manifest.json", dump_json(manifest));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const UsageError& e) {
        std::cerr << "error: " << one_line(e.what()) << "\n";
        return k_exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << one_line(e.what()) << "\n";
        return k_exit_compute;
    }
}
