#pragma once

#include "snspd/geometry.hpp"

#include <complex>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace snspd::optics {

using cdouble = std::complex<double>;

/// Tabulated complex refractive index, linearly interpolated in (n, k).
/// Queries outside the tabulated range throw instead of extrapolating.
class MaterialTable {
public:
    MaterialTable() = default;
    MaterialTable(std::string name, std::vector<double> wavelength_nm,
                  std::vector<double> n, std::vector<double> k);

    [[nodiscard]] const std::string& name() const { return name_; }
    [[nodiscard]] double min_wavelength() const { return wl_.front(); }
    [[nodiscard]] double max_wavelength() const { return wl_.back(); }
    [[nodiscard]] std::size_t size() const { return wl_.size(); }

    /// n + i k at the given wavelength (k >= 0 means absorbing).
    [[nodiscard]] cdouble index_at(double wavelength_nm) const;

private:
    std::string name_;
    std::vector<double> wl_, n_, k_;
};

/// Parse a material table from CSV text with columns wavelength_nm, n, k.
[[nodiscard]] MaterialTable material_from_csv(const std::string& name,
                                              const std::string& csv_text);

using MaterialLib = std::map<std::string, MaterialTable>;

/// Built-in tables for air, sio2, ta2o5, si, and nbtin over 500-5500 nm.
[[nodiscard]] const MaterialLib& builtin_materials();

/// Design wavelength at which the built-in sio2/ta2o5 film indices make the
/// standard mirror layers exactly quarter-wave.
[[nodiscard]] double bragg_wavelength();

enum class Polarization { te, tm };
[[nodiscard]] std::string to_string(Polarization p);

/// Orientation of a wire-grating layer relative to the incident field axis.
enum class GratingModel {
    parallel,       // E along the wires: eps = f*eps_metal + (1-f)*eps_host
    perpendicular,  // E across the wires: 1/eps = f/eps_metal + (1-f)/eps_host
    isotropic,      // wires split between both axes: eps = (par + perp) / 2
};

struct GratingSpec {
    double fill_factor = 0.0;      // wire width / pitch
    std::string metal;             // material name of the wires
    std::string host;              // material name between the wires
    GratingModel orientation = GratingModel::isotropic;
};

struct Layer {
    std::string material;          // ignored when grating is set
    double thickness = 0.0;        // nm
    std::optional<GratingSpec> grating;
};

struct LayerStack {
    std::string incidence = "air";  // semi-infinite entry medium
    std::string substrate;          // semi-infinite exit medium
    std::vector<Layer> layers;      // ordered from the incidence side
};

/// Effective permittivities of a sub-wavelength wire grating:
/// field along the wires and field across the wires.
struct EmtResult {
    cdouble eps_parallel;
    cdouble eps_perpendicular;
};
[[nodiscard]] EmtResult emt_indices(double fill_factor, cdouble eps_metal, cdouble eps_host);

enum class TmmMethod { automatic, matrix, scattering };

struct TmmResult {
    double reflectance = 0.0;
    double transmittance = 0.0;
    double absorptance = 0.0;               // total, = 1 - R - T
    std::vector<double> layer_absorptance;  // one entry per stack layer
    std::string method;                     // "matrix" or "scattering"
};

/// Reflectance, transmittance, and per-layer absorptance of a planar stack.
/// A grating layer is homogenized per its own orientation field.
[[nodiscard]] TmmResult tmm(const LayerStack& stack, double wavelength_nm,
                            Polarization pol, double aoi_rad = 0.0,
                            const MaterialLib& lib = builtin_materials(),
                            TmmMethod method = TmmMethod::automatic);

struct SpectrumPoint {
    double wavelength = 0.0;  // nm
    double reflectance = 0.0;
    double transmittance = 0.0;
    double absorptance = 0.0;
    double wire_absorptance = 0.0;  // the grating layer's share
};

struct Spectrum {
    std::vector<SpectrumPoint> te;
    std::vector<SpectrumPoint> tm;
};

/// Absorptance spectra of a patterned-wire device for both incident
/// polarizations. Meander wires commit to one orientation, so TE and TM see
/// the parallel and perpendicular permittivities respectively; fractal wires
/// split equally between two orthogonal orientations, so every incident
/// polarization sees the same isotropic mix and TE == TM exactly. The stack's
/// own grating orientation is overridden to match the device kind.
[[nodiscard]] Spectrum device_absorptance(const LayerStack& stack, geom::PathKind kind,
                                          const std::vector<double>& wavelengths_nm,
                                          const MaterialLib& lib = builtin_materials());

struct FieldPoint {
    double z = 0.0;          // nm, measured from the top surface into the stack
    double intensity = 0.0;  // |E|^2 relative to the incident field
};

/// Standing-wave intensity |E(z)|^2 through the stack at normal incidence.
/// z < 0 lies in the incidence medium, z beyond the total thickness in the
/// substrate.
[[nodiscard]] std::vector<FieldPoint> field_profile(const LayerStack& stack,
                                                    double wavelength_nm,
                                                    const std::vector<double>& z_nm,
                                                    Polarization pol = Polarization::te,
                                                    const MaterialLib& lib = builtin_materials());

struct RatioPoint {
    double wavelength = 0.0;
    double ratio = 0.0;
    bool defined = true;  // false where A_TM == 0
};

/// Pointwise A_TE / A_TM of two spectra on identical wavelength grids.
[[nodiscard]] std::vector<RatioPoint> polarization_ratio(const Spectrum& spec);

struct OptimizeSpec {
    LayerStack stack;
    std::vector<std::size_t> free_layers;            // indices into stack.layers
    std::vector<std::pair<double, double>> bounds;   // nm, one per free layer
    double target_wavelength = 0.0;                  // nm
    Polarization pol = Polarization::te;
    /// Optional linked layers: ties[i] lists extra layer indices that follow
    /// free layer i, e.g. the two halves of a split defect moving together.
    std::vector<std::vector<std::size_t>> ties;
};

struct OptimizeResult {
    LayerStack stack;                 // with optimized thicknesses applied
    std::vector<double> thicknesses;  // one per free layer
    double achieved = 0.0;            // wire absorptance at the target
    bool degenerate = false;          // nothing absorbs; objective was flat
};

/// Maximize the grating layer's absorptance at one wavelength over a small
/// set of layer thicknesses: coordinate grid refinement, then a Nelder-Mead
/// polish. Deterministic.
[[nodiscard]] OptimizeResult optimize_stack(const OptimizeSpec& spec,
                                            const MaterialLib& lib = builtin_materials());

/// The micro-cavity used throughout: (sio2 264 / ta2o5 180) x 3 on top,
/// a 529 nm sio2 defect with the 9 nm wire layer at its center, and
/// (ta2o5 180 / sio2 264) x 6 below, on a silicon substrate.
[[nodiscard]] LayerStack cavity_stack(double fill_factor = 0.31,
                                      bool with_wires = true);

/// Parse a stack description: one record per line,
///   incidence <material>
///   substrate <material>
///   layer <material> <thickness_nm>
///   grating <metal> <host> <thickness_nm> fill=<f> [orient=parallel|perpendicular|isotropic]
/// Blank lines and lines starting with '#' are ignored.
[[nodiscard]] LayerStack parse_stack_file(const std::string& text);

}  // namespace snspd::optics
