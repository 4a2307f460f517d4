#include "snspd/optics.hpp"

#include "snspd/io.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace snspd::optics {

MaterialTable::MaterialTable(std::string name, std::vector<double> wavelength_nm,
                             std::vector<double> n, std::vector<double> k)
    : name_(std::move(name)), wl_(std::move(wavelength_nm)), n_(std::move(n)), k_(std::move(k)) {
    if (wl_.size() < 2 || wl_.size() != n_.size() || wl_.size() != k_.size())
        throw std::invalid_argument("material table needs >= 2 aligned samples");
    for (std::size_t i = 0; i + 1 < wl_.size(); ++i)
        if (!(wl_[i] < wl_[i + 1]))
            throw std::invalid_argument("material wavelengths must be strictly increasing");
    for (double kk : k_)
        if (kk < 0.0) throw std::invalid_argument("extinction coefficient must be >= 0");
}

cdouble MaterialTable::index_at(double wavelength_nm) const {
    if (wl_.empty()) throw std::logic_error("empty material table");
    if (wavelength_nm < wl_.front() || wavelength_nm > wl_.back())
        throw std::out_of_range("material '" + name_ + "': wavelength " +
                                io::fmt_fixed(wavelength_nm, 1) + " nm outside table range [" +
                                io::fmt_fixed(wl_.front(), 1) + ", " + io::fmt_fixed(wl_.back(), 1) +
                                "]");
    auto it = std::upper_bound(wl_.begin(), wl_.end(), wavelength_nm);
    std::size_t hi = std::min<std::size_t>(wl_.size() - 1,
                                           static_cast<std::size_t>(it - wl_.begin()));
    if (hi == 0) hi = 1;
    std::size_t lo = hi - 1;
    double t = (wavelength_nm - wl_[lo]) / (wl_[hi] - wl_[lo]);
    return {n_[lo] + t * (n_[hi] - n_[lo]), k_[lo] + t * (k_[hi] - k_[lo])};
}

MaterialTable material_from_csv(const std::string& name, const std::string& csv_text) {
    auto rows = io::parse_csv(csv_text);
    std::vector<double> wl, n, k;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].empty()) continue;
        // Allow one header row of column names.
        if (r == 0 && !rows[r].empty()) {
            char c = rows[r][0].empty() ? '\0' : rows[r][0][0];
            if (!std::isdigit(static_cast<unsigned char>(c)) && c != '-' && c != '.') continue;
        }
        if (rows[r].size() < 3)
            throw std::invalid_argument("material CSV rows need wavelength_nm, n, k");
        wl.push_back(std::stod(rows[r][0]));
        n.push_back(std::stod(rows[r][1]));
        k.push_back(std::stod(rows[r][2]));
    }
    return {name, std::move(wl), std::move(n), std::move(k)};
}

namespace {

constexpr double kMinWl = 500.0, kMaxWl = 5500.0;  // nm
constexpr int kSamples = 201;

/// Fused-silica Sellmeier (wavelength in um).
double sio2_model(double um) {
    double l2 = um * um;
    double n2 = 1.0 + 0.6961663 * l2 / (l2 - 0.0684043 * 0.0684043) +
                0.4079426 * l2 / (l2 - 0.1162414 * 0.1162414) +
                0.8974794 * l2 / (l2 - 9.896161 * 9.896161);
    return std::sqrt(n2);
}

/// Single-oscillator Sellmeier for the pentoxide film (wavelength in um).
double ta2o5_model(double um) {
    double l2 = um * um;
    double n2 = 1.0 + 3.348 * l2 / (l2 - 0.2433 * 0.2433);
    return std::sqrt(n2);
}

/// Crystalline-silicon Sellmeier (wavelength in um).
double si_model(double um) {
    double l2 = um * um;
    double n2 = 11.6858 + 0.939816 / l2 + 0.00810461 * l2 / (l2 - 1.1071);
    return std::sqrt(n2);
}

/// Interband absorption tail of silicon below 1.2 um, linear-interpolated.
double si_k(double nm) {
    static const double tab[][2] = {
        {500.0, 0.0442}, {550.0, 0.0306}, {600.0, 0.0198}, {650.0, 0.0145},
        {700.0, 0.0106}, {750.0, 0.0078}, {800.0, 0.0054}, {850.0, 0.0036},
        {900.0, 0.0022}, {950.0, 0.0012}, {1000.0, 5.1e-4}, {1050.0, 1.4e-4},
        {1100.0, 2.4e-5}, {1150.0, 2.4e-6}, {1200.0, 0.0},
    };
    if (nm >= 1200.0) return 0.0;
    for (std::size_t i = 0; i + 1 < std::size(tab); ++i) {
        if (nm <= tab[i + 1][0]) {
            double t = (nm - tab[i][0]) / (tab[i + 1][0] - tab[i][0]);
            return tab[i][1] + t * (tab[i + 1][1] - tab[i][1]);
        }
    }
    return 0.0;
}

/// Large-damping Drude permittivity of the superconducting film at room
/// state, anchored to n = 5.23, k = 5.82 at 1550 nm.
cdouble nbtin_eps(double nm) {
    const double eps_inf = 5.835;
    const double wp2 = 4.623e32;  // rad^2/s^2
    const double gamma = 6.0e15;  // rad/s
    const double c = 2.99792458e17;  // nm/s
    double w = 2.0 * M_PI * c / nm;
    cdouble den(w * w, gamma * w);
    return cdouble(eps_inf, 0.0) - wp2 / den;
}

MaterialTable sampled(const std::string& name, double (*n_of_um)(double), double scale,
                      double (*k_of_nm)(double)) {
    std::vector<double> wl(kSamples), n(kSamples), k(kSamples);
    for (int i = 0; i < kSamples; ++i) {
        double nm = kMinWl + (kMaxWl - kMinWl) * i / (kSamples - 1);
        wl[i] = nm;
        n[i] = scale * n_of_um(nm * 1e-3);
        k[i] = k_of_nm ? k_of_nm(nm) : 0.0;
    }
    return {name, std::move(wl), std::move(n), std::move(k)};
}

MaterialTable nbtin_table() {
    std::vector<double> wl(kSamples), n(kSamples), k(kSamples);
    for (int i = 0; i < kSamples; ++i) {
        double nm = kMinWl + (kMaxWl - kMinWl) * i / (kSamples - 1);
        cdouble nk = std::sqrt(nbtin_eps(nm));
        if (nk.real() < 0.0) nk = -nk;
        wl[i] = nm;
        n[i] = nk.real();
        k[i] = nk.imag();
    }
    return {"nbtin", std::move(wl), std::move(n), std::move(k)};
}

}  // namespace

double bragg_wavelength() {
    // Design wavelength of the mirror pairs: the film indices below make the
    // standard 264 nm / 180 nm layers exactly quarter-wave here, and the
    // assembled cavity then peaks at 1550 nm.
    return 1552.7;
}

const MaterialLib& builtin_materials() {
    static const MaterialLib lib = [] {
        MaterialLib m;
        double lb = bragg_wavelength();
        // Anchor the film indices so the mirror thicknesses are quarter-wave
        // at the design wavelength: n = lambda / (4 d).
        double s_sio2 = (lb / (4.0 * 264.0)) / sio2_model(lb * 1e-3);
        double s_ta2o5 = (lb / (4.0 * 180.0)) / ta2o5_model(lb * 1e-3);
        m.emplace("air", MaterialTable("air", {kMinWl, kMaxWl}, {1.0, 1.0}, {0.0, 0.0}));
        m.emplace("sio2", sampled("sio2", &sio2_model, s_sio2, nullptr));
        m.emplace("ta2o5", sampled("ta2o5", &ta2o5_model, s_ta2o5, nullptr));
        m.emplace("si", sampled("si", &si_model, 1.0, &si_k));
        m.emplace("nbtin", nbtin_table());
        return m;
    }();
    return lib;
}

}  // namespace snspd::optics
