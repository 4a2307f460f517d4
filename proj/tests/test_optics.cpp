#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "snspd/geometry.hpp"
#include "snspd/optics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

using namespace snspd::optics;

namespace {

/// Constant-index material over a wide wavelength range.
MaterialTable flat(const std::string& name, double n, double k = 0.0) {
    return MaterialTable(name, {200.0, 20000.0}, {n, n}, {k, k});
}

MaterialLib flat_lib(std::initializer_list<std::tuple<std::string, double, double>> mats) {
    MaterialLib lib;
    for (const auto& [name, n, k] : mats) lib.emplace(name, flat(name, n, k));
    return lib;
}

/// Deterministic 64-bit mixer for the randomized property tests.
struct SplitMix {
    std::uint64_t s;
    explicit SplitMix(std::uint64_t seed) : s(seed) {}
    std::uint64_t next() {
        s += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = s;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * (static_cast<double>(next() >> 11) * 0x1.0p-53);
    }
    int integer(int lo, int hi) {  // inclusive
        return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
    }
};

/// Wire-layer absorptance of the standard cavity at one wavelength.
double cavity_wire_a(const LayerStack& stack, double wl) {
    auto r = tmm(stack, wl, Polarization::te);
    for (std::size_t j = 0; j < stack.layers.size(); ++j)
        if (stack.layers[j].grating) return r.layer_absorptance[j];
    FAIL("no grating layer");
    return 0.0;
}

}  // namespace

TEST_CASE("material tables interpolate linearly and refuse bad input") {
    MaterialTable t("demo", {1000.0, 2000.0, 3000.0}, {1.5, 2.5, 2.0}, {0.0, 0.1, 0.3});
    CHECK(t.name() == "demo");
    CHECK(t.size() == 3);
    CHECK(t.min_wavelength() == 1000.0);
    CHECK(t.max_wavelength() == 3000.0);
    CHECK(t.index_at(1000.0) == cdouble(1.5, 0.0));
    CHECK(t.index_at(3000.0) == cdouble(2.0, 0.3));
    auto mid = t.index_at(1500.0);
    CHECK(mid.real() == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(mid.imag() == doctest::Approx(0.05).epsilon(1e-12));

    CHECK_THROWS_AS(static_cast<void>(t.index_at(999.0)), std::out_of_range);
    CHECK_THROWS_AS(static_cast<void>(t.index_at(3000.1)), std::out_of_range);
    CHECK_THROWS_AS(MaterialTable("x", {1000.0}, {1.0}, {0.0}), std::invalid_argument);
    CHECK_THROWS_AS(MaterialTable("x", {2000.0, 1000.0}, {1.0, 1.0}, {0.0, 0.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(MaterialTable("x", {1000.0, 1000.0}, {1.0, 1.0}, {0.0, 0.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(MaterialTable("x", {1000.0, 2000.0}, {1.0, 1.0}, {0.0, -0.1}),
                    std::invalid_argument);
    CHECK_THROWS_AS(MaterialTable("x", {1000.0, 2000.0}, {1.0}, {0.0, 0.0}),
                    std::invalid_argument);
}

TEST_CASE("csv materials parse with or without a header row") {
    auto t = material_from_csv("custom", "wavelength_nm,n,k\n1000,1.5,0\n2000,2.5,0.1\n");
    CHECK(t.size() == 2);
    CHECK(t.index_at(2000.0) == cdouble(2.5, 0.1));
    auto bare = material_from_csv("bare", "1000,1.5,0\n2000,2.5,0.1\n");
    CHECK(bare.size() == 2);
    CHECK_THROWS_AS(static_cast<void>(material_from_csv("empty", "")), std::invalid_argument);
}

TEST_CASE("built-in film indices are quarter-wave at the design wavelength") {
    const auto& lib = builtin_materials();
    for (const char* name : {"air", "sio2", "ta2o5", "si", "nbtin"})
        CHECK(lib.count(name) == 1);

    double lb = bragg_wavelength();
    double n_sio2 = lib.at("sio2").index_at(lb).real();
    double n_ta2o5 = lib.at("ta2o5").index_at(lb).real();
    CHECK(4.0 * 264.0 * n_sio2 == doctest::Approx(lb).epsilon(1e-5));
    CHECK(4.0 * 180.0 * n_ta2o5 == doctest::Approx(lb).epsilon(1e-5));

    // Metal film stays strongly absorbing at telecom wavelengths.
    auto nbtin = lib.at("nbtin").index_at(1550.0);
    CHECK(nbtin.real() == doctest::Approx(5.23).epsilon(0.01));
    CHECK(nbtin.imag() == doctest::Approx(5.82).epsilon(0.01));

    // Silicon is transparent at 1550 nm but absorbs in the visible.
    CHECK(lib.at("si").index_at(1550.0).imag() == 0.0);
    CHECK(lib.at("si").index_at(600.0).imag() > 0.0);
    CHECK(lib.at("si").index_at(1550.0).real() == doctest::Approx(3.48).epsilon(0.01));
}

TEST_CASE("effective permittivities match the two mixing formulas") {
    cdouble em(-10.0, 2.0), eh(2.1, 0.0);
    auto r = emt_indices(0.5, em, eh);
    CHECK(r.eps_parallel.real() == doctest::Approx(-3.95).epsilon(1e-12));
    CHECK(r.eps_parallel.imag() == doctest::Approx(1.0).epsilon(1e-12));
    cdouble expected_perp = 2.0 * em * eh / (em + eh);
    CHECK(std::abs(r.eps_perpendicular - expected_perp) < 1e-12);

    auto full = emt_indices(1.0, em, eh);
    CHECK(std::abs(full.eps_parallel - em) < 1e-15);
    CHECK(std::abs(full.eps_perpendicular - em) < 1e-14);
    auto none = emt_indices(0.0, em, eh);
    CHECK(std::abs(none.eps_parallel - eh) < 1e-15);
    CHECK(std::abs(none.eps_perpendicular - eh) < 1e-14);

    CHECK_THROWS_AS(static_cast<void>(emt_indices(-0.1, em, eh)), std::invalid_argument);
    CHECK_THROWS_AS(static_cast<void>(emt_indices(1.1, em, eh)), std::invalid_argument);
}

TEST_CASE("bare interface reproduces the Fresnel reflectance") {
    auto lib = flat_lib({{"vac", 1.0, 0.0}, {"glass", 1.5, 0.0}});
    LayerStack s;
    s.incidence = "vac";
    s.substrate = "glass";
    auto r = tmm(s, 1550.0, Polarization::te, 0.0, lib);
    CHECK(r.reflectance == doctest::Approx(0.04).epsilon(1e-12));
    CHECK(r.transmittance == doctest::Approx(0.96).epsilon(1e-12));
    CHECK(r.absorptance == doctest::Approx(0.0).epsilon(1e-12));

    // A layer of the substrate material is optically invisible.
    s.layers.push_back({"glass", 500.0, std::nullopt});
    auto r2 = tmm(s, 1550.0, Polarization::te, 0.0, lib);
    CHECK(r2.reflectance == doctest::Approx(0.04).epsilon(1e-12));

    // TE and TM coincide at normal incidence.
    auto rtm = tmm(s, 1550.0, Polarization::tm, 0.0, lib);
    CHECK(rtm.reflectance == doctest::Approx(r2.reflectance).epsilon(1e-12));
}

TEST_CASE("quarter-wave mirror matches the analytic reflectance formula") {
    const double n_l = 1.45, n_h = 2.1, n_sub = 1.52, wl = 1550.0;
    const int pairs = 6;
    auto lib = flat_lib({{"vac", 1.0, 0.0}, {"lo", n_l, 0.0}, {"hi", n_h, 0.0},
                         {"sub", n_sub, 0.0}});
    LayerStack s;
    s.incidence = "vac";
    s.substrate = "sub";
    for (int i = 0; i < pairs; ++i) {
        s.layers.push_back({"lo", wl / (4.0 * n_l), std::nullopt});
        s.layers.push_back({"hi", wl / (4.0 * n_h), std::nullopt});
    }
    s.layers.push_back({"lo", wl / (4.0 * n_l), std::nullopt});

    // Each quarter-wave layer maps the admittance Y to n^2/Y, so the stack
    // seen from the top presents q = (n_l/n_h)^(2N) * n_l^2 / n_sub.
    double q = std::pow(n_l / n_h, 2.0 * pairs) * n_l * n_l / n_sub;
    double r_exact = std::pow((1.0 - q) / (1.0 + q), 2.0);
    auto r = tmm(s, wl, Polarization::te, 0.0, lib);
    CHECK(r.reflectance == doctest::Approx(r_exact).epsilon(1e-6));
    CHECK(r.reflectance > 0.9);
    CHECK(r.transmittance == doctest::Approx(1.0 - r_exact).epsilon(1e-6));
}

TEST_CASE("energy bookkeeping closes on random lossy stacks") {
    SplitMix rng(0x5eedu);
    MaterialLib lib;
    lib.emplace("vac", flat("vac", 1.0));
    const int n_mats = 24;
    for (int i = 0; i < n_mats; ++i) {
        std::string name = "m" + std::to_string(i);
        lib.emplace(name, flat(name, rng.uniform(1.0, 4.0), rng.uniform(0.0, 2.0)));
    }
    int scattering_runs = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        LayerStack s;
        s.incidence = "vac";
        s.substrate = "m" + std::to_string(rng.integer(0, n_mats - 1));
        int nl = rng.integer(1, 8);
        for (int j = 0; j < nl; ++j)
            s.layers.push_back({"m" + std::to_string(rng.integer(0, n_mats - 1)),
                                rng.uniform(1.0, 2500.0), std::nullopt});
        auto pol = rng.integer(0, 1) ? Polarization::te : Polarization::tm;
        double aoi = rng.uniform(0.0, 1.2);
        auto r = tmm(s, rng.uniform(600.0, 5000.0), pol, aoi, lib);
        double sum = r.reflectance + r.transmittance;
        for (double a : r.layer_absorptance) {
            CHECK(a >= -1e-12);
            sum += a;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(r.reflectance >= 0.0);
        CHECK(r.reflectance <= 1.0);
        CHECK(r.transmittance >= 0.0);
        CHECK(r.transmittance <= 1.0);
        CHECK(r.absorptance == doctest::Approx(1.0 - r.reflectance - r.transmittance)
                                   .epsilon(1e-12));
        if (r.method == "scattering") ++scattering_runs;
    }
    // Thick lossy layers must have exercised the stable branch at least once.
    CHECK(scattering_runs > 0);
}

TEST_CASE("matrix and scattering formulations agree where both are stable") {
    SplitMix rng(0xabcdu);
    auto lib = flat_lib({{"vac", 1.0, 0.0}, {"a", 1.9, 0.05}, {"b", 3.2, 0.4},
                         {"sub", 1.5, 0.0}});
    for (int trial = 0; trial < 50; ++trial) {
        LayerStack s;
        s.incidence = "vac";
        s.substrate = "sub";
        int nl = rng.integer(1, 6);
        for (int j = 0; j < nl; ++j)
            s.layers.push_back({rng.integer(0, 1) ? "a" : "b", rng.uniform(5.0, 400.0),
                                std::nullopt});
        double wl = rng.uniform(800.0, 3000.0);
        auto m = tmm(s, wl, Polarization::te, 0.3, lib, TmmMethod::matrix);
        auto sc = tmm(s, wl, Polarization::te, 0.3, lib, TmmMethod::scattering);
        CHECK(m.method == "matrix");
        CHECK(sc.method == "scattering");
        CHECK(m.reflectance == doctest::Approx(sc.reflectance).epsilon(1e-9));
        CHECK(m.transmittance == doctest::Approx(sc.transmittance).epsilon(1e-9));
        for (int j = 0; j < nl; ++j)
            CHECK(m.layer_absorptance[j] ==
                  doctest::Approx(sc.layer_absorptance[j]).epsilon(1e-9));
    }
}

TEST_CASE("thick lossy layers switch to the stable formulation automatically") {
    auto lib = flat_lib({{"vac", 1.0, 0.0}, {"ink", 2.0, 2.0}, {"sub", 1.5, 0.0}});
    LayerStack s;
    s.incidence = "vac";
    s.substrate = "sub";
    s.layers.push_back({"ink", 50000.0, std::nullopt});
    auto r = tmm(s, 1550.0, Polarization::te, 0.0, lib);
    CHECK(r.method == "scattering");
    CHECK(r.transmittance < 1e-30);
    CHECK(r.reflectance + r.absorptance == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::isfinite(r.layer_absorptance[0]));

    LayerStack thin = s;
    thin.layers[0].thickness = 100.0;
    CHECK(tmm(thin, 1550.0, Polarization::te, 0.0, lib).method == "matrix");
}

TEST_CASE("lossless stacks transmit identically from either side") {
    SplitMix rng(0x7157u);
    auto lib = flat_lib({{"left", 1.0, 0.0}, {"a", 1.45, 0.0}, {"b", 2.3, 0.0},
                         {"c", 3.5, 0.0}, {"right", 1.7, 0.0}});
    for (int trial = 0; trial < 50; ++trial) {
        LayerStack fwd;
        fwd.incidence = "left";
        fwd.substrate = "right";
        int nl = rng.integer(1, 7);
        const char* names[3] = {"a", "b", "c"};
        for (int j = 0; j < nl; ++j)
            fwd.layers.push_back({names[rng.integer(0, 2)], rng.uniform(10.0, 900.0),
                                  std::nullopt});
        LayerStack rev = fwd;
        rev.incidence = fwd.substrate;
        rev.substrate = fwd.incidence;
        std::reverse(rev.layers.begin(), rev.layers.end());
        double wl = rng.uniform(700.0, 4000.0);
        auto f = tmm(fwd, wl, Polarization::te, 0.0, lib);
        auto b = tmm(rev, wl, Polarization::te, 0.0, lib);
        CHECK(f.transmittance == doctest::Approx(b.transmittance).epsilon(1e-10));
    }
}

TEST_CASE("zero-thickness layers are optically inert") {
    auto lib = flat_lib({{"vac", 1.0, 0.0}, {"a", 2.0, 0.3}, {"b", 1.4, 0.0},
                         {"sub", 1.5, 0.0}});
    LayerStack s;
    s.incidence = "vac";
    s.substrate = "sub";
    s.layers.push_back({"a", 120.0, std::nullopt});
    s.layers.push_back({"b", 300.0, std::nullopt});
    auto base = tmm(s, 1550.0, Polarization::te, 0.0, lib);
    for (std::size_t pos = 0; pos <= 2; ++pos) {
        LayerStack ins = s;
        ins.layers.insert(ins.layers.begin() + static_cast<long>(pos),
                          Layer{"a", 0.0, std::nullopt});
        auto r = tmm(ins, 1550.0, Polarization::te, 0.0, lib);
        CHECK(r.reflectance == doctest::Approx(base.reflectance).epsilon(1e-12));
        CHECK(r.transmittance == doctest::Approx(base.transmittance).epsilon(1e-12));
        CHECK(r.absorptance == doctest::Approx(base.absorptance).epsilon(1e-12));
    }
}

TEST_CASE("grating fill-factor limits recover the homogeneous layers") {
    auto lib = flat_lib({{"vac", 1.0, 0.0}, {"metal", 4.0, 4.5}, {"host", 1.45, 0.0},
                         {"sub", 3.48, 0.0}});
    auto with_fill = [&](double f, GratingModel orient) {
        LayerStack s;
        s.incidence = "vac";
        s.substrate = "sub";
        s.layers.push_back({"host", 200.0, std::nullopt});
        Layer wire;
        wire.material = "host";
        wire.thickness = 9.0;
        wire.grating = GratingSpec{f, "metal", "host", orient};
        s.layers.push_back(wire);
        s.layers.push_back({"host", 200.0, std::nullopt});
        return tmm(s, 1550.0, Polarization::te, 0.0, lib);
    };
    auto homogeneous = [&](const std::string& mat) {
        LayerStack s;
        s.incidence = "vac";
        s.substrate = "sub";
        s.layers.push_back({"host", 200.0, std::nullopt});
        s.layers.push_back({mat, 9.0, std::nullopt});
        s.layers.push_back({"host", 200.0, std::nullopt});
        return tmm(s, 1550.0, Polarization::te, 0.0, lib);
    };
    auto all_host = homogeneous("host");
    auto all_metal = homogeneous("metal");
    for (auto orient : {GratingModel::parallel, GratingModel::perpendicular,
                        GratingModel::isotropic}) {
        CHECK(with_fill(0.0, orient).reflectance ==
              doctest::Approx(all_host.reflectance).epsilon(1e-9));
        CHECK(with_fill(1.0, orient).reflectance ==
              doctest::Approx(all_metal.reflectance).epsilon(1e-9));
        CHECK(with_fill(1e-10, orient).reflectance ==
              doctest::Approx(all_host.reflectance).epsilon(1e-9));
    }
}

TEST_CASE("tmm rejects invalid inputs") {
    auto lib = flat_lib({{"vac", 1.0, 0.0}, {"a", 2.0, 0.1}, {"sub", 1.5, 0.0},
                         {"tinted", 1.5, 0.2}});
    LayerStack s;
    s.incidence = "vac";
    s.substrate = "sub";
    s.layers.push_back({"a", 100.0, std::nullopt});

    CHECK_THROWS_AS(static_cast<void>(tmm(s, -1.0, Polarization::te, 0.0, lib)),
                    std::invalid_argument);
    CHECK_THROWS_AS(static_cast<void>(tmm(s, 1550.0, Polarization::te, 2.0, lib)),
                    std::invalid_argument);

    LayerStack unknown = s;
    unknown.layers[0].material = "nope";
    CHECK_THROWS_AS(static_cast<void>(tmm(unknown, 1550.0, Polarization::te, 0.0, lib)),
                    std::invalid_argument);

    LayerStack negative = s;
    negative.layers[0].thickness = -5.0;
    CHECK_THROWS_AS(static_cast<void>(tmm(negative, 1550.0, Polarization::te, 0.0, lib)),
                    std::invalid_argument);

    LayerStack lossy_entry = s;
    lossy_entry.incidence = "tinted";
    CHECK_THROWS_AS(static_cast<void>(tmm(lossy_entry, 1550.0, Polarization::te, 0.0, lib)),
                    std::invalid_argument);

    LayerStack two_gratings = s;
    Layer wire;
    wire.material = "a";
    wire.thickness = 9.0;
    wire.grating = GratingSpec{0.3, "a", "a"};
    two_gratings.layers.push_back(wire);
    two_gratings.layers.push_back(wire);
    CHECK_THROWS_AS(static_cast<void>(tmm(two_gratings, 1550.0, Polarization::te, 0.0, lib)),
                    std::invalid_argument);

    // Out-of-table wavelength propagates the range error.
    CHECK_THROWS_AS(static_cast<void>(tmm(s, 50.0, Polarization::te, 0.0, lib)),
                    std::out_of_range);
}

TEST_CASE("standard cavity peaks on design at 1550 nm") {
    auto stack = cavity_stack();
    double best_a = 0.0, best_wl = 0.0;
    for (double wl = 1400.0; wl <= 1700.0; wl += 1.0) {
        double a = cavity_wire_a(stack, wl);
        if (a > best_a) {
            best_a = a;
            best_wl = wl;
        }
    }
    for (double wl = best_wl - 1.0; wl <= best_wl + 1.0; wl += 0.05) {
        double a = cavity_wire_a(stack, wl);
        if (a > best_a) {
            best_a = a;
            best_wl = wl;
        }
    }
    CHECK(best_a >= 0.90);
    CHECK(std::abs(best_wl - 1550.0) <= 15.0);
    CHECK(cavity_wire_a(stack, 1550.0) >= 0.90);

    // Width at half maximum via bisection on each flank.
    double half = best_a / 2.0;
    double lo = 1200.0, hi = best_wl;
    for (int i = 0; i < 60; ++i) {
        double mid = 0.5 * (lo + hi);
        (cavity_wire_a(stack, mid) >= half ? hi : lo) = mid;
    }
    double left = 0.5 * (lo + hi);
    lo = best_wl;
    hi = 1900.0;
    for (int i = 0; i < 60; ++i) {
        double mid = 0.5 * (lo + hi);
        (cavity_wire_a(stack, mid) >= half ? lo : hi) = mid;
    }
    double right = 0.5 * (lo + hi);
    double fwhm = right - left;
    CHECK(fwhm >= 95.0);
    CHECK(fwhm <= 145.0);
}

TEST_CASE("two-orientation device spectra are polarization-blind") {
    std::vector<double> wls;
    for (double wl = 1450.0; wl <= 1650.0; wl += 10.0) wls.push_back(wl);
    auto spec = device_absorptance(cavity_stack(), snspd::geom::PathKind::standard_fractal, wls);
    REQUIRE(spec.te.size() == wls.size());
    REQUIRE(spec.tm.size() == wls.size());
    for (std::size_t i = 0; i < wls.size(); ++i) {
        // Bit-identical, not merely close.
        CHECK(spec.te[i].wire_absorptance == spec.tm[i].wire_absorptance);
        CHECK(spec.te[i].reflectance == spec.tm[i].reflectance);
        CHECK(spec.te[i].transmittance == spec.tm[i].transmittance);
        CHECK(spec.te[i].absorptance == spec.tm[i].absorptance);
        CHECK(spec.te[i].reflectance + spec.te[i].transmittance + spec.te[i].absorptance ==
              doctest::Approx(1.0).epsilon(1e-9));
    }
    auto ratio = polarization_ratio(spec);
    for (const auto& p : ratio) {
        CHECK(p.defined);
        CHECK(p.ratio == 1.0);
    }
}

TEST_CASE("meander devices prefer the field along the wires") {
    auto spec = device_absorptance(cavity_stack(), snspd::geom::PathKind::meander, {1550.0});
    CHECK(spec.te[0].wire_absorptance > spec.tm[0].wire_absorptance);

    // The preference strengthens toward longer wavelengths.
    std::vector<double> wls = {1300.0, 2000.0, 3000.0, 4000.0, 5000.0};
    auto sweep = device_absorptance(cavity_stack(), snspd::geom::PathKind::meander, wls);
    auto ratio = polarization_ratio(sweep);
    for (std::size_t i = 1; i < ratio.size(); ++i) {
        CHECK(ratio[i].defined);
        CHECK(ratio[i].ratio > ratio[i - 1].ratio);
    }
    CHECK(ratio.front().ratio > 1.0);
}

TEST_CASE("polarization ratio flags vanishing denominators") {
    Spectrum spec;
    spec.te.push_back({1550.0, 0.1, 0.2, 0.7, 0.5});
    spec.tm.push_back({1550.0, 0.1, 0.2, 0.7, 0.0});
    auto ratio = polarization_ratio(spec);
    REQUIRE(ratio.size() == 1);
    CHECK(!ratio[0].defined);

    spec.tm[0].wavelength = 1551.0;
    CHECK_THROWS_AS(static_cast<void>(polarization_ratio(spec)), std::invalid_argument);
    spec.tm.push_back({1552.0, 0.1, 0.2, 0.7, 0.3});
    CHECK_THROWS_AS(static_cast<void>(polarization_ratio(spec)), std::invalid_argument);
}

TEST_CASE("bare-interface field profile matches the analytic standing wave") {
    auto lib = flat_lib({{"vac", 1.0, 0.0}, {"sub", 1.5, 0.0}});
    LayerStack s;
    s.incidence = "vac";
    s.substrate = "sub";
    const double wl = 1550.0;
    const double r_amp = (1.0 - 1.5) / (1.0 + 1.5);
    const double t_amp = 1.0 + r_amp;
    std::vector<double> zs;
    for (double z = -800.0; z <= 300.0; z += 7.0) zs.push_back(z);
    auto prof = field_profile(s, wl, zs, Polarization::te, lib);
    REQUIRE(prof.size() == zs.size());
    for (std::size_t i = 0; i < zs.size(); ++i) {
        double z = zs[i];
        double expected;
        if (z < 0.0) {
            double phi = 2.0 * M_PI * z / wl;
            expected = 1.0 + r_amp * r_amp + 2.0 * r_amp * std::cos(2.0 * phi);
        } else {
            expected = t_amp * t_amp;
        }
        CHECK(prof[i].intensity == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("a strongly absorbing mirror pins a field node at its surface") {
    auto lib = flat_lib({{"vac", 1.0, 0.0}, {"mirror", 0.1, 1000.0}});
    LayerStack s;
    s.incidence = "vac";
    s.substrate = "mirror";
    auto prof = field_profile(s, 1550.0, {0.0, -387.5}, Polarization::te, lib);
    CHECK(prof[0].intensity < 1e-3);           // node at the surface
    CHECK(prof[1].intensity > 3.9);            // antinode a quarter wave out
}

TEST_CASE("cavity field maximum sits at the middle of the defect layer") {
    auto bare = cavity_stack(0.31, false);
    double z_lo = 0.0, z_hi = 0.0, z = 0.0;
    for (std::size_t j = 0; j < bare.layers.size(); ++j) {
        if (j == 6) z_lo = z;
        z += bare.layers[j].thickness;
        if (j == 6) z_hi = z;
    }
    double total = z;
    REQUIRE(z_hi - z_lo == doctest::Approx(529.0));

    std::vector<double> zs;
    for (double p = -200.0; p <= total + 200.0; p += 0.5) zs.push_back(p);
    auto prof = field_profile(bare, 1550.0, zs);
    double best_i = 0.0, best_z = 0.0;
    for (const auto& pt : prof)
        if (pt.intensity > best_i) {
            best_i = pt.intensity;
            best_z = pt.z;
        }
    CHECK(best_z > z_lo);
    CHECK(best_z < z_hi);
    CHECK(std::abs(best_z - 0.5 * (z_lo + z_hi)) <= 20.0);
    CHECK(best_i > 10.0);  // strong cavity enhancement

    // Tangential field is continuous across every interface.
    double edge = 0.0;
    for (std::size_t j = 0; j + 1 < bare.layers.size(); ++j) {
        edge += bare.layers[j].thickness;
        auto pair = field_profile(bare, 1550.0, {edge - 1e-7, edge + 1e-7});
        CHECK(pair[0].intensity == doctest::Approx(pair[1].intensity).epsilon(1e-6));
    }

    // Wire layers must be replaced by host material before profiling.
    CHECK_THROWS_AS(static_cast<void>(field_profile(cavity_stack(), 1550.0, {0.0})),
                    std::invalid_argument);
}

TEST_CASE("defect-thickness optimization lands on the designed cavity") {
    OptimizeSpec spec;
    spec.stack = cavity_stack();
    spec.free_layers = {6};
    spec.ties = {{8}};  // both defect halves move together
    spec.bounds = {{150.0, 350.0}};
    spec.target_wavelength = 1550.0;
    auto r = optimize_stack(spec);
    CHECK(!r.degenerate);
    double total_defect = 2.0 * r.thicknesses[0] + 9.0;
    CHECK(std::abs(total_defect - 529.0) <= 30.0);
    CHECK(r.achieved >= 0.90);
    CHECK(r.stack.layers[6].thickness == r.thicknesses[0]);
    CHECK(r.stack.layers[8].thickness == r.thicknesses[0]);

    // Determinism: a rerun reproduces the same answer bit for bit.
    auto r2 = optimize_stack(spec);
    CHECK(r2.thicknesses[0] == r.thicknesses[0]);
    CHECK(r2.achieved == r.achieved);
}

TEST_CASE("optimizing a lossless stack reports degeneracy") {
    OptimizeSpec spec;
    spec.stack = cavity_stack();
    spec.stack.layers[7].grating->metal = "sio2";  // wires replaced by host: nothing absorbs
    spec.free_layers = {6};
    spec.ties = {{8}};
    spec.bounds = {{150.0, 350.0}};
    spec.target_wavelength = 1550.0;
    auto r = optimize_stack(spec);
    CHECK(r.degenerate);
    CHECK(r.achieved < 1e-12);
}

TEST_CASE("two-parameter optimization agrees with an exhaustive grid") {
    auto lib = flat_lib({{"vac", 1.0, 0.0}, {"metal", 4.0, 4.5}, {"host", 1.45, 0.0},
                         {"sub", 3.48, 0.0}});
    LayerStack s;
    s.incidence = "vac";
    s.substrate = "sub";
    s.layers.push_back({"host", 300.0, std::nullopt});
    Layer wire;
    wire.material = "host";
    wire.thickness = 9.0;
    wire.grating = GratingSpec{0.31, "metal", "host", GratingModel::isotropic};
    s.layers.push_back(wire);
    s.layers.push_back({"host", 300.0, std::nullopt});

    const double lo = 50.0, hi = 550.0, wl = 1550.0;
    double brute_best = -1.0, brute_d0 = 0.0, brute_d2 = 0.0;
    for (int i = 0; i <= 100; ++i)
        for (int j = 0; j <= 100; ++j) {
            LayerStack probe = s;
            probe.layers[0].thickness = lo + (hi - lo) * i / 100.0;
            probe.layers[2].thickness = lo + (hi - lo) * j / 100.0;
            auto r = tmm(probe, wl, Polarization::te, 0.0, lib);
            if (r.layer_absorptance[1] > brute_best) {
                brute_best = r.layer_absorptance[1];
                brute_d0 = probe.layers[0].thickness;
                brute_d2 = probe.layers[2].thickness;
            }
        }

    OptimizeSpec spec;
    spec.stack = s;
    spec.free_layers = {0, 2};
    spec.bounds = {{lo, hi}, {lo, hi}};
    spec.target_wavelength = wl;
    auto r = optimize_stack(spec, lib);
    const double cell = (hi - lo) / 100.0;
    CHECK(std::abs(r.thicknesses[0] - brute_d0) <= cell);
    CHECK(std::abs(r.thicknesses[1] - brute_d2) <= cell);
    CHECK(r.achieved >= brute_best - 1e-9);
}

TEST_CASE("optimizer validates its inputs") {
    OptimizeSpec spec;
    spec.stack = cavity_stack();
    spec.target_wavelength = 1550.0;
    CHECK_THROWS_AS(static_cast<void>(optimize_stack(spec)), std::invalid_argument);

    spec.free_layers = {6};
    spec.bounds = {{350.0, 150.0}};  // reversed
    CHECK_THROWS_AS(static_cast<void>(optimize_stack(spec)), std::invalid_argument);

    spec.bounds = {{150.0, 350.0}};
    spec.ties = {{99}};
    CHECK_THROWS_AS(static_cast<void>(optimize_stack(spec)), std::invalid_argument);

    spec.ties.clear();
    spec.free_layers = {0, 1, 2, 3, 4, 5, 6};
    spec.bounds.assign(7, {150.0, 350.0});
    CHECK_THROWS_AS(static_cast<void>(optimize_stack(spec)), std::invalid_argument);

    OptimizeSpec no_wire;
    no_wire.stack = cavity_stack(0.31, false);
    no_wire.free_layers = {6};
    no_wire.bounds = {{150.0, 350.0}};
    no_wire.target_wavelength = 1550.0;
    CHECK_THROWS_AS(static_cast<void>(optimize_stack(no_wire)), std::invalid_argument);
}

TEST_CASE("stack files parse records and reject malformed lines") {
    std::string text =
        "# comment line\n"
        "incidence air\n"
        "substrate si\n"
        "layer sio2 264\n"
        "grating nbtin sio2 9 fill=0.31 orient=isotropic\n"
        "layer sio2 260  # trailing comment\n";
    auto s = parse_stack_file(text);
    CHECK(s.incidence == "air");
    CHECK(s.substrate == "si");
    REQUIRE(s.layers.size() == 3);
    CHECK(s.layers[0].material == "sio2");
    CHECK(s.layers[0].thickness == 264.0);
    REQUIRE(s.layers[1].grating.has_value());
    CHECK(s.layers[1].grating->fill_factor == 0.31);
    CHECK(s.layers[1].grating->metal == "nbtin");
    CHECK(s.layers[1].grating->orientation == GratingModel::isotropic);
    CHECK(s.layers[2].thickness == 260.0);

    auto par = parse_stack_file("substrate si\ngrating nbtin sio2 9 fill=0.31 orient=parallel\n");
    CHECK(par.layers[0].grating->orientation == GratingModel::parallel);
    auto def = parse_stack_file("substrate si\ngrating nbtin sio2 9 fill=0.31\n");
    CHECK(def.layers[0].grating->orientation == GratingModel::isotropic);

    CHECK_THROWS_AS(static_cast<void>(parse_stack_file("layer sio2 100\n")),
                    std::invalid_argument);  // missing substrate
    CHECK_THROWS_AS(static_cast<void>(parse_stack_file("substrate si\nbogus 1 2\n")),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        static_cast<void>(parse_stack_file("substrate si\ngrating nbtin sio2 9 fill=0.31 orient=up\n")),
        std::invalid_argument);
    CHECK_THROWS_AS(static_cast<void>(parse_stack_file("substrate si\nlayer sio2\n")),
                    std::invalid_argument);
}

TEST_CASE("full stack transmission example from parsed text matches the builder") {
    std::string text =
        "incidence air\n"
        "substrate si\n";
    for (int i = 0; i < 3; ++i) text += "layer sio2 264\nlayer ta2o5 180\n";
    text += "layer sio2 260\ngrating nbtin sio2 9 fill=0.31\nlayer sio2 260\n";
    for (int i = 0; i < 6; ++i) text += "layer ta2o5 180\nlayer sio2 264\n";
    auto parsed = parse_stack_file(text);
    auto built = cavity_stack();
    REQUIRE(parsed.layers.size() == built.layers.size());
    auto rp = tmm(parsed, 1550.0, Polarization::te);
    auto rb = tmm(built, 1550.0, Polarization::te);
    CHECK(rp.reflectance == rb.reflectance);
    CHECK(rp.transmittance == rb.transmittance);
    CHECK(rp.absorptance == rb.absorptance);
}
