#include "snspd/analysis.hpp"

#include "snspd/io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace snspd::analysis {

namespace {

constexpr double k_pi = 3.141592653589793238462643;
constexpr double k_planck = 6.62607015e-34;  // J s
constexpr double k_c = 299792458.0;          // m / s

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

/// log(erfc(x)) without underflow: erfc itself down to x = 25, then the
/// asymptotic expansion erfc(x) ~ exp(-x^2) / (x sqrt(pi)) * (1 - 1/(2x^2) + ...).
double log_erfc(double x) {
    if (x < 25.0) return std::log(std::erfc(x));
    const double ix2 = 1.0 / (x * x);
    const double series = 1.0 + ix2 * (-0.5 + ix2 * (0.75 + ix2 * -1.875));
    return -x * x - std::log(x * std::sqrt(k_pi)) + std::log(series);
}

void check_params(const EmgParams& p) {
    require(std::isfinite(p.mu), "mu must be finite");
    require(p.sigma > 0.0, "sigma must be positive");
    require(p.tau > 0.0, "tau must be positive");
}

}  // namespace

double emg_pdf(const EmgParams& p, double t_ps) {
    check_params(p);
    const double ratio = p.sigma / p.tau;
    const double x = (t_ps - p.mu) / p.sigma;
    const double u = (ratio - x) / std::sqrt(2.0);
    const double z = 0.5 * ratio * ratio - x * ratio;
    const double log_f = -std::log(2.0 * p.tau) + z + log_erfc(u);
    return std::exp(log_f);
}

double emg_fwhm(const EmgParams& p) {
    check_params(p);
    const auto f = [&p](double t) { return emg_pdf(p, t); };

    // Locate the mode: coarse scan over the support, then ternary refinement.
    const double lo0 = p.mu - 4.0 * p.sigma;
    const double hi0 = p.mu + 4.0 * p.sigma + 6.0 * p.tau;
    const int n_scan = 4096;
    double best_t = p.mu;
    double best_f = -1.0;
    for (int i = 0; i <= n_scan; ++i) {
        const double t = lo0 + (hi0 - lo0) * i / n_scan;
        const double v = f(t);
        if (v > best_f) {
            best_f = v;
            best_t = t;
        }
    }
    const double cell = (hi0 - lo0) / n_scan;
    double a = best_t - cell;
    double b = best_t + cell;
    for (int i = 0; i < 200; ++i) {
        const double m1 = a + (b - a) / 3.0;
        const double m2 = b - (b - a) / 3.0;
        if (f(m1) < f(m2))
            a = m1;
        else
            b = m2;
    }
    const double t_mode = 0.5 * (a + b);
    const double half = 0.5 * f(t_mode);

    const auto cross = [&](double inside, double outside) {
        double step = p.sigma + p.tau;
        while (f(outside) >= half) {
            outside += (outside - inside < 0 ? -step : step);
            step *= 2.0;
            require(std::isfinite(outside), "half-maximum crossing not found");
        }
        double lo = inside;
        double hi = outside;
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (f(mid) >= half)
                lo = mid;
            else
                hi = mid;
            if (std::fabs(hi - lo) < 1e-13 * (p.sigma + p.tau)) break;
        }
        return 0.5 * (lo + hi);
    };
    const double left = cross(t_mode, t_mode - p.sigma);
    const double right = cross(t_mode, t_mode + p.sigma + p.tau);
    return right - left;
}

Histogram parse_histogram_csv(const std::string& text) {
    Histogram h;
    std::istringstream in(text);
    std::string line;
    std::vector<double> starts;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        double start = 0.0;
        double count = 0.0;
        if (std::sscanf(line.c_str(), "%lf , %lf", &start, &count) != 2)
            throw std::invalid_argument("histogram line " + std::to_string(line_no) +
                                        ": expected 'bin_start_ps,count'");
        if (count < 0.0)
            throw std::invalid_argument("histogram line " + std::to_string(line_no) +
                                        ": negative count");
        starts.push_back(start);
        h.counts.push_back(count);
    }
    require(starts.size() >= 2, "histogram needs at least two bins");
    const double width = starts[1] - starts[0];
    require(width > 0.0, "bin starts must increase");
    for (std::size_t i = 1; i < starts.size(); ++i) {
        const double w = starts[i] - starts[i - 1];
        require(std::fabs(w - width) <= 1e-9 * width, "bins must be uniform");
    }
    h.edges = starts;
    h.edges.push_back(starts.back() + width);
    return h;
}

namespace {

struct FitWork {
    std::vector<double> centers;
    std::vector<double> counts;
    std::vector<double> weights;
    double bin_width = 0.0;

    [[nodiscard]] double model(const std::array<double, 4>& th, std::size_t i) const {
        const EmgParams p{th[0], th[1], th[2], 1.0};
        return th[3] * bin_width * emg_pdf(p, centers[i]);
    }

    [[nodiscard]] double chi2(const std::array<double, 4>& th) const {
        double s = 0.0;
        for (std::size_t i = 0; i < centers.size(); ++i) {
            const double r = counts[i] - model(th, i);
            s += weights[i] * r * r;
        }
        return s;
    }
};

bool solve4(std::array<std::array<double, 4>, 4>& m, std::array<double, 4>& b) {
    for (int col = 0; col < 4; ++col) {
        int piv = col;
        for (int r = col + 1; r < 4; ++r)
            if (std::fabs(m[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)]) >
                std::fabs(m[static_cast<std::size_t>(piv)][static_cast<std::size_t>(col)]))
                piv = r;
        if (m[static_cast<std::size_t>(piv)][static_cast<std::size_t>(col)] == 0.0) return false;
        std::swap(m[static_cast<std::size_t>(col)], m[static_cast<std::size_t>(piv)]);
        std::swap(b[static_cast<std::size_t>(col)], b[static_cast<std::size_t>(piv)]);
        for (int r = col + 1; r < 4; ++r) {
            const double f = m[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] /
                             m[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)];
            for (int c = col; c < 4; ++c)
                m[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] -=
                    f * m[static_cast<std::size_t>(col)][static_cast<std::size_t>(c)];
            b[static_cast<std::size_t>(r)] -= f * b[static_cast<std::size_t>(col)];
        }
    }
    for (int r = 3; r >= 0; --r) {
        double s = b[static_cast<std::size_t>(r)];
        for (int c = r + 1; c < 4; ++c)
            s -= m[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] *
                 b[static_cast<std::size_t>(c)];
        b[static_cast<std::size_t>(r)] = s / m[static_cast<std::size_t>(r)][static_cast<std::size_t>(r)];
    }
    return true;
}

constexpr double k_floor_sigma = 1e-3;  // ps
constexpr double k_floor_tau = 1e-3;    // ps
constexpr double k_floor_amp = 1e-9;

void clamp(std::array<double, 4>& th) {
    th[1] = std::max(th[1], k_floor_sigma);
    th[2] = std::max(th[2], k_floor_tau);
    th[3] = std::max(th[3], k_floor_amp);
}

}  // namespace

EmgFit fit_emg(const Histogram& h) {
    require(h.edges.size() == h.counts.size() + 1, "edges must outnumber counts by one");
    require(h.edges.size() >= 3, "histogram needs at least two bins");
    const double width = h.edges[1] - h.edges[0];
    require(width > 0.0, "edges must increase");
    std::size_t nonzero = 0;
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < h.edges.size(); ++i) {
        require(h.edges[i + 1] > h.edges[i], "edges must increase");
        require(std::fabs(h.edges[i + 1] - h.edges[i] - width) <= 1e-9 * width,
                "bins must be uniform");
        require(h.counts[i] >= 0.0, "counts must be non-negative");
        if (h.counts[i] > 0.0) ++nonzero;
        total += h.counts[i];
    }
    require(nonzero >= 20, "fit needs at least 20 nonzero bins");

    FitWork work;
    work.bin_width = width;
    work.centers.resize(h.counts.size());
    work.counts = h.counts;
    work.weights.resize(h.counts.size());
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        work.centers[i] = 0.5 * (h.edges[i] + h.edges[i + 1]);
        work.weights[i] = 1.0 / std::max(h.counts[i], 1.0);
    }

    // Method-of-moments seed: mean = mu + tau, variance = sigma^2 + tau^2,
    // third central moment = 2 tau^3.
    const double m1 = std::inner_product(work.counts.begin(), work.counts.end(),
                                         work.centers.begin(), 0.0) /
                      total;
    double m2 = 0.0;
    double m3 = 0.0;
    for (std::size_t i = 0; i < work.centers.size(); ++i) {
        const double dt = work.centers[i] - m1;
        m2 += work.counts[i] * dt * dt;
        m3 += work.counts[i] * dt * dt * dt;
    }
    m2 /= total;
    m3 /= total;
    require(m2 > 0.0, "histogram has no spread");
    double tau0 = m3 > 0.0 ? std::cbrt(0.5 * m3) : 0.1 * std::sqrt(m2);
    tau0 = std::min(std::max(tau0, k_floor_tau), 0.95 * std::sqrt(m2));
    const double sigma0 = std::sqrt(std::max(m2 - tau0 * tau0, 0.05 * m2));

    std::array<double, 4> th{m1 - tau0, sigma0, tau0, total};
    clamp(th);
    double chi2 = work.chi2(th);

    const std::size_t n = work.centers.size();
    std::vector<double> jac(4 * n);
    FitDiagnostics diag;
    double lambda = 1e-3;
    bool converged = false;
    int iter = 0;
    for (; iter < 500 && !converged; ++iter) {
        // numeric Jacobian, central differences away from the floors
        for (int j = 0; j < 4; ++j) {
            const auto ju = static_cast<std::size_t>(j);
            const double floor_j = (j == 1)   ? k_floor_sigma
                                   : (j == 2) ? k_floor_tau
                                   : (j == 3) ? k_floor_amp
                                              : -1e300;
            const double step = 1e-6 * std::max(std::fabs(th[ju]), 1e-3);
            std::array<double, 4> up = th;
            std::array<double, 4> dn = th;
            up[ju] += step;
            double span = step;
            if (th[ju] - step > floor_j) {
                dn[ju] -= step;
                span += step;
            }
            for (std::size_t i = 0; i < n; ++i)
                jac[ju * n + i] = (work.model(up, i) - work.model(dn, i)) / span;
        }
        std::array<std::array<double, 4>, 4> m{};
        std::array<double, 4> g{};
        for (std::size_t i = 0; i < n; ++i) {
            const double r = work.counts[i] - work.model(th, i);
            for (std::size_t a = 0; a < 4; ++a) {
                g[a] += work.weights[i] * jac[a * n + i] * r;
                for (std::size_t b = a; b < 4; ++b)
                    m[a][b] += work.weights[i] * jac[a * n + i] * jac[b * n + i];
            }
        }
        for (std::size_t a = 0; a < 4; ++a)
            for (std::size_t b = 0; b < a; ++b) m[a][b] = m[b][a];

        bool accepted = false;
        while (!accepted && lambda < 1e12) {
            auto damped = m;
            for (std::size_t a = 0; a < 4; ++a)
                damped[a][a] = m[a][a] * (1.0 + lambda) + 1e-300;
            auto delta = g;
            if (solve4(damped, delta)) {
                std::array<double, 4> trial = th;
                for (std::size_t a = 0; a < 4; ++a) trial[a] += delta[a];
                clamp(trial);
                const double trial_chi2 = work.chi2(trial);
                if (trial_chi2 <= chi2) {
                    double rel_step = 0.0;
                    for (std::size_t a = 0; a < 4; ++a)
                        rel_step = std::max(rel_step, std::fabs(trial[a] - th[a]) /
                                                          std::max(std::fabs(th[a]), 1e-9));
                    th = trial;
                    chi2 = trial_chi2;
                    lambda = std::max(lambda / 3.0, 1e-12);
                    accepted = true;
                    if (rel_step < 1e-8) converged = true;
                    break;
                }
            }
            lambda *= 7.0;
        }
        if (!accepted) converged = true;  // no descent direction left
    }
    if (!converged) {
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "fit did not converge after 500 rounds; last mu=%.6g sigma=%.6g "
                      "tau=%.6g amplitude=%.6g",
                      th[0], th[1], th[2], th[3]);
        throw std::runtime_error(buf);
    }

    EmgFit out;
    out.params = EmgParams{th[0], th[1], th[2], th[3]};
    out.fwhm_ps = emg_fwhm(out.params);
    diag.iterations = iter;
    diag.chi2 = chi2;
    diag.converged = converged;
    diag.sigma_pinned = th[1] <= k_floor_sigma * 1.001;
    diag.tau_pinned = th[2] <= k_floor_tau * 1.001;
    out.diagnostics = diag;
    return out;
}

double photon_rate(double power_w, double wavelength_nm) {
    require(power_w >= 0.0, "power must be non-negative");
    require(wavelength_nm > 0.0, "wavelength must be positive");
    return power_w * (wavelength_nm * 1e-9) / (k_planck * k_c);
}

DetectionMetrics compute_sde(double count_rate, double false_rate, double rate,
                             const SdeCorrections& corr) {
    require(rate > 0.0, "photon rate must be positive");
    require(false_rate >= 0.0, "false-count rate must be non-negative");
    require(count_rate >= false_rate, "count rate must not fall below the false-count rate");
    require(corr.integration_time_s > 0.0, "integration time must be positive");

    DetectionMetrics m;
    double corrected = rate;
    double rel2 = 0.0;
    if (corr.end_facet_reflectance) {
        const Uncertain& r = *corr.end_facet_reflectance;
        require(r.value >= 0.0 && r.value < 1.0 && r.u >= 0.0,
                "end-facet reflectance must lie in [0, 1)");
        corrected *= 1.0 - r.value;
        rel2 += (r.u / (1.0 - r.value)) * (r.u / (1.0 - r.value));
    } else {
        m.warnings.emplace_back("no end-facet reflectance correction supplied; assuming none");
    }
    if (corr.attenuation) {
        const Uncertain& a = *corr.attenuation;
        require(a.value > 0.0 && a.value <= 1.0 && a.u >= 0.0,
                "attenuation-chain transmission must lie in (0, 1]");
        corrected *= a.value;
        rel2 += (a.u / a.value) * (a.u / a.value);
    } else {
        m.warnings.emplace_back(
            "no attenuation-chain correction supplied; assuming unity transmission");
    }
    for (double u : corr.extra_relative_u) {
        require(u >= 0.0, "relative uncertainty components must be non-negative");
        rel2 += u * u;
    }

    const double net = count_rate - false_rate;
    const double sde = net / corrected;
    if (net > 0.0)
        rel2 += (count_rate + false_rate) / (corr.integration_time_s * net * net);
    m.sde = {sde, sde * std::sqrt(rel2)};
    m.fcr = false_rate;
    if (sde > 1.0)
        m.warnings.emplace_back("efficiency exceeds unity; check the photon-rate calibration");
    return m;
}

PsResult polarization_sensitivity(Uncertain sde_max, Uncertain sde_min) {
    require(sde_max.value > 0.0 && sde_min.value > 0.0, "efficiencies must be positive");
    require(sde_max.u >= 0.0 && sde_min.u >= 0.0, "uncertainties must be non-negative");
    PsResult out;
    if (sde_max.value < sde_min.value) {
        std::swap(sde_max, sde_min);
        out.swapped = true;
    }
    require(sde_min.value - sde_min.u > 0.0,
            "denominator interval reaches zero; uncertainty too large");
    out.ps.value = sde_max.value / sde_min.value;
    out.ps.lo = std::max(1.0, (sde_max.value - sde_max.u) / (sde_min.value + sde_min.u));
    out.ps.hi = (sde_max.value + sde_max.u) / (sde_min.value - sde_min.u);
    return out;
}

SdeBudget sde_budget(double fiber_transmittance, double coupling, double absorptance,
                     double registration) {
    for (double v : {fiber_transmittance, coupling, absorptance, registration})
        require(v >= 0.0 && v <= 1.0, "budget factors must lie in [0, 1]");
    SdeBudget b;
    b.fiber_transmittance = fiber_transmittance;
    b.coupling = coupling;
    b.absorptance = absorptance;
    b.registration = registration;
    b.product = fiber_transmittance * coupling * absorptance * registration;
    return b;
}

std::string metrics_json(const DetectionMetrics& m) {
    const auto num = [](double v) { return io::fmt_fixed(v, 6); };
    std::string out = "{\n";
    out += "  \"sde\": {\"value\": " + num(m.sde.value) + ", \"u_k1_lo\": " + num(m.sde.u) +
           ", \"u_k1_hi\": " + num(m.sde.u) + "},\n";
    out += "  \"sde_max\": " + num(m.sde_max) + ",\n";
    out += "  \"sde_min\": " + num(m.sde_min) + ",\n";
    out += "  \"ps\": {\"value\": " + num(m.ps.value) +
           ", \"u_k1_lo\": " + num(m.ps.value - m.ps.lo) +
           ", \"u_k1_hi\": " + num(m.ps.hi - m.ps.value) + "},\n";
    out += "  \"dcr_cps\": " + num(m.dcr) + ",\n";
    out += "  \"fcr_cps\": " + num(m.fcr) + ",\n";
    out += "  \"bias_ua\": " + num(m.bias_ua) + ",\n";
    out += "  \"wavelength_nm\": " + num(m.wavelength_nm) + ",\n";
    out += "  \"warnings\": [";
    for (std::size_t i = 0; i < m.warnings.size(); ++i) {
        if (i) out += ", ";
        out += "\"" + m.warnings[i] + "\"";
    }
    out += "]\n}\n";
    return out;
}

}  // namespace snspd::analysis
