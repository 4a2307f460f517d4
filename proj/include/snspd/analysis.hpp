#pragma once

#include <optional>
#include <string>
#include <vector>

namespace snspd::analysis {

/// Binned arrival-time data with a uniform bin width in picoseconds.
struct Histogram {
    std::vector<double> edges;   // size counts.size() + 1, strictly increasing
    std::vector<double> counts;  // non-negative events per bin
};

/// Parse "bin_start_ps,count" lines (blank lines and # comments allowed)
/// into a uniform histogram.
[[nodiscard]] Histogram parse_histogram_csv(const std::string& text);

struct EmgParams {
    double mu = 0.0;         // ps, Gaussian mean
    double sigma = 1.0;      // ps, Gaussian width, > 0
    double tau = 1.0;        // ps, exponential tail constant, > 0
    double amplitude = 1.0;  // total fitted event count
};

/// Exponential-tailed Gaussian density (unit integral). The usual erfc form
/// switches to a log-domain evaluation when the erfc argument grows, so
/// extreme sigma/tau ratios neither overflow nor lose the tail.
[[nodiscard]] double emg_pdf(const EmgParams& p, double t_ps);

/// Full width at half maximum of the density, located by bisection around
/// the mode.
[[nodiscard]] double emg_fwhm(const EmgParams& p);

struct FitDiagnostics {
    int iterations = 0;
    double chi2 = 0.0;
    bool converged = false;
    bool sigma_pinned = false;  // ended on the lower width bound
    bool tau_pinned = false;    // ended on the lower tail bound
};

struct EmgFit {
    EmgParams params;
    double fwhm_ps = 0.0;
    FitDiagnostics diagnostics;
};

/// Weighted least-squares fit of the tailed-Gaussian model to a histogram:
/// Levenberg-Marquardt with Poisson weights 1/max(count, 1), seeded from the
/// histogram moments. Converges when the relative parameter step drops below
/// 1e-8; gives up (with the last parameters in the message) after 500 rounds.
[[nodiscard]] EmgFit fit_emg(const Histogram& h);

/// Photon flux carried by an optical power: power * wavelength / (h c).
[[nodiscard]] double photon_rate(double power_w, double wavelength_nm);

/// A value with its k=1 (68% confidence) standard uncertainty.
struct Uncertain {
    double value = 0.0;
    double u = 0.0;
};

/// Multiplicative corrections applied to the delivered photon rate.
struct SdeCorrections {
    std::optional<Uncertain> end_facet_reflectance;  // light reflected back at the fiber tip
    std::optional<Uncertain> attenuation;            // net transmission of the attenuation chain
    double integration_time_s = 1.0;                 // scales the Poisson counting term
    std::vector<double> extra_relative_u;            // extra k=1 relative components, in quadrature
};

/// A ratio with an asymmetric k=1 interval [lo, hi].
struct BoundedRatio {
    double value = 1.0;
    double lo = 1.0;
    double hi = 1.0;
};

struct DetectionMetrics {
    Uncertain sde;
    double sde_max = 0.0;
    double sde_min = 0.0;
    BoundedRatio ps;
    double dcr = 0.0;            // cps
    double fcr = 0.0;            // cps
    double bias_ua = 0.0;
    double wavelength_nm = 0.0;
    std::vector<std::string> warnings;
};

/// System detection efficiency (count_rate - false_rate) / corrected photon
/// rate, with first-order k=1 uncertainty propagation of the Poisson counting
/// error and the supplied correction uncertainties, combined in quadrature.
/// Missing corrections default to "none" and leave a warning record.
[[nodiscard]] DetectionMetrics compute_sde(double count_rate, double false_rate,
                                           double rate, const SdeCorrections& corr = {});

struct PsResult {
    BoundedRatio ps;
    bool swapped = false;  // inputs arrived in min/max order and were reordered
};

/// Polarization sensitivity sde_max / sde_min with asymmetric k=1 bounds by
/// interval propagation; the presentation is clamped to >= 1.
[[nodiscard]] PsResult polarization_sensitivity(Uncertain sde_max, Uncertain sde_min);

/// Multiplicative efficiency budget: fiber transmittance, coupling,
/// absorptance, and registration probability.
struct SdeBudget {
    double fiber_transmittance = 1.0;
    double coupling = 1.0;
    double absorptance = 1.0;
    double registration = 1.0;
    double product = 1.0;
};

[[nodiscard]] SdeBudget sde_budget(double fiber_transmittance, double coupling,
                                   double absorptance, double registration);

/// Metrics as JSON with explicit {value, u_k1_lo, u_k1_hi} fields.
[[nodiscard]] std::string metrics_json(const DetectionMetrics& m);

}  // namespace snspd::analysis
