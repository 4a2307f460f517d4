#include "snspd/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace snspd::circuit {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

struct LinearState {
    double i_chain = 0.0;     // common current through the series chain, uA
    std::vector<double> d;    // per-section wire imbalance i_first - i_second
};

double wire_current(const LinearState& s, int w) {
    const double sign = (w % 2 == 0) ? 1.0 : -1.0;
    return 0.5 * (s.i_chain + sign * s.d[static_cast<std::size_t>(w / 2)]);
}

/// Implicit-trapezoid propagator for the switched network. The series
/// topology forces one common chain current, and each section contributes a
/// single imbalance between its two wires, so a step costs one scalar solve
/// for the chain current plus a per-section back-substitution.
class Propagator {
public:
    explicit Propagator(const SnapParams& p)
        : p_(p),
          n_(static_cast<std::size_t>(p.n_sections)),
          l_chain_(static_cast<double>(p.n_sections) * (0.5 * p.l_wire + p.l_series)) {}

    [[nodiscard]] double l_chain() const { return l_chain_; }

    /// Advance cur by dt with the per-wire resistances r held fixed.
    void step(const LinearState& cur, const std::vector<double>& r, double dt,
              LinearState& out) const {
        const double i = cur.i_chain;
        double sum_s = 0.0;
        double sum_mix = 0.0;
        double schur = 0.0;
        double rhs_d = 0.0;
        for (std::size_t k = 0; k < n_; ++k) {
            const double s = r[2 * k] + r[2 * k + 1];
            const double diff = r[2 * k] - r[2 * k + 1];
            const double dk = cur.d[k];
            const double gamma = p_.l_wire + 0.25 * dt * s;
            const double alpha = p_.l_wire * dk - 0.25 * dt * (diff * i + s * dk);
            sum_s += s;
            sum_mix += s * i + diff * dk;
            schur += diff * (0.25 * dt * diff) / gamma;
            rhs_d += diff * alpha / gamma;
        }
        const double g_old = p_.r_load * (p_.i_bias - i) - 0.25 * sum_mix;
        const double a =
            l_chain_ + 0.5 * dt * p_.r_load + 0.125 * dt * (sum_s - schur);
        const double b =
            l_chain_ * i + 0.5 * dt * (g_old + p_.r_load * p_.i_bias) - 0.125 * dt * rhs_d;
        out.i_chain = b / a;
        for (std::size_t k = 0; k < n_; ++k) {
            const double s = r[2 * k] + r[2 * k + 1];
            const double diff = r[2 * k] - r[2 * k + 1];
            const double gamma = p_.l_wire + 0.25 * dt * s;
            const double alpha = p_.l_wire * cur.d[k] - 0.25 * dt * (diff * i + s * cur.d[k]);
            out.d[k] = (alpha - 0.25 * dt * diff * out.i_chain) / gamma;
        }
    }

    /// Magnetic energy stored in the wires and chokes.
    [[nodiscard]] double stored_energy(const LinearState& s) const {
        double e = 0.5 * l_chain_ * s.i_chain * s.i_chain;
        for (std::size_t k = 0; k < n_; ++k) e += 0.25 * p_.l_wire * s.d[k] * s.d[k];
        return e;
    }

private:
    SnapParams p_;
    std::size_t n_;
    double l_chain_;
};

}  // namespace

SnapNetwork build_cascade(const SnapParams& p) {
    require(p.n_sections >= 1, "n_sections must be at least 1");
    require(p.l_wire > 0.0, "l_wire must be positive");
    require(p.l_series > 0.0, "l_series must be positive");
    require(p.r_hotspot >= 0.0, "r_hotspot must be non-negative");
    require(p.tau_hotspot > 0.0, "tau_hotspot must be positive");
    require(p.retrap_fraction > 0.0 && p.retrap_fraction <= 1.0,
            "retrap_fraction must lie in (0, 1]");
    require(p.r_load > 0.0, "r_load must be positive");
    require(p.i_bias > 0.0, "i_bias must be positive");
    require(p.i_sw_wire > 0.0, "i_sw_wire must be positive");
    SnapNetwork net;
    net.p = p;
    net.latch_risk = p.i_bias >= 2.0 * p.i_sw_wire;
    return net;
}

double chain_inductance(const SnapParams& p) {
    return static_cast<double>(p.n_sections) * (0.5 * p.l_wire + p.l_series);
}

double calibrate_inductance(double tau_ns, double r_load) {
    require(tau_ns > 0.0, "recovery constant must be positive");
    require(r_load > 0.0, "load resistance must be positive");
    return tau_ns * r_load;
}

PulseTrace simulate_detection(const SnapNetwork& net, int fired_wire, double dt_ns,
                              double horizon_ns) {
    const SnapParams& p = net.p;
    const int n_wires = 2 * p.n_sections;
    require(dt_ns > 0.0 && dt_ns <= 1e-3 * (1.0 + 1e-12),
            "dt_ns must lie in (0, 1e-3] ns");
    require(horizon_ns >= 50.0 * (1.0 - 1e-12), "horizon_ns must be at least 50 ns");
    require(fired_wire < n_wires, "fired_wire out of range");

    const Propagator prop(p);
    const auto n_steps = static_cast<std::size_t>(std::ceil(horizon_ns / dt_ns - 1e-9));
    const std::size_t samples = n_steps + 1;
    const auto nw = static_cast<std::size_t>(n_wires);

    PulseTrace trace;
    trace.dt = dt_ns;
    trace.t.resize(samples);
    trace.i_load.resize(samples);
    trace.i_wire.assign(nw, std::vector<double>(samples));
    trace.resistive.assign(nw, std::vector<unsigned char>(samples));

    LinearState state;
    state.i_chain = p.i_bias;  // superconducting chain shorts the load at dc
    state.d.assign(static_cast<std::size_t>(p.n_sections), 0.0);
    LinearState trial = state;

    std::vector<double> r(nw, 0.0);
    std::vector<unsigned char> resistive(nw, 0);
    std::vector<double> heal_at(nw, 0.0);
    if (fired_wire >= 0) {
        const auto fw = static_cast<std::size_t>(fired_wire);
        r[fw] = p.r_hotspot;
        resistive[fw] = 1;
        heal_at[fw] = p.tau_hotspot;
        trace.events.push_back({0.0, fired_wire, true});
    }

    double e_src = 0.0;
    double e_load = 0.0;
    double e_hot = 0.0;
    const double e_ind0 = prop.stored_energy(state);

    const auto record = [&](std::size_t idx, double t) {
        trace.t[idx] = t;
        trace.i_load[idx] = p.i_bias - state.i_chain;
        for (int w = 0; w < n_wires; ++w) {
            const auto wu = static_cast<std::size_t>(w);
            trace.i_wire[wu][idx] = wire_current(state, w);
            trace.resistive[wu][idx] = resistive[wu];
        }
    };
    record(0, 0.0);

    // Midpoint-product power accounting keeps the discrete balance exact for
    // the trapezoid rule, so any drift signals an integration fault.
    const auto advance = [&](double dt_sub) {
        prop.step(state, r, dt_sub, trial);
        const double i_mid = 0.5 * (state.i_chain + trial.i_chain);
        const double load_mid = p.i_bias - i_mid;
        e_src += dt_sub * p.i_bias * p.r_load * load_mid;
        e_load += dt_sub * p.r_load * load_mid * load_mid;
        for (int w = 0; w < n_wires; ++w) {
            const auto wu = static_cast<std::size_t>(w);
            if (r[wu] == 0.0) continue;
            const double iw_mid = 0.5 * (wire_current(state, w) + wire_current(trial, w));
            e_hot += dt_sub * r[wu] * iw_mid * iw_mid;
        }
        std::swap(state, trial);
    };

    for (std::size_t step = 0; step < n_steps; ++step) {
        const double t0 = static_cast<double>(step) * dt_ns;
        const double t1 = static_cast<double>(step + 1) * dt_ns;
        double tcur = t0;
        double remaining = t1 - t0;
        int guard = 0;
        while (remaining > 1e-12 * dt_ns) {
            prop.step(state, r, remaining, trial);
            double theta_best = 2.0;
            int who = -1;
            for (int w = 0; w < n_wires; ++w) {
                const auto wu = static_cast<std::size_t>(w);
                if (r[wu] != 0.0) continue;
                const double i_new = std::abs(wire_current(trial, w));
                if (i_new < p.i_sw_wire) continue;
                const double i_old = std::abs(wire_current(state, w));
                const double den = i_new - i_old;
                const double theta =
                    den > 0.0 ? std::max(0.0, (p.i_sw_wire - i_old) / den) : 0.0;
                if (theta < theta_best) {
                    theta_best = theta;
                    who = w;
                }
            }
            if (who < 0) {
                advance(remaining);
                tcur = t1;
                remaining = 0.0;
                break;
            }
            const double dt_sub = theta_best * remaining;
            if (dt_sub > 1e-12 * dt_ns) {
                advance(dt_sub);
                tcur += dt_sub;
                remaining -= dt_sub;
            }
            bool flipped = false;
            for (int w = 0; w < n_wires; ++w) {
                const auto wu = static_cast<std::size_t>(w);
                if (r[wu] != 0.0) continue;
                if (std::abs(wire_current(state, w)) < p.i_sw_wire * (1.0 - 1e-9) && w != who)
                    continue;
                r[wu] = p.r_hotspot;
                resistive[wu] = 1;
                heal_at[wu] = tcur + p.tau_hotspot;
                trace.events.push_back({tcur, w, true});
                flipped = true;
            }
            if (!flipped || ++guard > 2 * n_wires) {
                advance(remaining);
                tcur = t1;
                remaining = 0.0;
                break;
            }
        }
        // Healing is resolved on the sample grid: a resistive wire relaxes
        // back once its minimum lifetime has elapsed and its current has
        // dropped below the retrapping level.
        for (int w = 0; w < n_wires; ++w) {
            const auto wu = static_cast<std::size_t>(w);
            if (r[wu] == 0.0 || !resistive[wu]) continue;
            if (t1 < heal_at[wu] - 1e-15) continue;
            if (std::abs(wire_current(state, w)) >= p.retrap_fraction * p.i_sw_wire) continue;
            r[wu] = 0.0;
            resistive[wu] = 0;
            trace.events.push_back({t1, w, false});
        }
        record(step + 1, t1);
    }

    const double de_ind = prop.stored_energy(state) - e_ind0;
    // Relative to the largest energy actually moved, but never to pure
    // roundoff: the quiescent network moves no energy at all.
    const double floor = 1e-9 * e_ind0;
    const double scale =
        std::max({std::abs(e_src), e_load + e_hot, std::abs(de_ind), floor});
    if (scale > floor) {
        trace.energy_drift = (e_src - e_load - e_hot - de_ind) / scale;
        if (std::abs(trace.energy_drift) > 0.01) {
            char buf[128];
            std::snprintf(buf, sizeof(buf),
                          "energy balance drifted by %.3g of the budget; reduce dt_ns",
                          trace.energy_drift);
            throw std::runtime_error(buf);
        }
    }
    return trace;
}

namespace {

bool partner_switches(const SnapNetwork& net, double i_bias) {
    SnapParams p = net.p;
    p.i_bias = i_bias;
    const PulseTrace trace = simulate_detection(build_cascade(p), 0, 1e-3, 50.0);
    return std::any_of(trace.events.begin(), trace.events.end(),
                       [](const SwitchEvent& e) { return e.wire == 1 && e.switched; });
}

}  // namespace

AvalancheThreshold avalanche_threshold(const SnapNetwork& net) {
    const double i_latch = 2.0 * net.p.i_sw_wire;
    if (net.p.r_hotspot <= 0.0) return {i_latch, 1.0, false};

    // Coarse scan: the partner-switch predicate must be monotone in bias.
    constexpr int k_scan = 15;
    double lo = 0.0;
    double hi = -1.0;
    bool seen_true = false;
    std::string dump;
    for (int j = 0; j < k_scan; ++j) {
        const double ib = i_latch * (0.08 + 0.91 * j / (k_scan - 1));
        const bool sw = partner_switches(net, ib);
        char buf[48];
        std::snprintf(buf, sizeof(buf), " %.3f:%d", ib, sw ? 1 : 0);
        dump += buf;
        if (sw) {
            if (hi < 0.0) hi = ib;
            seen_true = true;
        } else {
            if (seen_true)
                throw std::runtime_error("partner-switch predicate is not monotone in bias:" +
                                         dump);
            lo = ib;
        }
    }
    if (!seen_true) {
        if (!partner_switches(net, i_latch * 0.9999)) return {i_latch, 1.0, false};
        lo = i_latch * 0.99;
        hi = i_latch * 0.9999;
    }
    while (hi - lo > 0.01) {
        const double mid = 0.5 * (lo + hi);
        if (partner_switches(net, mid))
            hi = mid;
        else
            lo = mid;
    }
    const double i_av = 0.5 * (lo + hi);
    return {i_av, i_av / i_latch, true};
}

double recovery_time(const PulseTrace& trace) {
    require(trace.t.size() >= 3 && trace.t.size() == trace.i_load.size(),
            "trace must hold a sampled load current");
    const auto peak_it = std::max_element(trace.i_load.begin(), trace.i_load.end());
    const double peak = *peak_it;
    require(peak > 0.0, "trace holds no pulse");
    const auto peak_idx = static_cast<std::size_t>(peak_it - trace.i_load.begin());

    std::size_t start = trace.i_load.size();
    for (std::size_t k = peak_idx; k < trace.i_load.size(); ++k) {
        if (trace.i_load[k] <= 0.9 * peak) {
            start = k;
            break;
        }
    }
    std::size_t stop = trace.i_load.size();
    for (std::size_t k = start; k < trace.i_load.size(); ++k) {
        if (trace.i_load[k] < 0.1 * peak) {
            stop = k;
            break;
        }
    }
    if (start >= trace.i_load.size() || stop >= trace.i_load.size() || stop - start < 8)
        throw std::runtime_error("falling edge does not span 90% to 10% of the peak");

    // Least-squares line through ln(i_load) over the falling edge.
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    double count = 0.0;
    for (std::size_t k = start; k < stop; ++k) {
        if (trace.i_load[k] <= 0.0) continue;
        const double x = trace.t[k];
        const double y = std::log(trace.i_load[k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        count += 1.0;
    }
    const double denom = count * sxx - sx * sx;
    if (count < 8.0 || denom <= 0.0)
        throw std::runtime_error("falling edge has too few usable samples");
    const double slope = (count * sxy - sx * sy) / denom;
    if (slope >= 0.0) throw std::runtime_error("falling edge does not decay");
    return -1.0 / slope;
}

}  // namespace snspd::circuit
