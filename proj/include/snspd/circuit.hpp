#pragma once

#include <vector>

namespace snspd::circuit {

/// Lumped-element parameters of the cascaded two-wire detector network:
/// n_sections series sections, each holding two parallel superconducting
/// branches of kinetic inductance l_wire plus a series choke l_series,
/// biased by a current source and read out across r_load.
struct SnapParams {
    int n_sections = 16;
    double l_wire = 50.0;        // nH per wire branch
    double l_series = 2.125;     // nH choke per section
    double r_hotspot = 1000.0;   // ohm while a wire is resistive
    double tau_hotspot = 0.02;   // ns minimum resistive lifetime
    double retrap_fraction = 0.5;  // heal below this fraction of i_sw_wire
    double r_load = 50.0;        // ohm
    double i_bias = 19.5;        // uA
    double i_sw_wire = 10.835;   // uA switching current per wire
};

struct SnapNetwork {
    SnapParams p;
    bool latch_risk = false;  // bias at or above the combined switching current
};

/// Validate parameters and assemble the network description.
[[nodiscard]] SnapNetwork build_cascade(const SnapParams& p);

/// Total series inductance seen by the load when every wire is
/// superconducting: n * (l_wire/2 + l_series).
[[nodiscard]] double chain_inductance(const SnapParams& p);

/// Series inductance that yields a given 1/e recovery constant into a load.
[[nodiscard]] double calibrate_inductance(double tau_ns, double r_load);

struct SwitchEvent {
    double t = 0.0;    // ns
    int wire = 0;      // global wire index, section = wire / 2
    bool switched = true;  // false: healed back to superconducting
};

struct PulseTrace {
    std::vector<double> t;                        // ns, uniform grid
    std::vector<double> i_load;                   // uA through r_load
    std::vector<std::vector<double>> i_wire;      // [2 n_sections][samples]
    std::vector<std::vector<unsigned char>> resistive;  // same shape, 0/1
    std::vector<SwitchEvent> events;
    double dt = 0.0;          // ns
    double energy_drift = 0.0;  // relative source-vs-sink imbalance
};

/// Drive the network with one wire forced resistive at t = 0 and integrate
/// the switched linear system by the implicit trapezoid rule. Switching
/// events are located by linear interpolation inside a step. fired_wire < 0
/// runs the unperturbed network.
[[nodiscard]] PulseTrace simulate_detection(const SnapNetwork& net, int fired_wire,
                                            double dt_ns, double horizon_ns);

struct AvalancheThreshold {
    double i_av = 0.0;      // uA
    double fraction = 0.0;  // of the combined 2 * i_sw_wire
    bool reachable = true;  // false when no bias below latch triggers the partner
};

/// Smallest bias at which the partner wire of a fired section also switches,
/// by bisection to 0.01 uA. A coarse scan first confirms the partner-switch
/// predicate is monotone in bias.
[[nodiscard]] AvalancheThreshold avalanche_threshold(const SnapNetwork& net);

/// 1/e constant of the load-current falling edge, fitted between 90% and 10%
/// of the pulse peak.
[[nodiscard]] double recovery_time(const PulseTrace& trace);

}  // namespace snspd::circuit
