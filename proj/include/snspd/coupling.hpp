#pragma once

namespace snspd::coupling {

/// Gaussian fiber mode centered on (or offset from) a square photosensitive
/// area. Lengths in micrometers; mfd is the 1/e^2 intensity diameter.
struct CouplingProblem {
    double mfd = 0.0;
    double side = 0.0;
    double dx = 0.0;
    double dy = 0.0;
};

/// Fraction of the Gaussian beam power captured by the square area.
[[nodiscard]] double coupling_efficiency(const CouplingProblem& p);

/// Largest radial offset (along the square's diagonal, its weakest direction)
/// that still meets the target efficiency. Resolved to better than 0.01 um.
[[nodiscard]] double misalignment_budget(double mfd, double side, double eta_target);

}  // namespace snspd::coupling
