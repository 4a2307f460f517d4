#include "snspd/coupling.hpp"

#include <cmath>
#include <stdexcept>

namespace snspd::coupling {

double coupling_efficiency(const CouplingProblem& p) {
    if (!(p.mfd > 0.0)) throw std::invalid_argument("mode-field diameter must be positive");
    if (!(p.side > 0.0)) throw std::invalid_argument("active-area side must be positive");
    const double a = 0.5 * p.side;
    const double w0 = 0.5 * p.mfd;
    const double s = std::sqrt(2.0) / w0;
    // Power of a Gaussian beam inside an offset square: the 2D integral
    // factorizes into per-axis erf differences.
    double fx = std::erf(s * (a - p.dx)) + std::erf(s * (a + p.dx));
    double fy = std::erf(s * (a - p.dy)) + std::erf(s * (a + p.dy));
    return 0.25 * fx * fy;
}

double misalignment_budget(double mfd, double side, double eta_target) {
    if (!(eta_target > 0.0)) throw std::invalid_argument("target efficiency must be positive");
    CouplingProblem p{mfd, side, 0.0, 0.0};
    double eta0 = coupling_efficiency(p);
    if (eta_target > eta0)
        throw std::invalid_argument("target efficiency exceeds the aligned coupling");
    if (eta_target == eta0) return 0.0;

    auto eta_at = [&](double r) {
        // Offset along the diagonal: the square's weakest linear direction.
        double c = r / std::sqrt(2.0);
        CouplingProblem q{mfd, side, c, c};
        return coupling_efficiency(q);
    };
    double lo = 0.0, hi = side + mfd;
    while (eta_at(hi) > eta_target) {
        hi *= 2.0;
        if (hi > 1e6) throw std::invalid_argument("target efficiency unreachable");
    }
    for (int i = 0; i < 60 && hi - lo > 1e-4; ++i) {
        double mid = 0.5 * (lo + hi);
        (eta_at(mid) >= eta_target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace snspd::coupling
