#include "jumpwave/cutoff.hpp"

#include <cmath>

namespace jumpwave {

namespace {
// e^{-1/x} glue, the standard C-infinity partition ingredient.
inline double bump_half(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }
} // namespace

double smooth_step(double s) {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    const double a = bump_half(s), b = bump_half(1.0 - s);
    return a / (a + b);
}

double smooth_plateau(double a, double a1, double a2) {
    if (a <= a1) return 1.0;
    if (a >= a2) return 0.0;
    return 1.0 - smooth_step((a - a1) / (a2 - a1));
}

double CutoffSymbol::axis_angle(const RealVec& xi) {
    const double r = xi.norm();
    if (r < 1e-300) return 0.0;  // zero mode: angle 0 by convention
    double c = std::abs(xi(0)) / r;
    return std::acos(std::min(1.0, c));
}

double CutoffSymbol::chi(const RealVec& xi) const {
    return smooth_plateau(axis_angle(xi), theta_inner, theta_outer);
}

double CutoffSymbol::chi2(double xi1, double xi2) const {
    const double r = std::hypot(xi1, xi2);
    if (r < 1e-300) return 1.0;
    const double ang = std::acos(std::min(1.0, std::abs(xi1) / r));
    return smooth_plateau(ang, theta_inner, theta_outer);
}

double CutoffSymbol::phi(double xi1) const {
    const double a = std::abs(xi1);
    if (a <= radial_lo) return 0.0;
    if (a >= radial_hi) return 1.0;
    return smooth_step((a - radial_lo) / (radial_hi - radial_lo));
}

CutoffSymbol build_cutoff(double theta_outer, double theta_inner) {
    if (!(theta_inner > 0.0) || !(theta_inner < theta_outer) ||
        !(theta_outer < M_PI / 2))
        throw InputError("build_cutoff: need 0 < theta_inner < theta_outer < pi/2");
    CutoffSymbol c;
    c.theta_outer = theta_outer;
    c.theta_inner = theta_inner;
    return c;
}

} // namespace jumpwave
