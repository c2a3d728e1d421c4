// cutoff.hpp — smooth conic cutoff chi(xi) around the +-e1 axis and the
// even radial switch phi(xi1).
//
// chi is homogeneous of degree zero and even: chi(s xi) = chi(xi) for all
// s != 0. It equals 1 for axis angles <= theta_inner and 0 for angles >=
// theta_outer, glued by a C-infinity plateau bump. phi is even in xi1,
// vanishes for |xi1| <= 1 and equals 1 for |xi1| >= 2.

#pragma once

#include "jumpwave/errors.hpp"
#include "jumpwave/linalg.hpp"

namespace jumpwave {

// C-infinity monotone step: 0 for s <= 0, 1 for s >= 1.
double smooth_step(double s);

// Plateau bump in the scalar a >= 0: 1 on [0, a1], 0 on [a2, inf).
double smooth_plateau(double a, double a1, double a2);

struct CutoffSymbol {
    double theta_inner = 0.0;   // chi = 1 inside this axis angle
    double theta_outer = 0.0;   // chi = 0 outside this axis angle
    double radial_lo = 1.0;     // phi = 0 for |xi1| <= radial_lo
    double radial_hi = 2.0;     // phi = 1 for |xi1| >= radial_hi

    // Angle between xi and the +-e1 axis, in [0, pi/2].
    static double axis_angle(const RealVec& xi);

    // chi at xi. The zero frequency gets chi = 1 by convention; callers that
    // apply chi on a grid flag that mode (see grid ops).
    double chi(const RealVec& xi) const;
    double chi2(double xi1, double xi2) const;  // d=2 fast path

    double phi(double xi1) const;
};

// Throws InputError unless 0 < theta_inner < theta_outer.
CutoffSymbol build_cutoff(double theta_outer, double theta_inner);

} // namespace jumpwave
