// jump_system.hpp — the recursive transport system for the jumps of the
// solution and its x1-derivatives across the characteristic hyperplane.
//
// With pi the spectral projector of A1 onto its kernel and Q the partial
// inverse (Q A1 (I-pi) = I-pi, Q pi = 0), the jump sequence J^n of a
// solution of L u = f with piecewise-smooth f satisfies
//
//   A1 J^0 = 0,               (d/dt + v.dx') pi J^0 = pi Jf^0,
//   (I-pi) J^n = Q (Jf^{n-1} - L_tan J^{n-1}),
//   (d/dt + v.dx') pi J^n = pi Jf^n - pi L_tan Q (Jf^{n-1} - L_tan J^{n-1}).
//
// Transport equations are solved by exact characteristic tracing with cubic
// interpolation (no CFL constraint); the recursion is validated by checking
// that L v - f built from the solved jumps has vanishing jumps.

#pragma once

#include <optional>

#include "jumpwave/hyperplane.hpp"
#include "jumpwave/sheet.hpp"
#include "jumpwave/source.hpp"

namespace jumpwave {

struct ProjectorPair {
    Mat pi;     // projector of A1 = A(e1) for eigenvalue 0
    Mat qinv;   // partial inverse of A1, zero on range(pi)
};

// Throws ContractError "hyperplane not characteristic" when A1 is
// invertible (no eigenvalue 0 within the cluster tolerance).
ProjectorPair reference_projector(const HyperbolicSystem& sys);

// J^0 from pi Jf^0 by characteristic-line quadrature:
//   J^0(t,x') = int_0^t (pi Jf^0)(s, x' - v'(t-s)) ds,  (I-pi) J^0 = 0.
// v is the full d-vector group velocity (v1 must vanish to tolerance).
HyperplaneField solve_jump0(const ProjectorPair& pair, const RealVec& v,
                            const HyperplaneField& jf0);

// J^n for n >= 1 from J^{n-1} and the source jumps of orders n-1 and n.
HyperplaneField solve_jump_n(const ProjectorPair& pair, const RealVec& v,
                             const TangentialOperator& ltan,
                             const HyperplaneField& j_prev,
                             const HyperplaneField& jf_prev,
                             const HyperplaneField& jf_n);

struct JumpSequence {
    int order = 0;                      // M
    HyperplaneGrid grid;
    std::vector<HyperplaneField> jumps; // J^0 ... J^M
};

// Convenience driver: samples Jf^0..Jf^M from the closed-form source jumps
// and runs the recursion.
JumpSequence solve_jump_sequence(
    const ProjectorPair& pair, const RealVec& v,
    const HyperbolicSystem& sys, const HyperplaneGrid& grid, int order,
    const std::function<Vec(int, double, double)>& source_jump);

// Second-order tangential operator P = (1/2) pi sum lambda_{mu nu} d_mu d_nu
// from the sheet Hessian. Construction cross-checks the identity
// -pi L_tan Q L_tan pi = P on sampled quadratic polynomials and throws
// ContractError if it fails beyond tolerance.
struct DiffractiveOperator {
    Mat pi;
    RealMat half_hessian;   // (d-1)x(d-1), = Hessian / 2
    double identity_defect = 0.0;  // measured in the construction check

    bool is_zero(double tol = 1e-12) const;
    // P applied to a hyperplane field (d=2: half_hessian is 1x1).
    HyperplaneField apply(const HyperplaneField& f) const;
};

DiffractiveOperator diffractive_operator(const ProjectorPair& pair,
                                         const SheetModel& sheet,
                                         double tol = 1e-6);

// Asymptotic growth rate of pi J^1 along the characteristic through
// (t=0, x'=x0): the accumulated jump of P f along that line,
//   slope = -int (P pi Jf^0)(s, x0 + v' s) ds
// (constant once the source support is passed). Returns the k-vector rate.
Vec predict_growth_slope(const DiffractiveOperator& p, const RealVec& v,
                         const std::function<Vec(int, double, double)>& source_jump,
                         double t_support_end, double x0);

// sum_{n<=M} J^n(t,x') x1^n / n!  on x1 > 0, zero on x1 < 0, half-sum at
// x1 = 0. Time t is interpolated on the hyperplane grid.
GridField reconstruct_expansion(const JumpSequence& jumps,
                                const GridSpec& spec, double t);

struct ResidualReport {
    // Jump norms of d^n/dx1^n (L v - f) across x1 = 0 for n = 0..M-1,
    // sup over the probed (t, x') window.
    std::vector<double> residual_jump_norms;
    double field_scale = 0.0;   // sup |Jf^0| for context
};

// Builds v from the solved jumps, applies L with one-sided 4th-order
// differences in x1 (stencils never cross the hyperplane), subtracts the
// sampled source, and measures the residual jumps. Large residuals are a
// report outcome, not an exception.
ResidualReport residual_smoothness_check(
    const HyperbolicSystem& sys, const JumpSequence& jumps,
    const std::function<Vec(double, const RealVec&, int)>& source_side_eval,
    const std::function<Vec(int, double, double)>& source_jump,
    int order, double x1_extent, int n_x1, const std::vector<double>& probe_times);

} // namespace jumpwave
