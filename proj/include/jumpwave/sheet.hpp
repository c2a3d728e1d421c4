// sheet.hpp — the eigenvalue branch lambda(xi) through lambda(1,0,...,0) = 0
// of the symbol A(xi), tracked on a cone around the +-e1 axis.
//
// lambda is homogeneous of degree one and extends oddly across the axis:
// lambda(-xi) = -lambda(xi). The fitted model carries the group velocity
// v = grad lambda(e1), the transverse Hessian lambda_{xi' xi'}(e1), and the
// paraxial quadratic form Q = Hessian / 2. The Hessian rank classifies the
// sheet as flat (rank 0), maximal (rank d-1), or intermediate.

#pragma once

#include <memory>
#include <vector>

#include "jumpwave/spectral.hpp"

namespace jumpwave {

enum class RankClass { flat, maximal, intermediate };

const char* rank_class_name(RankClass c);

class SheetModel {
public:
    // Branch value lambda(xi) by continuation from the axis. Throws
    // ContractError outside the fitted cone or on branch collision.
    double value(const RealVec& xi) const;

    // Value plus gradient from the eigenprojector trace formula
    // d lambda / d xi_j = tr(pi A_j) / tr(pi).
    void value_and_gradient(const RealVec& xi, double& lambda,
                            RealVec& grad) const;

    // Branch spectral projector pi_{lambda(xi)}(xi); even in xi.
    Mat branch_projector(const RealVec& xi) const;

    // Paraxial quadratic form Q(xi', xi') = (1/2) xi'^T Hessian xi'.
    double paraxial_q(const RealVec& xi_prime) const;

    const RealVec& group_velocity() const { return v_; }
    const RealMat& hessian() const { return hessian_; }
    RankClass rank_class() const { return rank_class_; }
    int hessian_rank() const { return rank_; }
    double cone_halfangle() const { return cone_halfangle_; }
    const HyperbolicSystem& system() const { return sys_; }
    double axis_gap() const { return gap_; }

    // Batched evaluation for d=2 via a precomputed Hermite table of the
    // unit-circle branch; falls back to continuation for other d.
    double value_fast(double xi1, double xi2) const;
    void gradient_fast(double xi1, double xi2, double& d1, double& d2) const;

private:
    friend SheetModel fit_sheet(const HyperbolicSystem&, double, double);

    HyperbolicSystem sys_;
    double cone_halfangle_ = 0.0;
    double gap_ = 0.0;              // spectral gap of the branch at e1
    RealVec v_;
    RealMat hessian_;
    RankClass rank_class_ = RankClass::flat;
    int rank_ = 0;

    // d=2 angle table: lambda(cos a, sin a) and its angular derivative at
    // uniformly spaced angles in [-cone, cone]; cubic Hermite between knots.
    std::vector<double> tab_val_, tab_der_;
    double tab_step_ = 0.0;

    struct BranchPoint {
        double lambda;
        Mat projector;
    };
    BranchPoint continue_to(const RealVec& unit_dir) const;
    void build_angle_table();
};

// Fits the branch through eigenvalue 0 at e1 = (1,0,...,0).
//
// Preconditions: 0 is in the spectrum of A(e1) and is separated from the
// rest by a positive gap; the branch stays simple on the requested cone
// (checked by sampling — a collision raises ContractError naming the
// offending direction). Gradient and Hessian use central differences at
// steps h and h/2 with Richardson extrapolation, h = stencil_radius.
SheetModel fit_sheet(const HyperbolicSystem& sys, double cone_halfangle,
                     double stencil_radius = 1e-3);

// Q as a standalone (d-1)x(d-1) matrix: half the transverse Hessian.
RealMat paraxial_form(const SheetModel& sheet);

} // namespace jumpwave
