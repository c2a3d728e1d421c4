// source.hpp — piecewise-smooth sources with a jump across {x1 = 0}.
//
// A source is b(t) * [ s+(x) c+ on x1 > 0, s-(x) c- on x1 < 0 ] where b is
// a C-infinity bump supported in [0, T] and each side's spatial profile is
// a product of polynomial-times-Gaussian factors per axis. Jumps of all
// x1-derivative orders at x1 = 0 are available in closed form, which is
// what the jump-transport recursion consumes.

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "jumpwave/grid.hpp"

namespace jumpwave {

// p(x) * exp(-((x - c)/w)^2), closed under differentiation.
class PolyGaussian1D {
public:
    PolyGaussian1D() = default;
    PolyGaussian1D(std::vector<double> poly_coeffs, double center, double width);

    double operator()(double x) const;
    PolyGaussian1D derivative() const;
    // nth derivative evaluated at x.
    double derivative_at(double x, int n) const;
    double width() const { return width_; }
    double center() const { return center_; }

private:
    std::vector<double> poly_{1.0};  // coefficients, ascending powers
    double center_ = 0.0;
    double width_ = 1.0;
};

// C-infinity time bump supported in [0, T], normalized to max 1.
class TimeBump {
public:
    TimeBump() = default;
    explicit TimeBump(double T);
    double operator()(double t) const;
    double support_end() const { return T_; }
    double integral() const;  // int_0^T b numerically frozen at construction

private:
    double T_ = 1.0;
    double integral_ = 0.0;
};

struct SourceSide {
    Vec amplitude;                        // k-vector
    std::vector<PolyGaussian1D> factors;  // one per axis
};

class SourceModel {
public:
    SourceModel() = default;
    SourceModel(int d, int k, TimeBump bump, SourceSide plus, SourceSide minus);

    int dimension() const { return d_; }
    int size() const { return k_; }
    double support_end() const { return bump_.support_end(); }
    const TimeBump& bump() const { return bump_; }

    // One-sided evaluation; side > 0 uses the plus profile.
    Vec evaluate_side(double t, const RealVec& x, int side) const;
    // Pointwise value with sign-of-x1 side selection; x1 == 0 takes the mean
    // of the one-sided limits.
    Vec evaluate(double t, const RealVec& x) const;

    // J_f^n(t, x') for d=2 (x' scalar): closed-form jump of the nth
    // x1-derivative across x1 = 0.
    Vec jump(int n, double t, double xprime) const;
    // x'-derivative of order m of jump order n (d=2).
    Vec jump_xprime_derivative(int n, int m, double t, double xprime) const;

    // Named registry used by experiment configs; throws InputError for an
    // unknown name. See README for the available families.
    static SourceModel registered(const std::string& name, int k,
                                  double T = 1.0);

private:
    int d_ = 0, k_ = 0;
    TimeBump bump_;
    SourceSide plus_, minus_;
};

// Pointwise sampling on the grid at time t; node exactly on x1 = 0 gets the
// mean of the two one-sided limits. Zero field outside the time support.
GridField sample_source(const SourceModel& src, const GridSpec& spec, double t);

// Solenoidal-forcing variant for the flat-sheet experiments: wraps a scalar
// potential psi (piecewise smooth across x1=0, continuous, kinked) into
// f = (0, d2 psi, -d1 psi) for the k=3 acoustics-type system, which excites
// only the flat branch. Provided as a registered SourceModel-compatible
// sampler.
class FlatBranchSource {
public:
    FlatBranchSource(TimeBump bump, PolyGaussian1D x1_plus,
                     PolyGaussian1D x1_minus, PolyGaussian1D transverse);

    Vec evaluate(double t, const RealVec& x) const;      // k = 3
    GridField sample(const GridSpec& spec, double t) const;
    Vec jump(int n, double t, double xprime) const;
    double support_end() const { return bump_.support_end(); }
    const TimeBump& bump() const { return bump_; }

    // The underlying potential's one-sided x1 profiles, for tests.
    const PolyGaussian1D& x1_plus() const { return x1p_; }
    const PolyGaussian1D& x1_minus() const { return x1m_; }
    const PolyGaussian1D& transverse() const { return tr_; }

private:
    Vec evaluate_side(double t, const RealVec& x, int side) const;
    TimeBump bump_;
    PolyGaussian1D x1p_, x1m_, tr_;
};

} // namespace jumpwave
