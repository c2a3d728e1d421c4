// hyperplane.hpp — fields on the discontinuity hyperplane {x1 = 0},
// sampled on a uniform (t, x') grid, plus the tangential differential
// operator L_tan = d/dt + sum_{j>=2} A_j d/dx_j.
//
// Implemented for one transverse dimension (ambient d = 2); the transverse
// axis is periodic by default so tangential derivatives are spectral.
// Characteristic traces wrap on a periodic axis and raise DomainError on a
// non-periodic one.

#pragma once

#include <vector>

#include "jumpwave/hyperbolic_system.hpp"
#include "jumpwave/grid.hpp"

namespace jumpwave {

struct HyperplaneGrid {
    int nt = 0;          // time samples, t uniform on [0, t_end]
    double t_end = 0.0;
    int nx = 0;          // transverse samples (power of two if periodic)
    double x_len = 0.0;  // transverse box length, x' in [-x_len/2, x_len/2)
    bool periodic = true;

    void validate() const;
    double dt() const { return t_end / (nt - 1); }
    double dx() const { return x_len / nx; }
    double time(int it) const { return it * dt(); }
    double x(int ix) const { return -0.5 * x_len + ix * dx(); }
    double frequency(int ix) const;  // folded 2 pi m / x_len
};

class HyperplaneField {
public:
    HyperplaneField() = default;
    HyperplaneField(const HyperplaneGrid& g, int k);

    const HyperplaneGrid& grid() const { return grid_; }
    int k() const { return k_; }

    Complex& at(int it, int ix, int c) { return data_[(std::size_t(it) * grid_.nx + ix) * k_ + c]; }
    const Complex& at(int it, int ix, int c) const { return data_[(std::size_t(it) * grid_.nx + ix) * k_ + c]; }
    Vec vec_at(int it, int ix) const;
    void set_vec(int it, int ix, const Vec& v);

    // Cubic interpolation in x' at a fixed time index (periodic wrap or
    // DomainError out of range), and full (t, x') interpolation.
    Vec interp_x(int it, double x) const;
    Vec interp(double t, double x) const;

    // sup over x' of the Euclidean k-vector norm at time index it.
    double sup_at_time(int it) const;

    // Columnar serialization: t, x', then re/im per component.
    void write_csv(const std::string& path) const;

    std::vector<Complex>& raw() { return data_; }
    const std::vector<Complex>& raw() const { return data_; }

private:
    HyperplaneGrid grid_;
    int k_ = 0;
    std::vector<Complex> data_;
};

// Samples a closed-form jump function (t, x') -> C^k on the grid.
HyperplaneField sample_hyperplane(
    const HyperplaneGrid& g, int k,
    const std::function<Vec(double, double)>& fn);

// In-place spectral translation of one transverse row (single component,
// length g.nx): result(x) = input(x - delta). Periodic grids only.
void spectral_shift_row(std::vector<Complex>& row, const HyperplaneGrid& g,
                        double delta);

// L_tan applied on the hyperplane grid: d/dt by 4th-order differences
// (one-sided at the ends), d/dx' spectral when periodic, 4th-order central
// otherwise. Applying it to a constant field gives zero.
class TangentialOperator {
public:
    explicit TangentialOperator(const HyperbolicSystem& sys);
    HyperplaneField apply(const HyperplaneField& f) const;

    // x'-derivative alone (same discretization), used by the diffractive
    // operator and the residual check.
    static HyperplaneField x_derivative(const HyperplaneField& f, int order);

private:
    HyperbolicSystem sys_;
};

} // namespace jumpwave
