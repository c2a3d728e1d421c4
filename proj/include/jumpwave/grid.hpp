// grid.hpp — periodic-box sampling of C^k-valued fields and the discrete
// Fourier transform pair used by the pseudospectral evolution.
//
// Axis j holds N_j (a power of two, >= 8) nodes x = -L_j/2 + n L_j/N_j, so
// x = 0 is the node N_j/2. Frequencies are xi = 2 pi m / L_j with m folded
// to [-N_j/2, N_j/2). Transforms use the physical normalization
//
//   spectrum(xi_m) ~ integral f(x) e^{-i x xi} dx,
//   field(x_n)     = (1 / prod L_j) sum_m spectrum(xi_m) e^{+i x xi},
//
// so spectral data can be compared directly with continuous formulas.

#pragma once

#include <cstddef>
#include <vector>

#include "jumpwave/errors.hpp"
#include "jumpwave/linalg.hpp"

namespace jumpwave {

struct GridSpec {
    int d = 0;
    std::vector<int> n;          // nodes per axis (powers of two)
    std::vector<double> length;  // box lengths
    double horizon = 0.0;
    std::vector<double> output_times;

    void validate() const;

    std::size_t total_nodes() const;
    double node_coord(int axis, int index) const;
    double spacing(int axis) const { return length[axis] / n[axis]; }
    // Folded integer mode number in [-N/2, N/2).
    int mode_number(int axis, int index) const;
    double frequency(int axis, int index) const;
    int zero_index(int axis) const { return n[axis] / 2; }

    // Row-major flattening (d <= 3 in practice).
    std::size_t flat_index(const std::vector<int>& idx) const;
    void unflatten(std::size_t node, std::vector<int>& idx) const;
};

struct GridField {
    GridSpec spec;
    int k = 0;
    double time = 0.0;
    std::vector<Complex> data;   // [node * k + c], node index row-major

    GridField() = default;
    GridField(const GridSpec& s, int kk, double t = 0.0)
        : spec(s), k(kk), time(t), data(s.total_nodes() * kk, Complex(0)) {}

    Complex& at(std::size_t node, int c) { return data[node * k + c]; }
    const Complex& at(std::size_t node, int c) const { return data[node * k + c]; }

    std::size_t flat_index(const std::vector<int>& idx) const { return spec.flat_index(idx); }
    void unflatten(std::size_t node, std::vector<int>& idx) const { spec.unflatten(node, idx); }
};

// Forward/inverse transforms of all k components. Inputs are untouched.
GridField fft_forward(const GridField& f);
GridField fft_inverse(const GridField& spectrum);

// max over nodes of the Euclidean norm of the k-vector.
double sup_norm(const GridField& f);
// sqrt(sum |f|^2 * prod dx).
double l2_norm(const GridField& f);

// Fraction of spectral energy carried by modes with any folded |m_j| in the
// top third of its axis range. Used as the aliasing monitor.
double top_shell_energy_fraction(const GridField& spectrum);

// Fraction of physical energy within `margin_frac * L/2` of the boundary
// along `axis`. Used as the wraparound monitor.
double boundary_shell_energy_fraction(const GridField& f, int axis,
                                      double margin_frac);

} // namespace jumpwave
