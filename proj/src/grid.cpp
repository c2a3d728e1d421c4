#include "jumpwave/grid.hpp"

#include <cmath>
#include <cstring>
#include <map>
#include <mutex>

#include <fftw3.h>

namespace jumpwave {

namespace {
bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }
} // namespace

void GridSpec::validate() const {
    if (d < 1) throw InputError("grid: dimension must be >= 1");
    if (static_cast<int>(n.size()) != d || static_cast<int>(length.size()) != d)
        throw InputError("grid: n and length must each have d entries");
    for (int j = 0; j < d; ++j) {
        if (n[j] < 8 || !is_power_of_two(n[j]))
            throw InputError("grid: N_" + std::to_string(j) +
                             " must be a power of two >= 8");
        if (!(length[j] > 0.0))
            throw InputError("grid: L_" + std::to_string(j) + " must be positive");
    }
}

std::size_t GridSpec::total_nodes() const {
    std::size_t t = 1;
    for (int j = 0; j < d; ++j) t *= static_cast<std::size_t>(n[j]);
    return t;
}

double GridSpec::node_coord(int axis, int index) const {
    return -0.5 * length[axis] + index * spacing(axis);
}

int GridSpec::mode_number(int axis, int index) const {
    return index < n[axis] / 2 ? index : index - n[axis];
}

double GridSpec::frequency(int axis, int index) const {
    return 2.0 * M_PI * mode_number(axis, index) / length[axis];
}

std::size_t GridSpec::flat_index(const std::vector<int>& idx) const {
    std::size_t f = 0;
    for (int j = 0; j < d; ++j) f = f * n[j] + idx[j];
    return f;
}

void GridSpec::unflatten(std::size_t node, std::vector<int>& idx) const {
    idx.resize(d);
    for (int j = d - 1; j >= 0; --j) {
        idx[j] = static_cast<int>(node % n[j]);
        node /= n[j];
    }
}

namespace {

// One cached FFTW plan pair per grid shape. Plans own aligned buffers and
// executions copy through them, which keeps alignment requirements away
// from callers.
struct PlanPair {
    fftw_plan fwd = nullptr, bwd = nullptr;
    fftw_complex* buf = nullptr;
    std::size_t size = 0;
};

PlanPair& plan_for(const std::vector<int>& dims) {
    static std::map<std::vector<int>, PlanPair> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(dims);
    if (it != cache.end()) return it->second;
    PlanPair p;
    p.size = 1;
    for (int n : dims) p.size *= static_cast<std::size_t>(n);
    p.buf = fftw_alloc_complex(p.size);
    p.fwd = fftw_plan_dft(static_cast<int>(dims.size()),
                          const_cast<int*>(dims.data()), p.buf, p.buf,
                          FFTW_FORWARD, FFTW_ESTIMATE);
    p.bwd = fftw_plan_dft(static_cast<int>(dims.size()),
                          const_cast<int*>(dims.data()), p.buf, p.buf,
                          FFTW_BACKWARD, FFTW_ESTIMATE);
    return cache.emplace(dims, p).first->second;
}

// Parity factor (-1)^(sum of mode indices) translating the grid origin
// x = -L/2 into the phase convention of the continuous transform.
inline double origin_parity(const GridSpec& spec, std::size_t node) {
    int s = 0;
    std::size_t rem = node;
    for (int j = spec.d - 1; j >= 0; --j) {
        s += static_cast<int>(rem % spec.n[j]);
        rem /= spec.n[j];
    }
    return (s & 1) ? -1.0 : 1.0;
}

} // namespace

GridField fft_forward(const GridField& f) {
    f.spec.validate();
    PlanPair& plan = plan_for(f.spec.n);
    GridField out(f.spec, f.k, f.time);
    double dvol = 1.0;
    for (int j = 0; j < f.spec.d; ++j) dvol *= f.spec.spacing(j);
    const std::size_t nn = f.spec.total_nodes();
    std::vector<Complex> tmp(nn);
    for (int c = 0; c < f.k; ++c) {
        for (std::size_t i = 0; i < nn; ++i) tmp[i] = f.at(i, c);
        std::memcpy(plan.buf, tmp.data(), nn * sizeof(Complex));
        fftw_execute(plan.fwd);
        std::memcpy(tmp.data(), plan.buf, nn * sizeof(Complex));
        for (std::size_t i = 0; i < nn; ++i)
            out.at(i, c) = tmp[i] * (dvol * origin_parity(f.spec, i));
    }
    return out;
}

GridField fft_inverse(const GridField& spectrum) {
    spectrum.spec.validate();
    PlanPair& plan = plan_for(spectrum.spec.n);
    GridField out(spectrum.spec, spectrum.k, spectrum.time);
    double lvol = 1.0;
    for (int j = 0; j < spectrum.spec.d; ++j) lvol *= spectrum.spec.length[j];
    const std::size_t nn = spectrum.spec.total_nodes();
    std::vector<Complex> tmp(nn);
    for (int c = 0; c < spectrum.k; ++c) {
        for (std::size_t i = 0; i < nn; ++i)
            tmp[i] = spectrum.at(i, c) * origin_parity(spectrum.spec, i);
        std::memcpy(plan.buf, tmp.data(), nn * sizeof(Complex));
        fftw_execute(plan.bwd);
        std::memcpy(tmp.data(), plan.buf, nn * sizeof(Complex));
        for (std::size_t i = 0; i < nn; ++i) out.at(i, c) = tmp[i] / lvol;
    }
    return out;
}

double sup_norm(const GridField& f) {
    double m = 0.0;
    const std::size_t nn = f.spec.total_nodes();
    for (std::size_t i = 0; i < nn; ++i) {
        double s = 0.0;
        for (int c = 0; c < f.k; ++c) s += std::norm(f.at(i, c));
        m = std::max(m, s);
    }
    return std::sqrt(m);
}

double l2_norm(const GridField& f) {
    double dvol = 1.0;
    for (int j = 0; j < f.spec.d; ++j) dvol *= f.spec.spacing(j);
    double s = 0.0;
    for (const Complex& z : f.data) s += std::norm(z);
    return std::sqrt(s * dvol);
}

double top_shell_energy_fraction(const GridField& spectrum) {
    double total = 0.0, shell = 0.0;
    const std::size_t nn = spectrum.spec.total_nodes();
    std::vector<int> idx;
    for (std::size_t i = 0; i < nn; ++i) {
        double e = 0.0;
        for (int c = 0; c < spectrum.k; ++c) e += std::norm(spectrum.at(i, c));
        spectrum.unflatten(i, idx);
        bool top = false;
        for (int j = 0; j < spectrum.spec.d; ++j) {
            double frac = std::abs(spectrum.spec.mode_number(j, idx[j])) /
                          (spectrum.spec.n[j] / 2.0);
            if (frac >= 2.0 / 3.0) top = true;
        }
        total += e;
        if (top) shell += e;
    }
    return total > 0.0 ? shell / total : 0.0;
}

double boundary_shell_energy_fraction(const GridField& f, int axis,
                                      double margin_frac) {
    double total = 0.0, shell = 0.0;
    const std::size_t nn = f.spec.total_nodes();
    const double half = 0.5 * f.spec.length[axis];
    std::vector<int> idx;
    for (std::size_t i = 0; i < nn; ++i) {
        double e = 0.0;
        for (int c = 0; c < f.k; ++c) e += std::norm(f.at(i, c));
        f.unflatten(i, idx);
        total += e;
        if (std::abs(f.spec.node_coord(axis, idx[axis])) >= (1.0 - margin_frac) * half)
            shell += e;
    }
    return total > 0.0 ? shell / total : 0.0;
}

} // namespace jumpwave
