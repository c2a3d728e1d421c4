#include "jumpwave/hyperplane.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <map>
#include <mutex>

#include <fftw3.h>

namespace jumpwave {

void HyperplaneGrid::validate() const {
    if (nt < 2) throw InputError("hyperplane grid: need at least 2 time samples");
    if (!(t_end > 0.0)) throw InputError("hyperplane grid: t_end must be positive");
    if (nx < 8) throw InputError("hyperplane grid: need at least 8 transverse samples");
    if (!(x_len > 0.0)) throw InputError("hyperplane grid: x_len must be positive");
    if (periodic && (nx & (nx - 1)) != 0)
        throw InputError("hyperplane grid: periodic transverse axis needs a power-of-two size");
}

double HyperplaneGrid::frequency(int ix) const {
    int m = ix < nx / 2 ? ix : ix - nx;
    return 2.0 * M_PI * m / x_len;
}

HyperplaneField::HyperplaneField(const HyperplaneGrid& g, int k)
    : grid_(g), k_(k), data_(std::size_t(g.nt) * g.nx * k, Complex(0)) {
    g.validate();
}

Vec HyperplaneField::vec_at(int it, int ix) const {
    Vec v(k_);
    for (int c = 0; c < k_; ++c) v(c) = at(it, ix, c);
    return v;
}

void HyperplaneField::set_vec(int it, int ix, const Vec& v) {
    for (int c = 0; c < k_; ++c) at(it, ix, c) = v(c);
}

namespace {

// Catmull-Rom weights for the unit interval offset u in [0,1].
inline void catmull_rom(double u, double w[4]) {
    const double u2 = u * u, u3 = u2 * u;
    w[0] = 0.5 * (-u3 + 2 * u2 - u);
    w[1] = 0.5 * (3 * u3 - 5 * u2 + 2);
    w[2] = 0.5 * (-3 * u3 + 4 * u2 + u);
    w[3] = 0.5 * (u3 - u2);
}

} // namespace

Vec HyperplaneField::interp_x(int it, double x) const {
    const double dx = grid_.dx();
    double s = (x + 0.5 * grid_.x_len) / dx;
    if (!grid_.periodic) {
        if (s < 1.0 || s > grid_.nx - 3.0)
            throw DomainError("hyperplane interpolation outside sampled x' domain",
                              std::abs(x) + 2 * dx);
    }
    double fl = std::floor(s);
    int j = static_cast<int>(fl);
    double u = s - fl;
    double w[4];
    catmull_rom(u, w);
    Vec out = Vec::Zero(k_);
    for (int m = -1; m <= 2; ++m) {
        int jj = j + m;
        if (grid_.periodic) {
            jj %= grid_.nx;
            if (jj < 0) jj += grid_.nx;
        } else {
            jj = std::clamp(jj, 0, grid_.nx - 1);
        }
        for (int c = 0; c < k_; ++c) out(c) += w[m + 1] * at(it, jj, c);
    }
    return out;
}

Vec HyperplaneField::interp(double t, double x) const {
    const double dt = grid_.dt();
    double s = t / dt;
    if (s < -1e-9 || s > grid_.nt - 1 + 1e-9)
        throw DomainError("hyperplane interpolation outside sampled time range", t);
    s = std::clamp(s, 0.0, double(grid_.nt - 1));
    double fl = std::floor(s);
    int i = static_cast<int>(fl);
    double u = s - fl;
    if (u < 1e-12) return interp_x(i, x);
    double w[4];
    catmull_rom(u, w);
    Vec out = Vec::Zero(k_);
    for (int m = -1; m <= 2; ++m) {
        int ii = std::clamp(i + m, 0, grid_.nt - 1);
        out += w[m + 1] * interp_x(ii, x);
    }
    return out;
}

double HyperplaneField::sup_at_time(int it) const {
    double m = 0.0;
    for (int ix = 0; ix < grid_.nx; ++ix) {
        double s = 0.0;
        for (int c = 0; c < k_; ++c) s += std::norm(at(it, ix, c));
        m = std::max(m, s);
    }
    return std::sqrt(m);
}

void HyperplaneField::write_csv(const std::string& path) const {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw InputError("cannot write " + path);
    std::fprintf(f, "t,x");
    for (int c = 0; c < k_; ++c) std::fprintf(f, ",re%d,im%d", c, c);
    std::fprintf(f, "\n");
    for (int it = 0; it < grid_.nt; ++it)
        for (int ix = 0; ix < grid_.nx; ++ix) {
            std::fprintf(f, "%.17g,%.17g", grid_.time(it), grid_.x(ix));
            for (int c = 0; c < k_; ++c)
                std::fprintf(f, ",%.17g,%.17g", at(it, ix, c).real(), at(it, ix, c).imag());
            std::fprintf(f, "\n");
        }
    std::fclose(f);
}

HyperplaneField sample_hyperplane(const HyperplaneGrid& g, int k,
                                  const std::function<Vec(double, double)>& fn) {
    HyperplaneField f(g, k);
    for (int it = 0; it < g.nt; ++it)
        for (int ix = 0; ix < g.nx; ++ix) f.set_vec(it, ix, fn(g.time(it), g.x(ix)));
    return f;
}

namespace {

struct Plan1D {
    fftw_plan fwd = nullptr, bwd = nullptr;
    fftw_complex* buf = nullptr;
};

Plan1D& plan1d_for(int n) {
    static std::map<int, Plan1D> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    Plan1D p;
    p.buf = fftw_alloc_complex(n);
    p.fwd = fftw_plan_dft_1d(n, p.buf, p.buf, FFTW_FORWARD, FFTW_ESTIMATE);
    p.bwd = fftw_plan_dft_1d(n, p.buf, p.buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    return cache.emplace(n, p).first->second;
}

// Spectral x'-derivative of one time row, all components in place.
void spectral_x_derivative_row(const HyperplaneGrid& g, int k,
                               std::vector<Complex>& row, int order) {
    Plan1D& plan = plan1d_for(g.nx);
    std::vector<Complex> comp(g.nx);
    for (int c = 0; c < k; ++c) {
        for (int ix = 0; ix < g.nx; ++ix) comp[ix] = row[std::size_t(ix) * k + c];
        std::memcpy(plan.buf, comp.data(), g.nx * sizeof(Complex));
        fftw_execute(plan.fwd);
        std::memcpy(comp.data(), plan.buf, g.nx * sizeof(Complex));
        for (int ix = 0; ix < g.nx; ++ix) {
            Complex mult = std::pow(Complex(0.0, g.frequency(ix)), order);
            // Nyquist mode of an odd-order derivative is annihilated.
            if (order % 2 == 1 && ix == g.nx / 2) mult = 0.0;
            comp[ix] *= mult / double(g.nx);
        }
        std::memcpy(plan.buf, comp.data(), g.nx * sizeof(Complex));
        fftw_execute(plan.bwd);
        std::memcpy(comp.data(), plan.buf, g.nx * sizeof(Complex));
        for (int ix = 0; ix < g.nx; ++ix) row[std::size_t(ix) * k + c] = comp[ix];
    }
}

// 4th-order finite-difference x'-derivative for the non-periodic case.
void fd_x_derivative_row(const HyperplaneGrid& g, int k,
                         const std::vector<Complex>& in,
                         std::vector<Complex>& out, int order) {
    const double h = g.dx();
    auto v = [&](int ix, int c) { return in[std::size_t(ix) * k + c]; };
    for (int ix = 0; ix < g.nx; ++ix)
        for (int c = 0; c < k; ++c) {
            Complex d;
            if (order == 1) {
                if (ix >= 2 && ix <= g.nx - 3)
                    d = (v(ix - 2, c) - 8.0 * v(ix - 1, c) + 8.0 * v(ix + 1, c) -
                         v(ix + 2, c)) / (12.0 * h);
                else if (ix < 2)
                    d = (-25.0 * v(ix, c) + 48.0 * v(ix + 1, c) - 36.0 * v(ix + 2, c) +
                         16.0 * v(ix + 3, c) - 3.0 * v(ix + 4, c)) / (12.0 * h);
                else
                    d = (25.0 * v(ix, c) - 48.0 * v(ix - 1, c) + 36.0 * v(ix - 2, c) -
                         16.0 * v(ix - 3, c) + 3.0 * v(ix - 4, c)) / (12.0 * h);
            } else {
                if (ix >= 2 && ix <= g.nx - 3)
                    d = (-v(ix - 2, c) + 16.0 * v(ix - 1, c) - 30.0 * v(ix, c) +
                         16.0 * v(ix + 1, c) - v(ix + 2, c)) / (12.0 * h * h);
                else if (ix < 2)
                    d = (2.0 * v(ix, c) - 5.0 * v(ix + 1, c) + 4.0 * v(ix + 2, c) -
                         v(ix + 3, c)) / (h * h);
                else
                    d = (2.0 * v(ix, c) - 5.0 * v(ix - 1, c) + 4.0 * v(ix - 2, c) -
                         v(ix - 3, c)) / (h * h);
            }
            out[std::size_t(ix) * k + c] = d;
        }
}

} // namespace

void spectral_shift_row(std::vector<Complex>& row, const HyperplaneGrid& g,
                        double delta) {
    if (!g.periodic) throw InputError("spectral_shift_row: periodic grids only");
    if (static_cast<int>(row.size()) != g.nx)
        throw InputError("spectral_shift_row: row length mismatch");
    Plan1D& plan = plan1d_for(g.nx);
    std::memcpy(plan.buf, row.data(), g.nx * sizeof(Complex));
    fftw_execute(plan.fwd);
    std::memcpy(row.data(), plan.buf, g.nx * sizeof(Complex));
    for (int ix = 0; ix < g.nx; ++ix)
        row[ix] *= std::exp(Complex(0.0, -g.frequency(ix) * delta)) / double(g.nx);
    std::memcpy(plan.buf, row.data(), g.nx * sizeof(Complex));
    fftw_execute(plan.bwd);
    std::memcpy(row.data(), plan.buf, g.nx * sizeof(Complex));
}

TangentialOperator::TangentialOperator(const HyperbolicSystem& sys) : sys_(sys) {
    sys_.validate();
    if (sys_.d != 2)
        throw InputError("TangentialOperator: implemented for d = 2 (one transverse axis)");
}

HyperplaneField TangentialOperator::x_derivative(const HyperplaneField& f, int order) {
    const HyperplaneGrid& g = f.grid();
    HyperplaneField out(g, f.k());
    std::vector<Complex> row(std::size_t(g.nx) * f.k());
    for (int it = 0; it < g.nt; ++it) {
        for (int ix = 0; ix < g.nx; ++ix)
            for (int c = 0; c < f.k(); ++c) row[std::size_t(ix) * f.k() + c] = f.at(it, ix, c);
        if (g.periodic) {
            spectral_x_derivative_row(g, f.k(), row, order);
        } else {
            std::vector<Complex> der(row.size());
            fd_x_derivative_row(g, f.k(), row, der, order);
            row.swap(der);
        }
        for (int ix = 0; ix < g.nx; ++ix)
            for (int c = 0; c < f.k(); ++c) out.at(it, ix, c) = row[std::size_t(ix) * f.k() + c];
    }
    return out;
}

HyperplaneField TangentialOperator::apply(const HyperplaneField& f) const {
    const HyperplaneGrid& g = f.grid();
    const int k = f.k();
    if (k != sys_.k) throw InputError("TangentialOperator: component count mismatch");
    const double dt = g.dt();

    HyperplaneField out = x_derivative(f, 1);
    // out currently holds d/dx' f; multiply by A2 and add the time derivative.
    for (int it = 0; it < g.nt; ++it)
        for (int ix = 0; ix < g.nx; ++ix) {
            Vec dx = out.vec_at(it, ix);
            Vec v = sys_.A[1] * dx;

            Vec dtv(k);
            auto val = [&](int i) { return f.vec_at(i, ix); };
            if (it >= 2 && it <= g.nt - 3)
                dtv = (val(it - 2) - 8.0 * val(it - 1) + 8.0 * val(it + 1) -
                       val(it + 2)) / (12.0 * dt);
            else if (it < 2)
                dtv = (-25.0 * val(it) + 48.0 * val(it + 1) - 36.0 * val(it + 2) +
                       16.0 * val(it + 3) - 3.0 * val(it + 4)) / (12.0 * dt);
            else
                dtv = (25.0 * val(it) - 48.0 * val(it - 1) + 36.0 * val(it - 2) -
                       16.0 * val(it - 3) + 3.0 * val(it - 4)) / (12.0 * dt);
            out.set_vec(it, ix, v + dtv);
        }
    return out;
}

} // namespace jumpwave
