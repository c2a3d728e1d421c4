#include "jumpwave/duhamel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include <boost/math/quadrature/gauss.hpp>

#include "jumpwave/fit.hpp"

namespace jumpwave {

namespace {

// Gauss-Legendre nodes/weights on [a, b]; n in {8, 16, 32, 64}.
void gl_rule(int n, double a, double b, std::vector<double>& xs,
             std::vector<double>& ws) {
    auto fill = [&](const auto& absc, const auto& wts) {
        xs.clear();
        ws.clear();
        const double mid = 0.5 * (a + b), rad = 0.5 * (b - a);
        const std::size_t half = absc.size();
        for (std::size_t i = half; i-- > 0;)
            if (absc[i] > 0.0) {
                xs.push_back(mid - rad * absc[i]);
                ws.push_back(rad * wts[i]);
            }
        for (std::size_t i = 0; i < half; ++i) {
            xs.push_back(mid + rad * absc[i]);
            ws.push_back(rad * wts[i]);
        }
    };
    using boost::math::quadrature::gauss;
    switch (n) {
        case 8: fill(gauss<double, 8>::abscissa(), gauss<double, 8>::weights()); break;
        case 16: fill(gauss<double, 16>::abscissa(), gauss<double, 16>::weights()); break;
        case 64: fill(gauss<double, 64>::abscissa(), gauss<double, 64>::weights()); break;
        case 32:
        default: fill(gauss<double, 32>::abscissa(), gauss<double, 32>::weights()); break;
    }
}

// Eigendecomposition with columns sorted by eigenvalue and clustered at the
// relative tolerance of spectral_decompose.
struct SortedEigen {
    std::vector<double> values;        // k sorted real eigenvalues
    Mat v;                             // eigenvector columns, sorted
    Mat w;                             // rows of V^{-1}, same order
    std::vector<int> cluster_start;    // distinct-eigenvalue column starts
    std::vector<double> cluster_value;
};

SortedEigen decompose_sorted(const Mat& a) {
    const int k = static_cast<int>(a.rows());
    SortedEigen out;
    const double mat_scale = std::max(a.cwiseAbs().maxCoeff(), 1e-300);
    if ((a - a.adjoint()).cwiseAbs().maxCoeff() <= 1e-13 * mat_scale) {
        Eigen::SelfAdjointEigenSolver<Mat> es(a);
        out.values.assign(es.eigenvalues().data(), es.eigenvalues().data() + k);
        out.v = es.eigenvectors();
        out.w = out.v.adjoint();
    } else {
        Eigen::ComplexEigenSolver<Mat> es(a, true);
        double im_max = 0.0, sc = 0.0;
        for (int i = 0; i < k; ++i) {
            im_max = std::max(im_max, std::abs(es.eigenvalues()(i).imag()));
            sc = std::max(sc, std::abs(es.eigenvalues()(i)));
        }
        if (im_max > 1e-9 * std::max(sc, 1e-300))
            throw ContractError("duhamel: non-real spectrum, not hyperbolic");
        std::vector<int> order(k);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int i, int j) {
            return es.eigenvalues()(i).real() < es.eigenvalues()(j).real();
        });
        out.v.resize(k, k);
        for (int c = 0; c < k; ++c) out.v.col(c) = es.eigenvectors().col(order[c]);
        Eigen::JacobiSVD<Mat> svd(out.v);
        if (svd.singularValues()(0) >
            1e8 * std::max(svd.singularValues()(k - 1), 1e-300))
            throw ContractError("duhamel: defective symbol, not strongly diagonalizable");
        out.w = out.v.inverse();
        out.values.resize(k);
        for (int c = 0; c < k; ++c) out.values[c] = es.eigenvalues()(order[c]).real();
    }
    double scale = std::max(std::abs(out.values.front()), std::abs(out.values.back()));
    scale = std::max(scale, 1e-300);
    for (int c = 0; c < k; ++c) {
        if (c == 0 || out.values[c] - out.cluster_value.back() > 1e-8 * scale) {
            out.cluster_start.push_back(c);
            out.cluster_value.push_back(out.values[c]);
        }
    }
    return out;
}

} // namespace

// Flat per-mode eigendata. pi_i = sum over cluster columns c of v_c w_c^T;
// b_i holds the accumulated Duhamel response per distinct eigenvalue.
struct DuhamelSolver::Tables {
    std::vector<int> eig_offset;       // per mode -> start in lambda[]
    std::vector<double> lambda;
    std::vector<int> cluster_offset;   // per distinct eigenvalue -> column
    std::vector<Complex> v;            // per mode: k*k (column-major blocks)
    std::vector<Complex> w;
    std::vector<Complex> b;
};

DuhamelSolver::~DuhamelSolver() = default;

DuhamelSolver::DuhamelSolver(const HyperbolicSystem& sys, const GridSpec& spec,
                             const std::function<GridField(double)>& sample_at,
                             double t_support_end, const DuhamelOptions& opts)
    : sys_(sys), spec_(spec), t_end_(t_support_end), opts_(opts),
      sample_(sample_at), tables_(new Tables) {
    sys_.validate();
    spec_.validate();
    if (spec_.d != sys_.d)
        throw InputError("DuhamelSolver: grid/system dimension mismatch");
    gl_rule(opts_.quadrature_nodes, 0.0, t_end_, quad_nodes_, quad_weights_);

    const std::size_t nn = spec_.total_nodes();
    const int k = sys_.k;
    Tables& tabs = *tables_;
    tabs.eig_offset.assign(nn + 1, 0);
    tabs.v.assign(nn * k * k, Complex(0));
    tabs.w.assign(nn * k * k, Complex(0));

    // Pass 1: per-mode eigendecomposition. Threads own disjoint strided
    // ranges, so the layout is independent of the thread count.
    const int nthreads = std::max(1, opts_.threads);
    std::vector<int> eig_count(nn, 0);
    std::vector<std::vector<double>> lam_parts(nthreads);
    std::vector<std::vector<int>> clu_parts(nthreads);
    {
        std::vector<std::thread> pool;
        for (int tid = 0; tid < nthreads; ++tid) {
            pool.emplace_back([&, tid] {
                std::vector<int> idx;
                RealVec xi(spec_.d);
                for (std::size_t m = tid; m < nn; m += std::size_t(nthreads)) {
                    spec_.unflatten(m, idx);
                    for (int j = 0; j < spec_.d; ++j)
                        xi(j) = spec_.frequency(j, idx[j]);
                    SortedEigen se = decompose_sorted(assemble_symbol(sys_, xi));
                    eig_count[m] = static_cast<int>(se.cluster_start.size());
                    for (std::size_t i = 0; i < se.cluster_start.size(); ++i) {
                        lam_parts[tid].push_back(se.cluster_value[i]);
                        clu_parts[tid].push_back(se.cluster_start[i]);
                    }
                    for (int c = 0; c < k; ++c)
                        for (int r = 0; r < k; ++r) {
                            tabs.v[(m * k + c) * k + r] = se.v(r, c);
                            tabs.w[(m * k + c) * k + r] = se.w(c, r);
                        }
                }
            });
        }
        for (auto& th : pool) th.join();
    }
    for (std::size_t m = 0; m < nn; ++m)
        tabs.eig_offset[m + 1] = tabs.eig_offset[m] + eig_count[m];
    tabs.lambda.assign(tabs.eig_offset[nn], 0.0);
    tabs.cluster_offset.assign(tabs.eig_offset[nn], 0);
    {
        std::vector<std::size_t> cursor(nthreads, 0);
        for (std::size_t m = 0; m < nn; ++m) {
            const int tid = static_cast<int>(m % nthreads);
            for (int i = 0; i < eig_count[m]; ++i) {
                tabs.lambda[tabs.eig_offset[m] + i] = lam_parts[tid][cursor[tid]];
                tabs.cluster_offset[tabs.eig_offset[m] + i] = clu_parts[tid][cursor[tid]];
                ++cursor[tid];
            }
        }
    }

    // Pass 2: stream the source transform over the quadrature nodes,
    // accumulating b_i = sum_q w_q exp(-i s_q lambda_i) (pi_i fhat(s_q)).
    tabs.b.assign(std::size_t(tabs.eig_offset[nn]) * k, Complex(0));
    for (std::size_t q = 0; q < quad_nodes_.size(); ++q) {
        GridField fq = sample_(quad_nodes_[q]);
        if (fq.k != k) throw InputError("DuhamelSolver: source component mismatch");
        GridField fhat = fft_forward(fq);
        warnings_.top_shell_fraction = std::max(warnings_.top_shell_fraction,
                                                top_shell_energy_fraction(fhat));
        std::vector<std::thread> pool;
        for (int tid = 0; tid < nthreads; ++tid) {
            pool.emplace_back([&, tid] {
                for (std::size_t m = tid; m < nn; m += std::size_t(nthreads)) {
                    const int off = tabs.eig_offset[m];
                    const int ne = tabs.eig_offset[m + 1] - off;
                    for (int i = 0; i < ne; ++i) {
                        const int c0 = tabs.cluster_offset[off + i];
                        const int c1 = (i + 1 < ne) ? tabs.cluster_offset[off + i + 1] : k;
                        const Complex wgt =
                            quad_weights_[q] *
                            std::exp(Complex(0.0, -quad_nodes_[q] * tabs.lambda[off + i]));
                        for (int c = c0; c < c1; ++c) {
                            Complex coef = 0.0;
                            for (int r = 0; r < k; ++r)
                                coef += tabs.w[(m * k + c) * k + r] * fhat.at(m, r);
                            coef *= wgt;
                            for (int r = 0; r < k; ++r)
                                tabs.b[std::size_t(off + i) * k + r] +=
                                    coef * tabs.v[(m * k + c) * k + r];
                        }
                    }
                }
            });
        }
        for (auto& th : pool) th.join();
    }
    warnings_.aliasing = warnings_.top_shell_fraction > opts_.aliasing_threshold;
}

GridField DuhamelSolver::accumulate(double t) const {
    const Tables& tabs = *tables_;
    const std::size_t nn = spec_.total_nodes();
    const int k = sys_.k;
    GridField spectrum(spec_, k, t);
    for (std::size_t m = 0; m < nn; ++m) {
        const int off = tabs.eig_offset[m];
        const int ne = tabs.eig_offset[m + 1] - off;
        for (int i = 0; i < ne; ++i) {
            const Complex phase = std::exp(Complex(0.0, t * tabs.lambda[off + i]));
            for (int r = 0; r < k; ++r)
                spectrum.at(m, r) += phase * tabs.b[std::size_t(off + i) * k + r];
        }
    }
    return fft_inverse(spectrum);
}

GridField DuhamelSolver::solution_at(double t) const {
    if (t <= 0.0) return GridField(spec_, sys_.k, t);
    if (t >= t_end_) return accumulate(t);

    // Inside the source support: fresh Gauss-Legendre rule on [0, t].
    const Tables& tabs = *tables_;
    const std::size_t nn = spec_.total_nodes();
    const int k = sys_.k;
    std::vector<double> xs, ws;
    gl_rule(opts_.quadrature_nodes, 0.0, t, xs, ws);
    GridField spectrum(spec_, k, t);
    for (std::size_t q = 0; q < xs.size(); ++q) {
        GridField fhat = fft_forward(sample_(xs[q]));
        for (std::size_t m = 0; m < nn; ++m) {
            const int off = tabs.eig_offset[m];
            const int ne = tabs.eig_offset[m + 1] - off;
            for (int i = 0; i < ne; ++i) {
                const int c0 = tabs.cluster_offset[off + i];
                const int c1 = (i + 1 < ne) ? tabs.cluster_offset[off + i + 1] : k;
                const Complex wgt =
                    ws[q] * std::exp(Complex(0.0, (t - xs[q]) * tabs.lambda[off + i]));
                for (int c = c0; c < c1; ++c) {
                    Complex coef = 0.0;
                    for (int r = 0; r < k; ++r)
                        coef += tabs.w[(m * k + c) * k + r] * fhat.at(m, r);
                    coef *= wgt;
                    for (int r = 0; r < k; ++r)
                        spectrum.at(m, r) += coef * tabs.v[(m * k + c) * k + r];
                }
            }
        }
    }
    return fft_inverse(spectrum);
}

std::vector<GridField> solve_duhamel(const HyperbolicSystem& sys,
                                     const SourceModel& src,
                                     const GridSpec& spec,
                                     const std::vector<double>& output_times,
                                     SolverWarnings* warnings,
                                     const DuhamelOptions& opts) {
    DuhamelSolver solver(
        sys, spec, [&](double t) { return sample_source(src, spec, t); },
        src.support_end(), opts);
    std::vector<GridField> out;
    out.reserve(output_times.size());
    for (double t : output_times) out.push_back(solver.solution_at(t));
    if (warnings) *warnings = solver.warnings();
    return out;
}

GridField scalar_evolve(const SheetModel& sheet, const GridField& w0, double t,
                        double out_of_cone_tol) {
    const GridSpec& spec = w0.spec;
    if (spec.d != 2)
        throw InputError("scalar_evolve: implemented for d = 2");
    GridField spectrum = fft_forward(w0);
    const std::size_t nn = spec.total_nodes();
    double total = 0.0, outside = 0.0;
    std::vector<int> idx;
    for (std::size_t m = 0; m < nn; ++m) {
        spec.unflatten(m, idx);
        const double xi1 = spec.frequency(0, idx[0]);
        const double xi2 = spec.frequency(1, idx[1]);
        double e = 0.0;
        for (int c = 0; c < spectrum.k; ++c) e += std::norm(spectrum.at(m, c));
        total += e;
        const double r = std::hypot(xi1, xi2);
        bool in_cone = true;
        double lambda = 0.0;    // zero mode: lambda = 0 by homogeneity
        if (r >= 1e-300) {
            const double ang = std::acos(std::min(1.0, std::abs(xi1) / r));
            in_cone = ang <= sheet.cone_halfangle();
            if (in_cone) lambda = sheet.value_fast(xi1, xi2);
        }
        if (!in_cone) {
            outside += e;
            for (int c = 0; c < spectrum.k; ++c) spectrum.at(m, c) = 0.0;
        } else {
            const Complex phase = std::exp(Complex(0.0, -t * lambda));
            for (int c = 0; c < spectrum.k; ++c) spectrum.at(m, c) *= phase;
        }
    }
    if (total > 0.0 && outside / total > out_of_cone_tol)
        throw ContractError("scalar_evolve: out-of-cone energy fraction " +
                            std::to_string(outside / total) +
                            " violates the in-cone support contract");
    GridField out = fft_inverse(spectrum);
    out.time = w0.time + t;
    return out;
}

MicrolocalSplit microlocal_split(const GridField& u, const CutoffSymbol& cutoff,
                                 const SheetModel& sheet) {
    const GridSpec& spec = u.spec;
    if (spec.d != 2)
        throw InputError("microlocal_split: implemented for d = 2");
    if (cutoff.theta_outer > sheet.cone_halfangle() + 1e-12)
        throw ContractError("microlocal_split: cutoff cone exceeds the fitted sheet cone");
    GridField spectrum = fft_forward(u);
    GridField far_s(spec, u.k, u.time), branch_s(spec, u.k, u.time),
        rest_s(spec, u.k, u.time);
    MicrolocalSplit split;
    std::vector<int> idx;
    Vec mode(u.k), pv(u.k);
    for (std::size_t m = 0; m < spec.total_nodes(); ++m) {
        spec.unflatten(m, idx);
        const double xi1 = spec.frequency(0, idx[0]);
        const double xi2 = spec.frequency(1, idx[1]);
        const double r = std::hypot(xi1, xi2);
        double c;
        if (r < 1e-300) {
            c = 1.0;   // zero-mode convention, flagged
            ++split.chi_zero_mode_uses;
        } else {
            c = cutoff.chi2(xi1, xi2);
        }
        for (int q = 0; q < u.k; ++q) mode(q) = spectrum.at(m, q);
        for (int q = 0; q < u.k; ++q) far_s.at(m, q) = (1.0 - c) * mode(q);
        if (c == 0.0) continue;
        Mat pi;
        if (r < 1e-300) {
            pi = identity(u.k);
        } else {
            // The branch value is known from the sheet table; take the
            // eigenvalue cluster of A(xi) containing it.
            RealVec xi(2);
            xi << xi1, xi2;
            const double lambda = sheet.value_fast(xi1, xi2);
            SpectralDecomposition dec = spectral_decompose(sheet.system(), xi);
            int best = 0;
            for (int i = 0; i < dec.size(); ++i)
                if (std::abs(dec.eigenvalues[i] - lambda) <
                    std::abs(dec.eigenvalues[best] - lambda))
                    best = i;
            pi = dec.projectors[best];
        }
        pv = pi * mode;
        for (int q = 0; q < u.k; ++q) {
            branch_s.at(m, q) = c * pv(q);
            rest_s.at(m, q) = c * (mode(q) - pv(q));
        }
    }
    split.far = fft_inverse(far_s);
    split.branch = fft_inverse(branch_s);
    split.rest = fft_inverse(rest_s);
    return split;
}

std::vector<Vec> extract_jump(const GridField& u, int order) {
    const GridSpec& spec = u.spec;
    if (spec.d != 2) throw InputError("extract_jump: implemented for d = 2");
    if (order < 0 || order > 1)
        throw InputError("extract_jump: order must be 0 or 1");
    const int n0 = spec.n[0], n1 = spec.n[1];
    const int j0 = spec.zero_index(0);
    const int p = 5;
    if (j0 + p >= n0 || j0 - p < 0)
        throw DomainError("extract_jump: extrapolation stencil leaves the box",
                          p * spec.spacing(0));
    const double h = spec.spacing(0);
    std::vector<Vec> out;
    out.reserve(n1);
    std::vector<Vec> plus(p, Vec(u.k)), minus(p, Vec(u.k));
    for (int ix = 0; ix < n1; ++ix) {
        for (int j = 1; j <= p; ++j) {
            for (int c = 0; c < u.k; ++c) {
                plus[j - 1](c) = u.at(std::size_t(j0 + j) * n1 + ix, c);
                minus[j - 1](c) = u.at(std::size_t(j0 - j) * n1 + ix, c);
            }
        }
        Vec vp, dp, vm, dm;
        one_sided_extrapolate(plus, h, vp, dp);
        one_sided_extrapolate(minus, -h, vm, dm);
        out.push_back(order == 0 ? Vec(vp - vm) : Vec(dp - dm));
    }
    return out;
}

} // namespace jumpwave
