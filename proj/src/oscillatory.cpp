#include "jumpwave/oscillatory.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "jumpwave/fit.hpp"

namespace jumpwave {

namespace {

using Fn = std::function<double(double)>;

// ---------------------------------------------------------------------------
// Gauss-Kronrod 15/7 panel rule from the boost node tables. Works on real
// integrands; complex integrands are split by the callers.
// ---------------------------------------------------------------------------

double gk15(const Fn& f, double a, double b, double* err) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    using G7 = boost::math::quadrature::gauss<double, 7>;
    const auto& xk = GK::abscissa();   // 8 non-negative nodes, [0] = 0
    const auto& wk = GK::weights();
    const auto& wg = G7::weights();    // 4 weights for nodes 0,2,4,6
    const double mid = 0.5 * (a + b), rad = 0.5 * (b - a);
    const double f0 = f(mid);
    double sk = wk[0] * f0;
    double sg = wg[0] * f0;
    for (std::size_t i = 1; i < xk.size(); ++i) {
        const double fp = f(mid + rad * xk[i]);
        const double fm = f(mid - rad * xk[i]);
        sk += wk[i] * (fp + fm);
        if (i % 2 == 0) sg += wg[i / 2] * (fp + fm);
    }
    if (err) *err = rad * std::abs(sk - sg);
    return rad * sk;
}

// Adaptive version for smooth (or mildly oscillatory) real integrands.
double adaptive_gk(const Fn& f, double a, double b, double tol, int depth = 0) {
    double err;
    double v = gk15(f, a, b, &err);
    if (err <= tol || depth >= 28) return v;
    const double m = 0.5 * (a + b);
    return adaptive_gk(f, a, m, tol / 2, depth + 1) +
           adaptive_gk(f, m, b, tol / 2, depth + 1);
}

// ---------------------------------------------------------------------------
// The sin-kernel oscillatory engine: integral of g(eta) sin(psi(eta)) over a
// monotone-phase piece. Panels between consecutive phase multiples of pi
// alternate in sign with slowly varying magnitude; enormous spans are
// resummed from a few boundary panels by an Euler (Abel) transform, with
// the first omitted difference as the error estimate.
// ---------------------------------------------------------------------------

struct PieceResult {
    double value = 0.0;
    double err = 0.0;
    long panels = 0;
};

class SinOsc {
public:
    SinOsc(const Fn& g, const Fn& psi, const Fn& dpsi, const OscOptions& opts)
        : g_(g), psi_(psi), dpsi_(dpsi), opts_(opts) {}

    PieceResult finite_piece(double lo, double hi) const;
    PieceResult semiopen_piece(double lo, double probe_hi) const;

private:
    PieceResult finite_piece_resummed(double lo, double hi, long D, int m) const;
    double panel(double e0, double e1, double* err) const {
        return gk15([this](double x) { return g_(x) * std::sin(psi_(x)); }, e0,
                    e1, err);
    }

    // Solves psi(eta) = target on the monotone bracket [blo, bhi].
    double solve_phase(double target, double blo, double bhi) const;

    // Euler (Abel) head sum of the alternating tail sum_{i>=0} (-1)^i s_i
    // from m leading samples. err gets the last used difference magnitude.
    static double euler_head(const std::vector<double>& s, double* err);

    const Fn &g_, &psi_, &dpsi_;
    const OscOptions& opts_;
};

double SinOsc::solve_phase(double target, double blo, double bhi) const {
    double flo = psi_(blo) - target, fhi = psi_(bhi) - target;
    if (flo == 0.0) return blo;
    if (fhi == 0.0) return bhi;
    if ((flo > 0) == (fhi > 0)) {
        // Roundoff at a panel seam; return the nearer endpoint.
        return std::abs(flo) < std::abs(fhi) ? blo : bhi;
    }
    double a = blo, b = bhi;
    for (int it = 0; it < 200; ++it) {
        double m = 0.5 * (a + b);
        // Newton step when it stays inside the bracket.
        const double dm = dpsi_(m);
        if (dm != 0.0) {
            const double n = m - (psi_(m) - target) / dm;
            if (n > a && n < b) m = n;
        }
        const double fm = psi_(m) - target;
        if (fm == 0.0 || b - a < 1e-15 * (std::abs(a) + std::abs(b)) + 1e-300)
            return m;
        if ((fm > 0) == (flo > 0)) {
            a = m;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

double SinOsc::euler_head(const std::vector<double>& s, double* err) {
    std::vector<double> diff(s);
    double acc = 0.0, pw = 0.5, last = 0.0;
    const std::size_t m = s.size();
    for (std::size_t i = 0; i < m; ++i) {
        const double sign = (i % 2 == 0) ? 1.0 : -1.0;
        last = sign * diff[0] * pw;
        acc += last;
        pw *= 0.5;
        for (std::size_t j = 0; j + i + 1 < m; ++j) diff[j] = diff[j + 1] - diff[j];
    }
    if (err) *err = std::abs(last);
    return acc;
}

PieceResult SinOsc::finite_piece(double lo, double hi) const {
    PieceResult out;
    const double theta0 = psi_(lo);
    const double span = psi_(hi) - theta0;
    const double aspan = std::abs(span);
    if (aspan < 1.5 * M_PI) {
        double err;
        out.value = panel(lo, hi, &err);
        out.err = err;
        out.panels = 1;
        return out;
    }
    const double sigma = span > 0 ? 1.0 : -1.0;
    const long total = static_cast<long>(std::floor(aspan / M_PI));

    auto march_all = [&]() {
        PieceResult pr;
        double prev = lo;
        for (long j = 0; j < total; ++j) {
            const double target = theta0 + sigma * (j + 1) * M_PI;
            const double nxt = solve_phase(target, prev, hi);
            double perr;
            pr.value += panel(prev, nxt, &perr);
            pr.err += perr;
            ++pr.panels;
            prev = nxt;
        }
        double perr;
        pr.value += panel(prev, hi, &perr);   // partial end panel
        pr.err += perr;
        ++pr.panels;
        return pr;
    };

    if (total <= opts_.direct_panel_limit) return march_all();

    // Boundary-resummed path, enlarging the direct zones until the Euler
    // remainder estimate is below tolerance.
    int m = std::max(4, opts_.euler_terms);
    long D = std::max<long>(m + 8, 48);
    PieceResult best;
    bool have = false;
    while (2 * (D + m) + 8 < total) {
        PieceResult pr = finite_piece_resummed(lo, hi, D, m);
        if (!have || pr.err < best.err) {
            best = pr;
            have = true;
        }
        if (pr.err <= opts_.tol / 2) return pr;
        if (D >= 4096) break;
        D *= 4;
        m = std::min(m + 3, 16);
    }
    if (!have && total <= opts_.max_panels) return march_all();
    if (have) return best;
    throw AccuracyError("oscillatory integral: resummation failed to converge",
                        aspan);
}

PieceResult SinOsc::finite_piece_resummed(double lo, double hi, long D,
                                          int m) const {
    PieceResult out;
    const double theta0 = psi_(lo);
    const double span = psi_(hi) - theta0;
    const double sigma = span > 0 ? 1.0 : -1.0;
    const long total = static_cast<long>(std::floor(std::abs(span) / M_PI));

    auto march = [&](double eta_start, long j_begin, long count,
                     std::vector<double>& raws) {
        double prev = eta_start;
        for (long j = j_begin; j < j_begin + count; ++j) {
            const double target = theta0 + sigma * (j + 1) * M_PI;
            const double nxt = solve_phase(target, prev, hi);
            double perr;
            raws.push_back(panel(prev, nxt, &perr));
            out.err += perr;
            ++out.panels;
            prev = nxt;
        }
        return prev;
    };

    // Lower block: panels 0 .. D+m-1; the trailing m feed the Euler head.
    std::vector<double> raw_lo;
    const double eta_lo_end = march(lo, 0, D + m, raw_lo);

    // Upper block: panels total-D .. total-1 plus the partial end panel.
    const long q = total - D;
    const double eta_q = solve_phase(theta0 + sigma * q * M_PI, eta_lo_end, hi);
    std::vector<double> raw_hi;
    const double eta_hi_end = march(eta_q, q, D, raw_hi);

    for (long j = 0; j < D; ++j) out.value += raw_lo[j];
    for (double r : raw_hi) out.value += r;
    double perr;
    out.value += panel(eta_hi_end, hi, &perr);
    out.err += perr;
    ++out.panels;

    // Middle: sum_{j=D}^{q-1} raw_j = (-1)^D [A(D) - (-1)^{q-D} A(q)] with
    // d_j = (-1)^j raw_j and A the Euler-resummed alternating tail.
    std::vector<double> s_lo(m), s_hi(m);
    for (int i = 0; i < m; ++i) {
        const long jl = D + i;
        s_lo[i] = ((jl % 2 == 0) ? 1.0 : -1.0) * raw_lo[jl];
        const long jh = q + i;
        s_hi[i] = ((jh % 2 == 0) ? 1.0 : -1.0) * raw_hi[i];
    }
    double e1, e2;
    const double a_lo = euler_head(s_lo, &e1);
    const double a_hi = euler_head(s_hi, &e2);
    const double sign_d = (D % 2 == 0) ? 1.0 : -1.0;
    const double sign_qd = ((q - D) % 2 == 0) ? 1.0 : -1.0;
    out.value += sign_d * (a_lo - sign_qd * a_hi);
    out.err += e1 + e2;
    return out;
}

PieceResult SinOsc::semiopen_piece(double lo, double probe_hi) const {
    PieceResult out;
    const double theta0 = psi_(lo);
    // Phase direction just beyond lo (lo itself may be a stationary point).
    double sigma = 0.0;
    for (double step = std::max(std::abs(lo), 1.0) * 1e-6;
         step < probe_hi && sigma == 0.0; step *= 64.0) {
        const double d = dpsi_(lo + step);
        if (d != 0.0) sigma = d > 0 ? 1.0 : -1.0;
    }
    if (sigma == 0.0) sigma = 1.0;

    int m = std::max(4, opts_.euler_terms);
    long D = std::max<long>(m + 8, 48);
    while (true) {
        PieceResult pr;
        double prev = lo;
        std::vector<double> raws;
        for (long j = 0; j < D + m; ++j) {
            const double target = theta0 + sigma * (j + 1) * M_PI;
            // Bracket grows geometrically until the target phase is passed.
            double bhi = std::max(prev * 2.0, prev + 1.0);
            for (int it = 0; it < 400 && sigma * (psi_(bhi) - target) < 0; ++it)
                bhi = bhi * 2.0 + 1.0;
            const double nxt = solve_phase(target, prev, bhi);
            double perr;
            raws.push_back(panel(prev, nxt, &perr));
            pr.err += perr;
            ++pr.panels;
            prev = nxt;
        }
        for (long j = 0; j < D; ++j) pr.value += raws[j];
        std::vector<double> s(m);
        for (int i = 0; i < m; ++i) {
            const long j = D + i;
            s[i] = ((j % 2 == 0) ? 1.0 : -1.0) * raws[j];
        }
        double e1;
        const double ahead = euler_head(s, &e1);
        pr.value += ((D % 2 == 0) ? 1.0 : -1.0) * ahead;
        pr.err += e1;
        if (pr.err <= opts_.tol / 2 || D >= 8192) return pr;
        D *= 4;
        m = std::min(m + 3, 16);
    }
}

// Roots of dpsi inside (a, b) from hints plus a geometric scan.
std::vector<double> stationary_roots(const Fn& dpsi, double a, double b,
                                     const std::vector<double>& hints) {
    std::vector<double> roots;
    auto bisect = [&](double lo, double hi) {
        double flo = dpsi(lo);
        for (int it = 0; it < 120; ++it) {
            double m = 0.5 * (lo + hi);
            double fm = dpsi(m);
            if (fm == 0.0) return m;
            if ((fm > 0) == (flo > 0)) {
                lo = m;
                flo = fm;
            } else {
                hi = m;
            }
        }
        return 0.5 * (lo + hi);
    };
    const int n = 256;
    std::vector<double> xs(n + 1);
    const bool geometric = a > 0 && b / a > 100.0;
    for (int i = 0; i <= n; ++i)
        xs[i] = geometric ? a * std::pow(b / a, double(i) / n)
                          : a + (b - a) * double(i) / n;
    for (double h : hints)
        if (h > a && h < b) xs.push_back(h);
    std::sort(xs.begin(), xs.end());
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        const double f0 = dpsi(xs[i]), f1 = dpsi(xs[i + 1]);
        if (f0 == 0.0 && xs[i] > a) {
            roots.push_back(xs[i]);
        } else if ((f0 > 0) != (f1 > 0)) {
            roots.push_back(bisect(xs[i], xs[i + 1]));
        }
    }
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end(),
                            [&](double x, double y) {
                                return std::abs(x - y) <=
                                       1e-12 * (std::abs(x) + std::abs(y));
                            }),
                roots.end());
    return roots;
}

// integral of g sin(psi) over [a, b]; b may be +infinity, in which case the
// phase must eventually grow without bound and g must decay.
double sin_oscillatory(const Fn& g, const Fn& psi, const Fn& dpsi, double a,
                       double b, const std::vector<double>& hints,
                       const OscOptions& opts, double* err_out) {
    if (!(a >= 0.0) || (std::isfinite(b) && !(b > a)))
        throw InputError("oscillatory integral: need 0 <= a < b");
    const bool open = !std::isfinite(b);
    const double scan_hi = open ? std::max(a * 1e6, a + 1e6) : b;
    std::vector<double> roots = stationary_roots(dpsi, a, scan_hi, hints);

    SinOsc engine(g, psi, dpsi, opts);
    double value = 0.0, err = 0.0;
    double lo = a;
    PieceResult pr;
    for (double r : roots) {
        if (r <= lo) continue;
        pr = engine.finite_piece(lo, r);
        value += pr.value;
        err += pr.err;
        lo = r;
    }
    if (open) {
        pr = engine.semiopen_piece(lo, scan_hi);
    } else {
        pr = engine.finite_piece(lo, b);
    }
    value += pr.value;
    err += pr.err;
    if (err_out) *err_out = err;
    if (err > std::max(opts.tol, 1e-14))
        throw AccuracyError("oscillatory integral: estimated error " +
                                std::to_string(err) + " exceeds tolerance",
                            err);
    return value;
}

// Adaptive complex quadrature built on the same GK15 panel (smooth outer
// integrals against the transverse profile).
Complex adaptive_gk_complex(const std::function<Complex(double)>& f, double a,
                            double b, double tol, int depth = 0) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    using G7 = boost::math::quadrature::gauss<double, 7>;
    const auto& xk = GK::abscissa();
    const auto& wk = GK::weights();
    const auto& wg = G7::weights();
    const double mid = 0.5 * (a + b), rad = 0.5 * (b - a);
    const Complex f0 = f(mid);
    Complex sk = wk[0] * f0;
    Complex sg = wg[0] * f0;
    for (std::size_t i = 1; i < xk.size(); ++i) {
        const Complex fp = f(mid + rad * xk[i]);
        const Complex fm = f(mid - rad * xk[i]);
        sk += wk[i] * (fp + fm);
        if (i % 2 == 0) sg += wg[i / 2] * (fp + fm);
    }
    const double err = rad * std::abs(sk - sg);
    if (err <= tol || depth >= 24) return rad * sk;
    return adaptive_gk_complex(f, a, mid, tol / 2, depth + 1) +
           adaptive_gk_complex(f, mid, b, tol / 2, depth + 1);
}

} // namespace

// ---------------------------------------------------------------------------
// Public operations
// ---------------------------------------------------------------------------

OscResult oscillatory_integral(const Fn& g, const Fn& psi, const Fn& dpsi,
                               double a, double b,
                               const std::vector<double>& hints,
                               const OscOptions& opts) {
    // Complex integral of g e^{i psi} = int g sin(psi + pi/2) + i * int g sin(psi).
    OscResult out;
    double e1 = 0.0, e2 = 0.0;
    auto psi_shift = [&](double x) { return psi(x) + M_PI / 2; };
    const double re = sin_oscillatory(g, psi_shift, dpsi, a, b, hints, opts, &e1);
    const double im = sin_oscillatory(g, psi, dpsi, a, b, hints, opts, &e2);
    out.value = Complex(re, im);
    out.error = e1 + e2;
    return out;
}

double corput_integral(double x, double lambda_coef, double k, double a,
                       double b, double tol) {
    if (!(k > 0.0)) throw InputError("corput_integral: k must be positive");
    if (!(a > 0.0) || !(b > a) || !std::isfinite(b))
        throw InputError("corput_integral: interval must be bounded inside (0, inf)");
    OscOptions opts;
    opts.tol = tol;
    auto g = [](double e) { return 1.0 / e; };
    auto psi = [=](double e) { return x * e + lambda_coef / std::pow(e, k); };
    auto dpsi = [=](double e) {
        return x - k * lambda_coef / std::pow(e, k + 1);
    };
    std::vector<double> hints;
    if (x != 0.0 && lambda_coef != 0.0 && (x > 0) == (lambda_coef > 0))
        hints.push_back(std::pow(k * std::abs(lambda_coef) / std::abs(x),
                                 1.0 / (k + 1.0)));
    double err;
    return sin_oscillatory(g, psi, dpsi, a, b, hints, opts, &err);
}

namespace {

// Shared inner integral for the profile evaluators:
//   int_{lo}^{hi} chi(xi1, xi2) phi(xi1) sin(psi(xi1)) / xi1 dxi1
// with hi possibly infinite; when the phase converges at infinity the caller
// splits off a smooth tail instead.
struct InnerPhase {
    Fn psi, dpsi;
    std::vector<double> hints;
    double psi_limit = std::numeric_limits<double>::quiet_NaN();  // at xi1=inf
};

double inner_profile_integral(const CutoffSymbol& cutoff, double xi2,
                              const InnerPhase& ph, double xi1_max,
                              double tol) {
    const double lo_cone =
        std::abs(xi2) < 1e-300 ? 0.0 : std::abs(xi2) / std::tan(cutoff.theta_outer);
    const double lo = std::max(cutoff.radial_lo, lo_cone);
    auto g = [&](double e) { return cutoff.chi2(e, xi2) * cutoff.phi(e) / e; };
    OscOptions opts;
    opts.tol = tol;
    double err;

    const bool truncated = xi1_max > 0.0;
    if (truncated) {
        if (xi1_max <= lo) return 0.0;
        return sin_oscillatory(g, ph.psi, ph.dpsi, lo, xi1_max, ph.hints, opts, &err);
    }
    if (std::isfinite(ph.psi_limit)) {
        // Converging phase: cut where the remaining swing is below pi/2 and
        // the cutoffs are identically one, then integrate the smooth tail in
        // u = 1/xi1. The limit value of sin(psi) is subtracted so table
        // noise in the phase limit cannot reintroduce the (mathematically
        // absent) logarithmic divergence.
        const double sin_inf = std::sin(ph.psi_limit);
        if (std::abs(sin_inf) > 1e-6)
            throw ContractError(
                "profile integral: phase limit at xi1 = inf is not a sine "
                "zero; the tail does not converge");
        double cut = std::max(2.0 * cutoff.radial_hi,
                              std::abs(xi2) / std::tan(cutoff.theta_inner));
        for (int it = 0; it < 200; ++it) {
            if (std::abs(ph.psi(cut) - ph.psi_limit) < M_PI / 2) break;
            cut *= 2.0;
        }
        double v = 0.0;
        if (cut > lo)
            v = sin_oscillatory(g, ph.psi, ph.dpsi, lo, cut, ph.hints, opts, &err);
        v += adaptive_gk(
            [&](double u) {
                if (u <= 0.0) return 0.0;
                return (std::sin(ph.psi(1.0 / u)) - sin_inf) / u;
            },
            0.0, 1.0 / cut, tol);
        return v;
    }
    return sin_oscillatory(g, ph.psi, ph.dpsi, lo,
                           std::numeric_limits<double>::infinity(), ph.hints,
                           opts, &err);
}

} // namespace

Complex pv_profile_integral(double t, const RealVec& x,
                            const ProfileSpec& profile, const SheetModel& sheet,
                            double tol) {
    if (x.size() != 2 || sheet.system().d != 2)
        throw InputError("pv_profile_integral: direct evaluator requires d = 2");
    // The xi1-parity reduction needs the branch to be even in xi2.
    {
        const double probe = 0.5 * std::tan(profile.cutoff.theta_outer);
        const double asym = std::abs(sheet.value_fast(1.0, probe) -
                                     sheet.value_fast(1.0, -probe));
        if (asym > 1e-10)
            throw ContractError(
                "pv_profile_integral: branch is not even in xi2; use the "
                "spectral route for this system");
    }
    const RealVec& v = sheet.group_velocity();
    const double x1 = x(0);
    const bool converging = std::abs(x1 + t * v(0)) < 1e-14;
    if (converging && std::abs(v(1)) > 1e-12)
        throw ContractError("pv_profile_integral: nonzero transverse group "
                            "velocity makes the xi1 tail conditionally "
                            "divergent on this ray");

    const double r_outer = 8.0 * profile.a.width() + std::abs(profile.a.center());
    auto outer = [&](double xi2) -> Complex {
        InnerPhase ph;
        ph.psi = [&, xi2](double e) { return x1 * e + t * sheet.value_fast(e, xi2); };
        ph.dpsi = [&, xi2](double e) {
            double d1, d2;
            sheet.gradient_fast(e, xi2, d1, d2);
            return x1 + t * d1;
        };
        // Probe the limit through the sheet itself so phase and limit share
        // the same table noise.
        if (converging) ph.psi_limit = ph.psi(1e9);
        const double inner =
            inner_profile_integral(profile.cutoff, xi2, ph, profile.xi1_max, tol);
        return profile.a(xi2) * std::exp(Complex(0.0, x(1) * xi2)) *
               Complex(0.0, 2.0) * inner;
    };
    return adaptive_gk_complex(outer, -r_outer, r_outer, tol);
}

Complex paraxial_profile_integral(double t, const RealVec& x,
                                  const ProfileSpec& profile, const RealVec& v,
                                  double q_coef, double tol) {
    if (x.size() != 2)
        throw InputError("paraxial_profile_integral: direct evaluator requires d = 2");
    // exp(i t v.xi) translates x by v t exactly.
    const double x1 = x(0) + t * v(0);
    const double x2 = x(1) + t * v(1);
    const double r_outer = 8.0 * profile.a.width() + std::abs(profile.a.center());

    auto outer = [&](double xi2) -> Complex {
        const double lam = t * q_coef * xi2 * xi2;
        InnerPhase ph;
        ph.psi = [=](double e) { return x1 * e + lam / e; };
        ph.dpsi = [=](double e) { return x1 - lam / (e * e); };
        if (x1 != 0.0 && lam != 0.0 && (x1 > 0) == (lam > 0))
            ph.hints.push_back(std::sqrt(lam / x1));
        if (std::abs(x1) < 1e-14) ph.psi_limit = 0.0;
        const double inner =
            inner_profile_integral(profile.cutoff, xi2, ph, profile.xi1_max, tol);
        return profile.a(xi2) * std::exp(Complex(0.0, x2 * xi2)) *
               Complex(0.0, 2.0) * inner;
    };
    return adaptive_gk_complex(outer, -r_outer, r_outer, tol);
}

Complex paraxial_profile_integral_two_sided(double t, const RealVec& x,
                                            const ProfileSpec& profile,
                                            const RealVec& v, double q_coef,
                                            double tol) {
    // Direct evaluation over both xi1 signs, no parity reduction: used to
    // validate the reduced form. The integrand is regular because phi
    // vanishes near xi1 = 0.
    const double x1 = x(0) + t * v(0);
    const double x2 = x(1) + t * v(1);
    const double r_outer = 8.0 * profile.a.width() + std::abs(profile.a.center());
    const double xi1_hi = profile.xi1_max > 0 ? profile.xi1_max : 1e4;

    auto outer = [&](double xi2) -> Complex {
        const double lam = t * q_coef * xi2 * xi2;
        auto inner_signed = [&](double sign) {
            auto g = [&](double e) {
                return profile.cutoff.chi2(e, xi2) * profile.cutoff.phi(e) / e;
            };
            auto psi = [=](double e) { return sign * (x1 * e + lam / e); };
            auto dpsi = [=](double e) { return sign * (x1 - lam / (e * e)); };
            std::vector<double> hints;
            if (x1 != 0.0 && lam != 0.0 && (x1 > 0) == (lam > 0))
                hints.push_back(std::sqrt(lam / x1));
            OscOptions opts;
            opts.tol = tol;
            double err;
            // complex integral over xi1 in [lo, xi1_hi] with phase sign*(...)
            auto shift = [&](double e) { return psi(e) + M_PI / 2; };
            const double lo = std::max(profile.cutoff.radial_lo,
                                       std::abs(xi2) < 1e-300
                                           ? 0.0
                                           : std::abs(xi2) /
                                                 std::tan(profile.cutoff.theta_outer));
            if (xi1_hi <= lo) return Complex(0.0, 0.0);
            const double re = sin_oscillatory(g, shift, dpsi, lo, xi1_hi, hints, opts, &err);
            const double im = sin_oscillatory(g, psi, dpsi, lo, xi1_hi, hints, opts, &err);
            return Complex(re, im);
        };
        // xi1 > 0 contributes with amplitude 1/xi1, xi1 < 0 with 1/xi1 < 0
        // and phase evaluated at (-xi1, xi2); chi and phi are even in xi1.
        const Complex plus = inner_signed(+1.0);
        const Complex minus = inner_signed(-1.0);
        return profile.a(xi2) * std::exp(Complex(0.0, x2 * xi2)) * (plus - minus);
    };
    return adaptive_gk_complex(outer, -r_outer, r_outer, tol);
}

DecayFit nonstationary_decay_probe(const ProfileSpec& profile,
                                   const SheetModel& sheet, double t_hat,
                                   const RealVec& x_hat,
                                   const std::vector<double>& s_grid,
                                   double tol) {
    if (x_hat.size() != 2)
        throw InputError("nonstationary_decay_probe: d = 2 only");
    // Nonstationarity of psi = x.xi + t lambda(xi) on the cutoff support:
    // grad psi = x + t grad lambda, checked on sampled in-cone directions.
    const int n_probe = 128;
    for (int i = 0; i <= n_probe; ++i) {
        const double ang = -profile.cutoff.theta_outer +
                           2.0 * profile.cutoff.theta_outer * i / n_probe;
        double d1, d2;
        sheet.gradient_fast(std::cos(ang), std::sin(ang), d1, d2);
        const double g1 = x_hat(0) + t_hat * d1;
        const double g2 = x_hat(1) + t_hat * d2;
        if (std::hypot(g1, g2) < 1e-6 * (std::abs(t_hat) + x_hat.norm()))
            throw ContractError(
                "nonstationary_decay_probe: stationary direction at angle " +
                std::to_string(ang) + " (xi = (" + std::to_string(std::cos(ang)) +
                ", " + std::to_string(std::sin(ang)) + "))");
    }
    DecayFit fit;
    std::vector<double> lx, ly;
    for (double s : s_grid) {
        RealVec x = s * x_hat;
        const Complex val = pv_profile_integral(s * t_hat, x, profile, sheet, tol);
        fit.s_values.push_back(s);
        fit.magnitudes.push_back(std::abs(val));
        if (std::abs(val) > 100.0 * tol) {
            lx.push_back(std::log(s));
            ly.push_back(std::log(std::abs(val)));
        }
    }
    if (lx.size() < 3)
        throw AccuracyError("nonstationary_decay_probe: too few samples above "
                            "the quadrature noise floor", tol);
    LinearFit lf = linear_fit(lx, ly);
    fit.exponent = lf.slope;
    fit.residual = lf.rel_residual;
    return fit;
}

DyadicPartition::DyadicPartition(double r_lo, double r_hi)
    : r_lo_(r_lo), r_hi_(r_hi) {
    if (!(r_lo > 0.0) || !(r_lo < 1.0) || !(r_hi > 2.0))
        throw InputError("DyadicPartition: need 0 < r_lo < 1 and r_hi > 2 so "
                         "that g >= 1 on the unit annulus");
}

double DyadicPartition::g(double r) const {
    if (r <= r_lo_ || r >= r_hi_) return 0.0;
    const double rise = smooth_step((r - r_lo_) / (1.0 - r_lo_));
    const double fall = smooth_step((r_hi_ - r) / (r_hi_ - 2.0));
    return rise * fall;
}

double DyadicPartition::big_g(double r) const {
    // Locally finite: only scales with 2^k r inside (r_lo, r_hi) contribute.
    double acc = 0.0;
    const int k_lo = static_cast<int>(std::floor(std::log2(r_lo_ / r))) - 1;
    const int k_hi = static_cast<int>(std::ceil(std::log2(r_hi_ / r))) + 1;
    for (int k = k_lo; k <= k_hi; ++k) acc += g(std::ldexp(r, k));
    return acc;
}

double DyadicPartition::chi(double r) const {
    if (r <= 0.0) throw InputError("DyadicPartition: r must be positive");
    const double gg = g(r);
    if (gg == 0.0) return 0.0;
    return gg / big_g(r);
}

double DyadicPartition::partition_sum(double r) const {
    if (r <= 0.0) throw InputError("DyadicPartition: r must be positive");
    double acc = 0.0;
    const int k_lo = static_cast<int>(std::floor(std::log2(r_lo_ / r))) - 1;
    const int k_hi = static_cast<int>(std::ceil(std::log2(r_hi_ / r))) + 1;
    for (int k = k_lo; k <= k_hi; ++k) acc += chi(std::ldexp(r, k));
    return acc;
}

Complex stationary_phase_gaussian_closed_form(int n, double eps) {
    const Complex one_minus = Complex(1.0, -1.0 / eps);
    const Complex base = std::sqrt(2.0 * M_PI) / std::sqrt(one_minus);
    if (n == 1) return base;
    if (n == 2) return base * base;
    throw InputError("stationary_phase_gaussian_closed_form: n must be 1 or 2");
}

StationaryPhaseReport stationary_phase_estimate(
    const std::string& family, const std::vector<double>& eps_grid,
    double tol) {
    StationaryPhaseReport rep;
    int n;
    if (family == "gauss1") {
        n = 1;
    } else if (family == "gauss2") {
        n = 2;
    } else {
        throw InputError("stationary_phase_estimate: unknown family '" + family + "'");
    }
    rep.dimension = n;

    const double X = 10.0;   // truncation radius; Gaussian tail ~ e^{-50}
    // |f|_inf + |f|_{W^{m,1}} with m = ceil(n/2) = 1 (integer-order
    // surrogate for the half-integer interpolation norm).
    if (n == 1) {
        const double l1 = adaptive_gk([](double x) { return std::exp(-x * x / 2); },
                                      -X, X, 1e-12);
        const double d1 = adaptive_gk(
            [](double x) { return std::abs(x) * std::exp(-x * x / 2); }, -X, X,
            1e-12);
        rep.norm = 1.0 + l1 + d1;
    } else {
        // radial f = exp(-r^2/2) on R^2; |df| = r exp(-r^2/2)
        const double l1 = adaptive_gk(
            [](double r) { return 2 * M_PI * r * std::exp(-r * r / 2); }, 0.0, X,
            1e-12);
        const double d1 = adaptive_gk(
            [](double r) { return 2 * M_PI * r * r * std::exp(-r * r / 2); }, 0.0,
            X, 1e-12);
        rep.norm = 1.0 + l1 + d1;
    }

    for (double eps : eps_grid) {
        OscOptions opts;
        opts.tol = tol;
        double err;
        Complex val;
        if (n == 1) {
            // I = 2 int_0^X e^{-x^2/2} e^{i x^2 / (2 eps)} dx
            auto g = [](double x) { return std::exp(-x * x / 2); };
            auto psi = [=](double x) { return x * x / (2 * eps); };
            auto dpsi = [=](double x) { return x / eps; };
            auto shift = [&](double x) { return psi(x) + M_PI / 2; };
            const double re = sin_oscillatory(g, shift, dpsi, 0.0, X, {}, opts, &err);
            const double im = sin_oscillatory(g, psi, dpsi, 0.0, X, {}, opts, &err);
            val = 2.0 * Complex(re, im);
        } else {
            // I = 2 pi int_0^X r e^{-r^2/2} e^{i r^2/(2 eps)} dr
            auto g = [](double r) { return 2 * M_PI * r * std::exp(-r * r / 2); };
            auto psi = [=](double r) { return r * r / (2 * eps); };
            auto dpsi = [=](double r) { return r / eps; };
            auto shift = [&](double r) { return psi(r) + M_PI / 2; };
            const double re = sin_oscillatory(g, shift, dpsi, 0.0, X, {}, opts, &err);
            const double im = sin_oscillatory(g, psi, dpsi, 0.0, X, {}, opts, &err);
            val = Complex(re, im);
        }
        StationaryPhaseSample s;
        s.epsilon = eps;
        s.value = val;
        s.ratio = std::abs(val) /
                  (std::pow(eps, 0.5 * n) * std::log(1.0 + 1.0 / eps) * rep.norm);
        rep.sup_ratio = std::max(rep.sup_ratio, s.ratio);
        rep.samples.push_back(s);
    }
    return rep;
}

} // namespace jumpwave
