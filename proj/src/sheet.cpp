#include "jumpwave/sheet.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace jumpwave {

namespace {

std::string dir_to_string(const RealVec& u) {
    std::ostringstream os;
    os << "(";
    for (int i = 0; i < u.size(); ++i) os << (i ? ", " : "") << u(i);
    os << ")";
    return os.str();
}

double frobenius_overlap(const Mat& a, const Mat& b) {
    return (a * b).norm();
}

} // namespace

const char* rank_class_name(RankClass c) {
    switch (c) {
        case RankClass::flat: return "flat";
        case RankClass::maximal: return "maximal";
        case RankClass::intermediate: return "intermediate";
    }
    return "?";
}

// Walks the eigenvalue branch from e1 to unit_dir along the great-circle
// arc, matching the nearest eigenvalue cluster at each step and using the
// projector overlap to break near-ties. Steps are halved near avoided
// crossings; running out of resolution means the branch genuinely collides.
SheetModel::BranchPoint SheetModel::continue_to(const RealVec& unit_dir) const {
    const int d = sys_.d;
    RealVec e1 = RealVec::Zero(d);
    e1(0) = 1.0;
    const double ct = std::clamp(unit_dir.dot(e1), -1.0, 1.0);
    const double theta = std::acos(ct);

    SpectralDecomposition dec0 = spectral_decompose(sys_, e1);
    int i0 = 0;
    for (int i = 0; i < dec0.size(); ++i)
        if (std::abs(dec0.eigenvalues[i]) < std::abs(dec0.eigenvalues[i0])) i0 = i;
    BranchPoint cur{dec0.eigenvalues[i0], dec0.projectors[i0]};
    if (theta < 1e-14) return cur;

    // Orthonormal in-plane direction so u(s) = cos(s) e1 + sin(s) w.
    RealVec w = unit_dir - ct * e1;
    double wn = w.norm();
    if (wn < 1e-14) {  // antipodal; should not happen inside a proper cone
        w = RealVec::Zero(d);
        w(d > 1 ? 1 : 0) = 1.0;
    } else {
        w /= wn;
    }

    double s = 0.0;
    double step = std::min(theta, 0.05);
    const double min_step = theta * 1e-7 + 1e-12;
    while (s < theta - 1e-15) {
        double s_next = std::min(theta, s + step);
        RealVec u = std::cos(s_next) * e1 + std::sin(s_next) * w;
        SpectralDecomposition dec = spectral_decompose(sys_, u);
        int best = 0;
        for (int i = 0; i < dec.size(); ++i)
            if (std::abs(dec.eigenvalues[i] - cur.lambda) <
                std::abs(dec.eigenvalues[best] - cur.lambda))
                best = i;
        double d_best = std::abs(dec.eigenvalues[best] - cur.lambda);
        double d_second = std::numeric_limits<double>::infinity();
        int second = -1;
        for (int i = 0; i < dec.size(); ++i)
            if (i != best)
                if (double di = std::abs(dec.eigenvalues[i] - cur.lambda); di < d_second) {
                    d_second = di;
                    second = i;
                }
        bool ambiguous = second >= 0 && d_second < 3.0 * d_best + 1e-14;
        if (ambiguous) {
            // Projector overlap settles genuine near-ties.
            double o_best = frobenius_overlap(dec.projectors[best], cur.projector);
            double o_second = frobenius_overlap(dec.projectors[second], cur.projector);
            if (o_second > o_best) std::swap(best, second);
            if (std::abs(o_best - o_second) < 0.1 * std::max(o_best, o_second)) {
                if (step / 2 >= min_step) {
                    step /= 2;
                    continue;
                }
                throw ContractError(
                    "smooth variety hypothesis fails on requested cone: branch "
                    "collision near xi = " + dir_to_string(u));
            }
        }
        cur = BranchPoint{dec.eigenvalues[best], dec.projectors[best]};
        s = s_next;
        step = std::min(step * 1.6, 0.05);
    }
    return cur;
}

double SheetModel::value(const RealVec& xi) const {
    double lambda;
    RealVec grad;
    value_and_gradient(xi, lambda, grad);
    return lambda;
}

void SheetModel::value_and_gradient(const RealVec& xi, double& lambda,
                                    RealVec& grad) const {
    if (xi.size() != sys_.d) throw InputError("sheet: xi dimension mismatch");
    const double r = xi.norm();
    if (r < 1e-300) throw InputError("sheet: xi = 0");
    // Odd degree-1 extension across the axis: lambda(-xi) = -lambda(xi).
    const double sign = xi(0) < 0.0 ? -1.0 : 1.0;
    RealVec u = sign * xi / r;
    const double angle = std::acos(std::clamp(u(0), -1.0, 1.0));
    if (angle > cone_halfangle_ + 1e-12)
        throw ContractError("sheet: xi outside fitted cone (angle " +
                            std::to_string(angle) + " > " +
                            std::to_string(cone_halfangle_) + ")");

    if (sys_.d == 2 && !tab_val_.empty()) {
        double l, d1, d2;
        l = value_fast(xi(0), xi(1));
        gradient_fast(xi(0), xi(1), d1, d2);
        lambda = l;
        grad = RealVec(2);
        grad << d1, d2;
        return;
    }

    BranchPoint bp = continue_to(u);
    lambda = sign * r * bp.lambda;
    // d lambda / d xi_j = tr(pi A_j) / tr(pi) on the unit sphere; degree-1
    // homogeneity makes the gradient degree zero, and the odd extension
    // leaves it even.
    grad = RealVec(sys_.d);
    const double m = std::max(bp.projector.trace().real(), 1e-300);
    for (int j = 0; j < sys_.d; ++j)
        grad(j) = (bp.projector * sys_.A[j]).trace().real() / m;
}

Mat SheetModel::branch_projector(const RealVec& xi) const {
    const double r = xi.norm();
    if (r < 1e-300) throw InputError("sheet: xi = 0");
    const double sign = xi(0) < 0.0 ? -1.0 : 1.0;
    RealVec u = sign * xi / r;
    const double angle = std::acos(std::clamp(u(0), -1.0, 1.0));
    if (angle > cone_halfangle_ + 1e-12)
        throw ContractError("sheet: xi outside fitted cone");
    return continue_to(u).projector;
}

double SheetModel::paraxial_q(const RealVec& xi_prime) const {
    if (xi_prime.size() != sys_.d - 1)
        throw InputError("paraxial_q: xi' dimension mismatch");
    return 0.5 * xi_prime.dot(hessian_ * xi_prime);
}

void SheetModel::build_angle_table() {
    if (sys_.d != 2) return;
    const int K = 4096;
    tab_step_ = 2.0 * cone_halfangle_ / K;
    tab_val_.assign(K + 1, 0.0);
    tab_der_.assign(K + 1, 0.0);
    // March the branch across the cone once; each knot reuses the previous
    // eigenpair, so this is a single continuation sweep.
    SpectralDecomposition dec0 = spectral_decompose(sys_, (RealVec(2) << 1, 0).finished());
    int i0 = 0;
    for (int i = 0; i < dec0.size(); ++i)
        if (std::abs(dec0.eigenvalues[i]) < std::abs(dec0.eigenvalues[i0])) i0 = i;

    auto sweep = [&](int from, int to, int dir) {
        double prev = dec0.eigenvalues[i0];
        for (int j = from; dir > 0 ? j <= to : j >= to; j += dir) {
            double alpha = -cone_halfangle_ + j * tab_step_;
            RealVec u(2);
            u << std::cos(alpha), std::sin(alpha);
            SpectralDecomposition dec = spectral_decompose(sys_, u);
            int best = 0;
            for (int i = 0; i < dec.size(); ++i)
                if (std::abs(dec.eigenvalues[i] - prev) <
                    std::abs(dec.eigenvalues[best] - prev))
                    best = i;
            prev = dec.eigenvalues[best];
            tab_val_[j] = prev;
            const Mat& p = dec.projectors[best];
            const double m = std::max(p.trace().real(), 1e-300);
            double g1 = (p * sys_.A[0]).trace().real() / m;
            double g2 = (p * sys_.A[1]).trace().real() / m;
            // d/d alpha of lambda(cos a, sin a)
            tab_der_[j] = -g1 * std::sin(alpha) + g2 * std::cos(alpha);
        }
    };
    const int mid = K / 2;   // alpha = 0
    sweep(mid, K, +1);
    sweep(mid, 0, -1);
    // Pin the normalization lambda(e1) = 0 exactly; eigensolver noise here
    // would otherwise be amplified by |xi| in far-tail phase evaluations.
    tab_val_[mid] = 0.0;
}

double SheetModel::value_fast(double xi1, double xi2) const {
    if (sys_.d != 2 || tab_val_.empty()) {
        RealVec xi(2);
        xi << xi1, xi2;
        double l;
        RealVec g;
        value_and_gradient(xi, l, g);
        return l;
    }
    double sign = 1.0;
    if (xi1 < 0.0) {
        sign = -1.0;
        xi1 = -xi1;
        xi2 = -xi2;
    }
    const double r = std::hypot(xi1, xi2);
    if (r < 1e-300) throw InputError("sheet: xi = 0");
    const double alpha = std::atan2(xi2, xi1);
    if (std::abs(alpha) > cone_halfangle_ + 1e-12)
        throw ContractError("sheet: xi outside fitted cone");
    const double s = (alpha + cone_halfangle_) / tab_step_;
    int j = std::clamp(static_cast<int>(s), 0, static_cast<int>(tab_val_.size()) - 2);
    const double u = s - j;
    const double h = tab_step_;
    const double y0 = tab_val_[j], y1 = tab_val_[j + 1];
    const double m0 = tab_der_[j] * h, m1 = tab_der_[j + 1] * h;
    const double u2 = u * u, u3 = u2 * u;
    const double val = (2 * u3 - 3 * u2 + 1) * y0 + (u3 - 2 * u2 + u) * m0 +
                       (-2 * u3 + 3 * u2) * y1 + (u3 - u2) * m1;
    return sign * r * val;
}

void SheetModel::gradient_fast(double xi1, double xi2, double& d1,
                               double& d2) const {
    if (sys_.d != 2 || tab_val_.empty()) {
        RealVec xi(2);
        xi << xi1, xi2;
        double l;
        RealVec g;
        value_and_gradient(xi, l, g);
        d1 = g(0);
        d2 = g(1);
        return;
    }
    // Gradient is even in xi, so fold to xi1 > 0.
    if (xi1 < 0.0) {
        xi1 = -xi1;
        xi2 = -xi2;
    }
    const double alpha = std::atan2(xi2, xi1);
    if (std::abs(alpha) > cone_halfangle_ + 1e-12)
        throw ContractError("sheet: xi outside fitted cone");
    const double s = (alpha + cone_halfangle_) / tab_step_;
    int j = std::clamp(static_cast<int>(s), 0, static_cast<int>(tab_val_.size()) - 2);
    const double u = s - j;
    const double h = tab_step_;
    const double y0 = tab_val_[j], y1 = tab_val_[j + 1];
    const double m0 = tab_der_[j] * h, m1 = tab_der_[j + 1] * h;
    const double u2 = u * u, u3 = u2 * u;
    const double val = (2 * u3 - 3 * u2 + 1) * y0 + (u3 - 2 * u2 + u) * m0 +
                       (-2 * u3 + 3 * u2) * y1 + (u3 - u2) * m1;
    const double dval = ((6 * u2 - 6 * u) * y0 + (3 * u2 - 4 * u + 1) * m0 +
                         (-6 * u2 + 6 * u) * y1 + (3 * u2 - 2 * u) * m1) / h;
    const double ca = std::cos(alpha), sa = std::sin(alpha);
    d1 = ca * val - sa * dval;
    d2 = sa * val + ca * dval;
}

SheetModel fit_sheet(const HyperbolicSystem& sys, double cone_halfangle,
                     double stencil_radius) {
    sys.validate();
    if (!(cone_halfangle > 0.0) || cone_halfangle >= M_PI / 2)
        throw InputError("fit_sheet: cone halfangle must lie in (0, pi/2)");
    if (!(stencil_radius > 0.0) || stencil_radius > 0.1)
        throw InputError("fit_sheet: stencil radius must lie in (0, 0.1]");

    SheetModel sheet;
    sheet.sys_ = sys;
    sheet.cone_halfangle_ = cone_halfangle;

    const int d = sys.d;
    RealVec e1 = RealVec::Zero(d);
    e1(0) = 1.0;
    SpectralDecomposition dec0 = spectral_decompose(sys, e1);
    int i0 = 0;
    for (int i = 0; i < dec0.size(); ++i)
        if (std::abs(dec0.eigenvalues[i]) < std::abs(dec0.eigenvalues[i0])) i0 = i;
    double scale0 = 0.0;
    for (double l : dec0.eigenvalues) scale0 = std::max(scale0, std::abs(l));
    if (std::abs(dec0.eigenvalues[i0]) > 1e-9 * std::max(scale0, 1.0))
        throw ContractError(
            "fit_sheet: A(1,0,...,0) has no zero eigenvalue; hyperplane not "
            "characteristic");
    double gap = std::numeric_limits<double>::infinity();
    for (int i = 0; i < dec0.size(); ++i)
        if (i != i0)
            gap = std::min(gap, std::abs(dec0.eigenvalues[i] - dec0.eigenvalues[i0]));
    if (!(gap > 0.0) || !std::isfinite(gap))
        gap = dec0.size() == 1 ? 1.0 : 0.0;
    if (gap <= 0.0)
        throw ContractError("fit_sheet: zero eigenvalue not separated at e1");
    sheet.gap_ = gap;

    // Sampled simplicity check over the cone (sampling, not a proof). The
    // relative gap between the tracked branch and the rest of the spectrum is
    // scanned and its local minima are refined, so crossings strictly between
    // coarse probes are still caught.
    {
        const int mult0 = dec0.multiplicities[i0];
        auto gap_at = [&](const RealVec& u) {
            SheetModel::BranchPoint bp = sheet.continue_to(u);  // throws on ambiguity
            SpectralDecomposition dec = spectral_decompose(sys, u);
            double scale = 1.0;
            for (double l : dec.eigenvalues) scale = std::max(scale, std::abs(l));
            double g = std::numeric_limits<double>::infinity();
            int mult_here = 0;
            for (int i = 0; i < dec.size(); ++i) {
                if (std::abs(dec.eigenvalues[i] - bp.lambda) <= 1e-10 * scale)
                    mult_here += dec.multiplicities[i];
                else
                    g = std::min(g, std::abs(dec.eigenvalues[i] - bp.lambda));
            }
            if (mult_here > mult0) return 0.0;   // branch merged with another sheet
            return std::isfinite(g) ? g / scale : 1.0;
        };
        auto check = [&](const RealVec& u, double g) {
            if (g <= 1e-6)
                throw ContractError(
                    "smooth variety hypothesis fails on requested cone: branch "
                    "gap closes at xi = " + dir_to_string(u));
        };
        if (d == 2) {
            const int n_ang = 129;
            auto dir = [&](double a) {
                RealVec u(2);
                u << std::cos(a), std::sin(a);
                return u;
            };
            std::vector<double> ang(n_ang), gap(n_ang);
            for (int i = 0; i < n_ang; ++i) {
                ang[i] = -cone_halfangle + 2.0 * cone_halfangle * i / (n_ang - 1);
                gap[i] = gap_at(dir(ang[i]));
                check(dir(ang[i]), gap[i]);
            }
            for (int i = 1; i + 1 < n_ang; ++i) {
                if (gap[i] > gap[i - 1] || gap[i] > gap[i + 1]) continue;
                // Ternary search on the local minimum.
                double a = ang[i - 1], b = ang[i + 1];
                for (int it = 0; it < 60; ++it) {
                    const double m1 = a + (b - a) / 3, m2 = b - (b - a) / 3;
                    if (gap_at(dir(m1)) < gap_at(dir(m2)))
                        b = m2;
                    else
                        a = m1;
                }
                const double amin = 0.5 * (a + b);
                check(dir(amin), gap_at(dir(amin)));
            }
        } else {
            for (int i = 0; i < 48; ++i) {
                double a = cone_halfangle * (i + 1) / 48;
                for (int q = 0; q < 8; ++q) {
                    double ph = 2.0 * M_PI * q / 8;
                    RealVec u = RealVec::Zero(d);
                    u(0) = std::cos(a);
                    u(1) = std::sin(a) * std::cos(ph);
                    if (d > 2) u(2) = std::sin(a) * std::sin(ph);
                    check(u, gap_at(u));
                }
            }
        }
    }

    // Gradient and transverse Hessian by central differences with Richardson
    // extrapolation at steps h and h/2.
    auto lam = [&](const RealVec& xi) {
        const double r = xi.norm();
        RealVec u = xi / r;
        double sign = 1.0;
        if (u(0) < 0) {
            sign = -1.0;
            u = -u;
        }
        return sign * r * sheet.continue_to(u).lambda;
    };
    auto grad_at_h = [&](double h) {
        RealVec g(d);
        for (int j = 0; j < d; ++j) {
            RealVec p = e1, m = e1;
            p(j) += h;
            m(j) -= h;
            g(j) = (lam(p) - lam(m)) / (2 * h);
        }
        return g;
    };
    const double h = stencil_radius;
    RealVec g1 = grad_at_h(h), g2 = grad_at_h(h / 2);
    sheet.v_ = (4.0 * g2 - g1) / 3.0;

    auto hess_at_h = [&](double hh) {
        RealMat m(d - 1, d - 1);
        for (int i = 1; i < d; ++i) {
            for (int j = i; j < d; ++j) {
                double val;
                if (i == j) {
                    RealVec p = e1, q = e1;
                    p(i) += hh;
                    q(i) -= hh;
                    val = (lam(p) - 2.0 * lam(e1) + lam(q)) / (hh * hh);
                } else {
                    RealVec pp = e1, pm = e1, mp = e1, mm = e1;
                    pp(i) += hh; pp(j) += hh;
                    pm(i) += hh; pm(j) -= hh;
                    mp(i) -= hh; mp(j) += hh;
                    mm(i) -= hh; mm(j) -= hh;
                    val = (lam(pp) - lam(pm) - lam(mp) + lam(mm)) / (4 * hh * hh);
                }
                m(i - 1, j - 1) = val;
                m(j - 1, i - 1) = val;
            }
        }
        return m;
    };
    RealMat h1 = hess_at_h(h), h2 = hess_at_h(h / 2);
    sheet.hessian_ = (4.0 * h2 - h1) / 3.0;

    // Rank classification from singular values. The absolute floor sits at
    // the finite-difference noise scale.
    {
        Eigen::JacobiSVD<RealMat> svd(sheet.hessian_);
        const double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
        if (smax <= 1e-6) {
            sheet.rank_class_ = RankClass::flat;
            sheet.rank_ = 0;
        } else {
            int r = 0;
            for (int i = 0; i < svd.singularValues().size(); ++i)
                if (svd.singularValues()(i) >= 1e-8 * smax) ++r;
            sheet.rank_ = r;
            sheet.rank_class_ = (r == d - 1) ? RankClass::maximal : RankClass::intermediate;
        }
    }

    // Post-construction invariants: value at the axis, Euler identity,
    // tangential group velocity, degree-1 homogeneity on samples.
    {
        const double tol = 1e-8;
        if (std::abs(lam(e1)) > tol)
            throw ContractError("fit_sheet: lambda(e1) != 0");
        if (std::abs(sheet.v_(0)) > tol)
            throw ContractError("fit_sheet: group velocity not tangential (v1 = " +
                                std::to_string(sheet.v_(0)) + ")");
        RealVec probe = e1;
        probe(d - 1) = std::tan(0.7 * cone_halfangle);
        for (double s : {0.5, 2.0, 7.0}) {
            double l1 = lam(probe), ls = lam(s * probe);
            if (std::abs(ls - s * l1) > 1e-8 * s * probe.norm())
                throw ContractError("fit_sheet: homogeneity check failed");
        }
    }

    sheet.build_angle_table();
    return sheet;
}

RealMat paraxial_form(const SheetModel& sheet) { return 0.5 * sheet.hessian(); }

} // namespace jumpwave
