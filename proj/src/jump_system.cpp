#include "jumpwave/jump_system.hpp"

#include <cmath>

#include "jumpwave/fit.hpp"

namespace jumpwave {

ProjectorPair reference_projector(const HyperbolicSystem& sys) {
    sys.validate();
    RealVec e1 = RealVec::Zero(sys.d);
    e1(0) = 1.0;
    SpectralDecomposition dec = spectral_decompose(sys, e1);
    double scale = 0.0;
    for (double l : dec.eigenvalues) scale = std::max(scale, std::abs(l));
    int i0 = -1;
    for (int i = 0; i < dec.size(); ++i)
        if (std::abs(dec.eigenvalues[i]) <= 1e-9 * std::max(scale, 1.0)) i0 = i;
    if (i0 < 0)
        throw ContractError("reference_projector: det A1 != 0, hyperplane not characteristic");

    ProjectorPair pair;
    pair.pi = dec.projectors[i0];
    const int k = sys.k;
    // Q := (A1 + pi)^{-1} (I - pi) inverts A1 on range(I - pi) and kills
    // range(pi), the canonical normalization Q pi = 0.
    Mat a1 = sys.A[0];
    pair.qinv = (a1 + pair.pi).inverse() * (identity(k) - pair.pi);
    return pair;
}

namespace {

// One transverse row of a hyperplane field, shifted so that the result at x
// equals the input at x - delta. Spectral on periodic grids (exact for
// band-limited data), cubic interpolation otherwise.
std::vector<Vec> shifted_row(const HyperplaneField& f, int it, double delta,
                             bool spectral) {
    const HyperplaneGrid& g = f.grid();
    std::vector<Vec> row(g.nx, Vec(f.k()));
    if (!spectral || std::abs(delta) < 1e-300) {
        for (int ix = 0; ix < g.nx; ++ix)
            row[ix] = std::abs(delta) < 1e-300 ? f.vec_at(it, ix)
                                               : f.interp_x(it, g.x(ix) - delta);
        return row;
    }
    std::vector<Complex> buf(g.nx);
    for (int c = 0; c < f.k(); ++c) {
        for (int ix = 0; ix < g.nx; ++ix) buf[ix] = f.at(it, ix, c);
        spectral_shift_row(buf, g, delta);
        for (int ix = 0; ix < g.nx; ++ix) row[ix](c) = buf[ix];
    }
    return row;
}

// Common characteristic-marching quadrature:
//   J(t_i, x) = J(t_{i-1}, x - v' dt) + int_{t_{i-1}}^{t_i} S(s, x - v'(t_i - s)) ds
// with Simpson panels. Shifts along the trace are spectral on periodic grids
// and cubic otherwise; the midpoint source row is interpolated cubically in
// time. For v' = 0 the march reduces to pure time quadrature.
HyperplaneField transport_march(const HyperplaneField& source, double vprime) {
    const HyperplaneGrid& g = source.grid();
    const int k = source.k();
    const bool spectral = g.periodic;
    HyperplaneField out(g, k);
    const double dt = g.dt();

    // Midpoint source rows by Catmull-Rom interpolation across time levels.
    HyperplaneField mid(g, k);   // mid row it holds S(t_{it-1} + dt/2, .)
    for (int it = 1; it < g.nt; ++it) {
        auto level = [&](int i) { return std::clamp(i, 0, g.nt - 1); };
        const int i1 = it - 1;
        for (int ix = 0; ix < g.nx; ++ix) {
            Vec v = -0.0625 * source.vec_at(level(i1 - 1), ix) +
                    0.5625 * source.vec_at(i1, ix) +
                    0.5625 * source.vec_at(level(i1 + 1), ix) -
                    0.0625 * source.vec_at(level(i1 + 2), ix);
            mid.set_vec(it, ix, v);
        }
    }

    for (int it = 1; it < g.nt; ++it) {
        std::vector<Vec> prev = shifted_row(out, it - 1, vprime * dt, spectral);
        std::vector<Vec> s0 = shifted_row(source, it - 1, vprime * dt, spectral);
        std::vector<Vec> s1 = shifted_row(mid, it, vprime * dt / 2, spectral);
        for (int ix = 0; ix < g.nx; ++ix) {
            Vec s2 = source.vec_at(it, ix);
            out.set_vec(it, ix, prev[ix] + (dt / 6.0) * (s0[ix] + 4.0 * s1[ix] + s2));
        }
    }
    return out;
}

HyperplaneField project_field(const Mat& p, const HyperplaneField& f) {
    HyperplaneField out(f.grid(), f.k());
    for (int it = 0; it < f.grid().nt; ++it)
        for (int ix = 0; ix < f.grid().nx; ++ix)
            out.set_vec(it, ix, p * f.vec_at(it, ix));
    return out;
}

HyperplaneField subtract(const HyperplaneField& a, const HyperplaneField& b) {
    HyperplaneField out(a.grid(), a.k());
    for (std::size_t i = 0; i < a.raw().size(); ++i)
        out.raw()[i] = a.raw()[i] - b.raw()[i];
    return out;
}

HyperplaneField add(const HyperplaneField& a, const HyperplaneField& b) {
    HyperplaneField out(a.grid(), a.k());
    for (std::size_t i = 0; i < a.raw().size(); ++i)
        out.raw()[i] = a.raw()[i] + b.raw()[i];
    return out;
}

} // namespace

HyperplaneField solve_jump0(const ProjectorPair& pair, const RealVec& v,
                            const HyperplaneField& jf0) {
    if (std::abs(v(0)) > 1e-8)
        throw ContractError("solve_jump0: group velocity has a normal component");
    const double vprime = v.size() > 1 ? v(1) : 0.0;
    HyperplaneField src = project_field(pair.pi, jf0);
    return transport_march(src, vprime);
}

HyperplaneField solve_jump_n(const ProjectorPair& pair, const RealVec& v,
                             const TangentialOperator& ltan,
                             const HyperplaneField& j_prev,
                             const HyperplaneField& jf_prev,
                             const HyperplaneField& jf_n) {
    if (j_prev.grid().nt < 7)
        throw ContractError("solve_jump_n: insufficient grid resolution for "
                            "tangential derivatives");
    const double vprime = v.size() > 1 ? v(1) : 0.0;
    // (I - pi) J^n = Q (Jf^{n-1} - L_tan J^{n-1})
    HyperplaneField slack = subtract(jf_prev, ltan.apply(j_prev));
    HyperplaneField w = project_field(pair.qinv, slack);
    // (d/dt + v'.dx') pi J^n = pi Jf^n - pi L_tan w
    HyperplaneField src = project_field(pair.pi, subtract(jf_n, ltan.apply(w)));
    HyperplaneField pi_part = transport_march(src, vprime);
    return add(pi_part, w);
}

JumpSequence solve_jump_sequence(
    const ProjectorPair& pair, const RealVec& v,
    const HyperbolicSystem& sys, const HyperplaneGrid& grid, int order,
    const std::function<Vec(int, double, double)>& source_jump) {
    if (order < 0) throw InputError("solve_jump_sequence: order must be >= 0");
    JumpSequence seq;
    seq.order = order;
    seq.grid = grid;
    TangentialOperator ltan(sys);
    std::vector<HyperplaneField> jf;
    for (int n = 0; n <= order; ++n)
        jf.push_back(sample_hyperplane(grid, sys.k, [&](double t, double x) {
            return source_jump(n, t, x);
        }));
    seq.jumps.push_back(solve_jump0(pair, v, jf[0]));
    for (int n = 1; n <= order; ++n)
        seq.jumps.push_back(
            solve_jump_n(pair, v, ltan, seq.jumps[n - 1], jf[n - 1], jf[n]));
    return seq;
}

bool DiffractiveOperator::is_zero(double tol) const {
    return half_hessian.cwiseAbs().maxCoeff() * operator_norm(pi) <= tol ||
           half_hessian.cwiseAbs().maxCoeff() <= tol;
}

HyperplaneField DiffractiveOperator::apply(const HyperplaneField& f) const {
    // d = 2: P = half_hessian(0,0) * pi * d^2/dx'^2
    HyperplaneField der = TangentialOperator::x_derivative(f, 2);
    HyperplaneField out(f.grid(), f.k());
    const double c = half_hessian(0, 0);
    for (int it = 0; it < f.grid().nt; ++it)
        for (int ix = 0; ix < f.grid().nx; ++ix)
            out.set_vec(it, ix, c * (pi * der.vec_at(it, ix)));
    return out;
}

DiffractiveOperator diffractive_operator(const ProjectorPair& pair,
                                         const SheetModel& sheet,
                                         double tol) {
    const HyperbolicSystem& sys = sheet.system();
    DiffractiveOperator op;
    op.pi = pair.pi;
    op.half_hessian = 0.5 * sheet.hessian();

    // The fundamental identity -pi L Q L pi = (1/2) pi sum lambda'' d_mu d_nu
    // reduces to matrix identities on the second-order coefficients: for all
    // tangential mu, nu
    //   -sym(pi A_mu Q A_nu pi) = (1/2) lambda''_{mu nu} pi.
    // (Time-derivative cross terms vanish because pi Q = Q pi = 0.)
    double defect = 0.0;
    const double scale = std::max(1.0, op.half_hessian.cwiseAbs().maxCoeff());
    for (int mu = 1; mu < sys.d; ++mu)
        for (int nu = 1; nu < sys.d; ++nu) {
            Mat lhs = -0.5 * (pair.pi * sys.A[mu] * pair.qinv * sys.A[nu] * pair.pi +
                              pair.pi * sys.A[nu] * pair.qinv * sys.A[mu] * pair.pi);
            Mat rhs = op.half_hessian(mu - 1, nu - 1) * pair.pi;
            defect = std::max(defect, (lhs - rhs).cwiseAbs().maxCoeff());
        }
    op.identity_defect = defect;
    if (defect > tol * scale)
        throw ContractError(
            "diffractive_operator: identity check failed (defect " +
            std::to_string(defect) + "); sheet and projector are inconsistent");
    return op;
}

Vec predict_growth_slope(const DiffractiveOperator& p, const RealVec& v,
                         const std::function<Vec(int, double, double)>& source_jump_xx,
                         double t_support_end, double x0) {
    // Growth rate of pi J^1 along the characteristic through (0, x0):
    //   slope = - int_0^T (P pi Jf^0)(s, x0 + v' s) ds,
    // P acting as half_hessian * d^2/dx'^2 on the closed-form source jump.
    const double vprime = v.size() > 1 ? v(1) : 0.0;
    const double c = p.half_hessian(0, 0);
    const int n_panels = 256;
    const double h = t_support_end / n_panels;
    Vec acc = Vec::Zero(p.pi.rows());
    for (int i = 0; i < n_panels; ++i) {
        double a = i * h, b = (i + 1) * h, m = 0.5 * (a + b);
        Vec fa = p.pi * source_jump_xx(0, a, x0 + vprime * a);
        Vec fm = p.pi * source_jump_xx(0, m, x0 + vprime * m);
        Vec fb = p.pi * source_jump_xx(0, b, x0 + vprime * b);
        acc += (h / 6.0) * (fa + 4.0 * fm + fb);
    }
    return -c * acc;
}

GridField reconstruct_expansion(const JumpSequence& jumps, const GridSpec& spec,
                                double t) {
    spec.validate();
    if (spec.d != 2)
        throw InputError("reconstruct_expansion: implemented for d = 2");
    const int k = jumps.jumps.empty() ? 0 : jumps.jumps[0].k();
    GridField out(spec, k, t);
    std::vector<int> idx;
    // Factorials up to the expansion order.
    std::vector<double> fact{1.0};
    for (int n = 1; n <= jumps.order; ++n) fact.push_back(fact.back() * n);

    for (std::size_t i = 0; i < spec.total_nodes(); ++i) {
        out.unflatten(i, idx);
        const double x1 = spec.node_coord(0, idx[0]);
        if (x1 < 0.0) continue;
        const double xp = spec.node_coord(1, idx[1]);
        Vec acc = Vec::Zero(k);
        double pw = 1.0;
        for (int n = 0; n <= jumps.order; ++n) {
            acc += jumps.jumps[n].interp(t, xp) * (pw / fact[n]);
            pw *= x1;
        }
        if (x1 == 0.0) acc *= 0.5;
        for (int c = 0; c < k; ++c) out.at(i, c) = acc(c);
    }
    return out;
}

ResidualReport residual_smoothness_check(
    const HyperbolicSystem& sys, const JumpSequence& jumps,
    const std::function<Vec(double, const RealVec&, int)>& source_side_eval,
    const std::function<Vec(int, double, double)>& source_jump,
    int order, double x1_extent, int n_x1,
    const std::vector<double>& probe_times) {
    if (sys.d != 2)
        throw InputError("residual_smoothness_check: implemented for d = 2");
    if (order < 1) throw InputError("residual_smoothness_check: order must be >= 1");
    const HyperplaneGrid& g = jumps.grid;
    const int k = sys.k;
    const double dt = g.dt();
    const double h = x1_extent / n_x1;

    // x'-derivatives of the solved jumps, once.
    std::vector<HyperplaneField> jx;
    for (int n = 0; n <= jumps.order; ++n)
        jx.push_back(TangentialOperator::x_derivative(jumps.jumps[n], 1));
    std::vector<double> fact{1.0};
    for (int n = 1; n <= jumps.order; ++n) fact.push_back(fact.back() * n);

    // v(t, x1, x') = sum J^n x1^n / n! on one side; evaluated from grid rows.
    auto expansion = [&](const std::vector<HyperplaneField>& fields, int it,
                         int ix, double x1) {
        Vec acc = Vec::Zero(k);
        double pw = 1.0;
        for (int n = 0; n <= jumps.order; ++n) {
            acc += fields[n].vec_at(it, ix) * (pw / fact[n]);
            pw *= x1;
        }
        return acc;
    };
    auto d1_expansion = [&](int it, int ix, double x1) {
        Vec acc = Vec::Zero(k);
        double pw = 1.0;
        for (int n = 1; n <= jumps.order; ++n) {
            acc += jumps.jumps[n].vec_at(it, ix) * (pw / fact[n - 1]);
            pw *= x1;
        }
        return acc;
    };

    ResidualReport rep;
    rep.residual_jump_norms.assign(order, 0.0);
    for (int it = 0; it < g.nt; ++it)
        for (int ix = 0; ix < g.nx; ++ix)
            rep.field_scale = std::max(rep.field_scale,
                                       source_jump(0, g.time(it), g.x(ix)).norm());

    const int p_fit = std::min(6, n_x1);
    // One-sided residual limit and first derivative at x1 -> 0 on `side`.
    auto residual_limits = [&](double t, int it, int ix, int side, Vec& v0,
                               Vec& d0) {
        const double xp = g.x(ix);
        std::vector<Vec> r_nodes;   // residual at x1 = side * j h
        for (int j = 1; j <= p_fit; ++j) {
            const double x1 = side * j * h;
            Vec dtv = Vec::Zero(k), d1v = Vec::Zero(k), d2v = Vec::Zero(k);
            if (side > 0) {   // v = 0 identically on x1 < 0
                auto val = [&](int i) { return expansion(jumps.jumps, i, ix, x1); };
                dtv = (val(it - 2) - 8.0 * val(it - 1) + 8.0 * val(it + 1) -
                       val(it + 2)) / (12.0 * dt);
                d1v = d1_expansion(it, ix, x1);
                d2v = expansion(jx, it, ix, x1);
            }
            RealVec x(2);
            x << x1, xp;
            Vec f = source_side_eval(t, x, side);
            r_nodes.push_back(dtv + sys.A[0] * d1v + sys.A[1] * d2v - f);
        }
        one_sided_extrapolate(r_nodes, side * h, v0, d0);
    };

    for (double t_req : probe_times) {
        int it = static_cast<int>(std::lround(t_req / dt));
        if (it < 2 || it > g.nt - 3)
            throw InputError("residual_smoothness_check: probe time too close to "
                             "the grid boundary for time differences");
        const double t = g.time(it);   // snap to the sampled row
        for (int ix = 0; ix < g.nx; ++ix) {
            Vec plus_v, plus_d, minus_v, minus_d;
            residual_limits(t, it, ix, +1, plus_v, plus_d);
            residual_limits(t, it, ix, -1, minus_v, minus_d);
            rep.residual_jump_norms[0] =
                std::max(rep.residual_jump_norms[0], (plus_v - minus_v).norm());
            if (order >= 2)
                rep.residual_jump_norms[1] =
                    std::max(rep.residual_jump_norms[1], (plus_d - minus_d).norm());
        }
    }
    return rep;
}

} // namespace jumpwave
