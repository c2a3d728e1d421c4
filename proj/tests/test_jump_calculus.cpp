#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "jumpwave/fit.hpp"
#include "jumpwave/jump_system.hpp"

using namespace jumpwave;

namespace {

HyperplaneGrid make_grid(int nt, double t_end, int nx = 128,
                         double xlen = 40.0) {
    HyperplaneGrid g;
    g.nt = nt;
    g.t_end = t_end;
    g.nx = nx;
    g.x_len = xlen;
    g.periodic = true;
    g.validate();
    return g;
}

// Independent transport oracle: RK4 in time, 4th-order central differences
// in x, fine grid. Solves (d/dt + v d/dx) u = s with u(0) = 0 and periodic x.
std::vector<double> fd_transport_oracle(
    const std::function<double(double, double)>& s, double v,
    const HyperplaneGrid& eval_grid, int it_eval) {
    const int nx = 512;
    const double xlen = eval_grid.x_len;
    const double dx = xlen / nx;
    const double t_end = eval_grid.time(it_eval);
    const int nt = std::max(400, static_cast<int>(t_end / (0.2 * dx / std::max(1.0, std::abs(v)))));
    const double dt = t_end / nt;
    std::vector<double> u(nx, 0.0);
    auto deriv = [&](const std::vector<double>& w, int i) {
        auto at = [&](int j) { return w[((j % nx) + nx) % nx]; };
        return (at(i - 2) - 8 * at(i - 1) + 8 * at(i + 1) - at(i + 2)) / (12 * dx);
    };
    auto rhs = [&](const std::vector<double>& w, double t, std::vector<double>& out) {
        for (int i = 0; i < nx; ++i)
            out[i] = -v * deriv(w, i) + s(t, -0.5 * xlen + i * dx);
    };
    std::vector<double> k1(nx), k2(nx), k3(nx), k4(nx), tmp(nx);
    for (int n = 0; n < nt; ++n) {
        const double t = n * dt;
        rhs(u, t, k1);
        for (int i = 0; i < nx; ++i) tmp[i] = u[i] + 0.5 * dt * k1[i];
        rhs(tmp, t + 0.5 * dt, k2);
        for (int i = 0; i < nx; ++i) tmp[i] = u[i] + 0.5 * dt * k2[i];
        rhs(tmp, t + 0.5 * dt, k3);
        for (int i = 0; i < nx; ++i) tmp[i] = u[i] + dt * k3[i];
        rhs(tmp, t + dt, k4);
        for (int i = 0; i < nx; ++i)
            u[i] += dt / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    }
    // Sample onto the eval grid's x nodes (identical endpoints assumed).
    std::vector<double> out(eval_grid.nx);
    for (int i = 0; i < eval_grid.nx; ++i) {
        const double x = eval_grid.x(i);
        const double s_idx = (x + 0.5 * xlen) / dx;
        const int j = static_cast<int>(std::lround(s_idx)) % nx;
        out[i] = u[j];
    }
    return out;
}

} // namespace

TEST_CASE("reference projector identities") {
    HyperbolicSystem s1 = example_system_s1();
    ProjectorPair pair = reference_projector(s1);
    CHECK((pair.pi - (Mat(2, 2) << 1, 0, 0, 0).finished()).norm() < 1e-12);
    CHECK((pair.qinv - (Mat(2, 2) << 0, 0, 0, 1).finished()).norm() < 1e-12);

    HyperbolicSystem s2 = example_system_s2();
    ProjectorPair p2 = reference_projector(s2);
    // Brute-force nullspace of the explicit 3x3 A1: spanned by e3.
    Vec e3 = Vec::Zero(3);
    e3(2) = 1.0;
    CHECK((p2.pi * e3 - e3).norm() < 1e-12);
    CHECK(p2.pi.rows() == 3);
    CHECK(std::abs(p2.pi.trace().real() - 1.0) < 1e-12);

    for (const HyperbolicSystem* sys : {&s1, &s2}) {
        ProjectorPair p = reference_projector(*sys);
        const Mat& a1 = sys->A[0];
        const int k = sys->k;
        CHECK((a1 * p.pi).norm() <= 1e-10);
        CHECK((p.pi * a1).norm() <= 1e-10);
        CHECK((p.qinv * a1 * (identity(k) - p.pi) - (identity(k) - p.pi)).norm() <= 1e-10);
        CHECK((p.pi * p.pi - p.pi).norm() <= 1e-10);
        CHECK((p.qinv * p.pi).norm() <= 1e-12);
        // Symmetric system: orthogonal projector of norm one.
        CHECK((p.pi - p.pi.adjoint()).norm() <= 1e-10);
        CHECK(operator_norm(p.pi) == doctest::Approx(1.0).epsilon(1e-10));
    }

    // Invertible A1: not characteristic.
    HyperbolicSystem inv;
    inv.d = 2;
    inv.k = 2;
    inv.symmetric = true;
    inv.A = {identity(2), (Mat(2, 2) << 0, 1, 1, 0).finished()};
    inv.validate();
    CHECK_THROWS_WITH_AS(reference_projector(inv),
                         doctest::Contains("not characteristic"), ContractError);
}

TEST_CASE("solve_jump0: pure time integration when v' = 0") {
    HyperbolicSystem s1 = example_system_s1();
    ProjectorPair pair = reference_projector(s1);
    HyperplaneGrid g = make_grid(801, 8.0);
    TimeBump bump(1.0);

    Vec c(2);
    c << 2.0, 0.0;   // inside range(pi)
    HyperplaneField jf0 = sample_hyperplane(
        g, 2, [&](double t, double) { return Vec(bump(t) * c); });
    RealVec v = RealVec::Zero(2);
    HyperplaneField j0 = solve_jump0(pair, v, jf0);

    // Oracle: Simpson integral of the bump.
    auto bump_int = [&](double t) {
        const int n = 2000;
        double acc = 0.0;
        const double h = t / n;
        for (int i = 0; i < n; ++i) {
            double a = i * h, b = (i + 1) * h;
            acc += h / 6.0 * (bump(a) + 4 * bump(0.5 * (a + b)) + bump(b));
        }
        return acc;
    };
    for (int it : {100, 400, 800}) {
        const double t = g.time(it);
        const double expect = 2.0 * bump_int(std::min(t, 1.0));
        CHECK(std::abs(j0.at(it, 17, 0).real() - expect) <= 1e-8);
        CHECK(std::abs(j0.at(it, 17, 1)) <= 1e-12);
    }

    // Zero source gives zero.
    HyperplaneField zero_src(g, 2);
    HyperplaneField j0z = solve_jump0(pair, v, zero_src);
    for (const Complex& z : j0z.raw()) CHECK(std::abs(z) == 0.0);

    // Normal velocity component is rejected.
    RealVec vbad(2);
    vbad << 0.5, 0.0;
    CHECK_THROWS_AS(solve_jump0(pair, vbad, jf0), ContractError);
}

TEST_CASE("solve_jump0 against the finite-difference transport oracle") {
    HyperbolicSystem s1 = example_system_s1();
    ProjectorPair pair = reference_projector(s1);
    HyperplaneGrid g = make_grid(1601, 4.0, 128, 40.0);
    TimeBump bump(1.0);
    const double vprime = 0.7;

    auto pulse = [&](double t, double x) {
        return bump(t) * std::exp(-x * x);
    };
    HyperplaneField jf0 = sample_hyperplane(g, 2, [&](double t, double x) {
        Vec v(2);
        v << pulse(t, x), 0.0;
        return v;
    });
    RealVec v(2);
    v << 0.0, vprime;
    HyperplaneField j0 = solve_jump0(pair, v, jf0);

    const int it_eval = g.nt - 1;
    std::vector<double> oracle = fd_transport_oracle(pulse, vprime, g, it_eval);
    double max_err = 0.0;
    for (int ix = 0; ix < g.nx; ++ix)
        max_err = std::max(max_err,
                           std::abs(j0.at(it_eval, ix, 0).real() - oracle[ix]));
    CHECK(max_err <= 1e-4);
}

TEST_CASE("diffractive operator and the geometric optics identity") {
    HyperbolicSystem s1 = example_system_s1();
    ProjectorPair pair = reference_projector(s1);
    SheetModel sheet = fit_sheet(s1, 1.0);
    DiffractiveOperator p = diffractive_operator(pair, sheet);
    CHECK(p.half_hessian(0, 0) == doctest::Approx(-1.0).epsilon(1e-7));
    CHECK(p.identity_defect <= 1e-7);
    CHECK_FALSE(p.is_zero());

    HyperbolicSystem s2 = example_system_s2();
    ProjectorPair pair2 = reference_projector(s2);
    SheetModel sheet2 = fit_sheet(s2, 1.0);
    DiffractiveOperator p2 = diffractive_operator(pair2, sheet2);
    CHECK(p2.is_zero(1e-6));

    // Applying -pi L_tan Q L_tan pi to sampled quadratic polynomials matches
    // P: non-periodic grid so finite differences see the raw polynomial.
    HyperplaneGrid g;
    g.nt = 41;
    g.t_end = 1.0;
    g.nx = 64;
    g.x_len = 8.0;
    g.periodic = false;
    TangentialOperator ltan(s1);
    Vec c(2);
    c << 1.0, 0.0;   // range(pi)
    HyperplaneField quad = sample_hyperplane(g, 2, [&](double, double x) {
        return Vec((0.3 * x * x + 0.1 * x - 0.5) * c);
    });
    // -pi L_tan Q L_tan pi F
    HyperplaneField piF(g, 2);
    for (int it = 0; it < g.nt; ++it)
        for (int ix = 0; ix < g.nx; ++ix)
            piF.set_vec(it, ix, pair.pi * quad.vec_at(it, ix));
    HyperplaneField inner = ltan.apply(piF);
    HyperplaneField qinner(g, 2);
    for (int it = 0; it < g.nt; ++it)
        for (int ix = 0; ix < g.nx; ++ix)
            qinner.set_vec(it, ix, pair.qinv * inner.vec_at(it, ix));
    HyperplaneField outer = ltan.apply(qinner);
    HyperplaneField pf = p.apply(quad);
    double max_err = 0.0;
    for (int it = 2; it < g.nt - 2; ++it)
        for (int ix = 4; ix < g.nx - 4; ++ix) {
            Vec lhs = -(pair.pi * outer.vec_at(it, ix));
            Vec rhs = pf.vec_at(it, ix);
            max_err = std::max(max_err, (lhs - rhs).norm());
        }
    CHECK(max_err <= 1e-6);

    // P annihilates constants.
    HyperplaneField cst = sample_hyperplane(g, 2, [&](double, double) {
        return Vec(1.7 * c);
    });
    HyperplaneField pcst = p.apply(cst);
    for (const Complex& z : pcst.raw()) CHECK(std::abs(z) <= 1e-10);
}

TEST_CASE("jump recursion on the curved system: linear growth of pi J^1") {
    HyperbolicSystem s1 = example_system_s1();
    ProjectorPair pair = reference_projector(s1);
    SheetModel sheet = fit_sheet(s1, 1.0);
    const RealVec& v = sheet.group_velocity();
    const double T = 10.0;
    SourceModel src = SourceModel::registered("gauss_jump", 2, T);
    HyperplaneGrid g = make_grid(2201, 110.0, 128, 40.0);

    JumpSequence seq = solve_jump_sequence(
        pair, v, s1, g, 2,
        [&](int n, double t, double x) { return src.jump(n, t, x); });

    // J^0 stays in range(pi) and is bounded by its settled value.
    double j0_settle = seq.jumps[0].sup_at_time(g.nt / 2);
    double j0_max = 0.0;
    for (int it = 0; it < g.nt; ++it) {
        j0_max = std::max(j0_max, seq.jumps[0].sup_at_time(it));
        for (int ix = 0; ix < g.nx; ix += 7) {
            Vec j = seq.jumps[0].vec_at(it, ix);
            CHECK((j - pair.pi * j).norm() <= 1e-10);
        }
    }
    CHECK(j0_max <= 1.2 * j0_settle);

    // Growth of sup |pi J^1| is linear with positive slope on [2T, 10T]...
    std::vector<double> ts, ys;
    for (int it = 0; it < g.nt; ++it) {
        const double t = g.time(it);
        if (t < 2.0 * T || t > 10.0 * T) continue;
        ts.push_back(t);
        double sup = 0.0;
        for (int ix = 0; ix < g.nx; ++ix)
            sup = std::max(sup, (pair.pi * seq.jumps[1].vec_at(it, ix)).norm());
        ys.push_back(sup);
    }
    LinearFit fit = linear_fit(ts, ys);
    CHECK(fit.slope > 0.0);
    CHECK(fit.rel_residual <= 0.05);

    // ... and matches the characteristic-quadrature prediction within 2%.
    DiffractiveOperator p = diffractive_operator(pair, sheet);
    double predicted = 0.0;
    for (int ix = 0; ix < g.nx; ++ix) {
        Vec s = predict_growth_slope(
            p, v,
            [&](int n, double t, double x) {
                return src.jump_xprime_derivative(n, 2, t, x);
            },
            T, g.x(ix));
        predicted = std::max(predicted, s.norm());
    }
    CHECK(predicted > 0.0);
    CHECK(std::abs(fit.slope - predicted) <= 0.02 * predicted);
}

TEST_CASE("jump recursion trivial and flat cases") {
    HyperbolicSystem s2 = example_system_s2();
    ProjectorPair pair = reference_projector(s2);
    TangentialOperator ltan(s2);
    HyperplaneGrid g = make_grid(1001, 20.0, 128, 40.0);
    RealVec v = RealVec::Zero(2);

    // All-zero inputs give zero J^n.
    HyperplaneField z(g, 3);
    HyperplaneField j1 = solve_jump_n(pair, v, ltan, z, z, z);
    for (const Complex& q : j1.raw()) CHECK(std::abs(q) == 0.0);

    // Flat sheet: beyond the source support J^1 is frozen along (vertical)
    // characteristics.
    FlatBranchSource src(TimeBump(1.0), PolyGaussian1D({1.0, 1.0}, 0.0, 2.0),
                         PolyGaussian1D({1.0, -1.0}, 0.0, 2.0),
                         PolyGaussian1D({1.0}, 0.0, 4.0));
    JumpSequence seq = solve_jump_sequence(
        pair, v, s2, g, 2,
        [&](int n, double t, double x) { return src.jump(n, t, x); });
    const int it_ref = static_cast<int>(std::lround(2.0 / g.dt()));
    double drift = 0.0, scale = 0.0;
    for (int it = it_ref; it < g.nt; it += 25)
        for (int ix = 0; ix < g.nx; ++ix) {
            drift = std::max(drift, (seq.jumps[1].vec_at(it, ix) -
                                     seq.jumps[1].vec_at(it_ref, ix)).norm());
            scale = std::max(scale, seq.jumps[1].vec_at(it_ref, ix).norm());
        }
    CHECK(scale > 0.0);
    CHECK(drift <= 1e-6 * std::max(1.0, scale));
}

TEST_CASE("transport identity of geometric optics on sampled fields") {
    // pi L_tan pi = d/dt + v.dx' to 1e-6, exercised on a system with a
    // nonzero tangential drift.
    HyperbolicSystem s3 = example_system_s3();
    ProjectorPair pair = reference_projector(s3);
    SheetModel sheet = fit_sheet(s3, 0.35);
    const double v2 = sheet.group_velocity()(1);
    TangentialOperator ltan(s3);
    HyperplaneGrid g = make_grid(201, 2.0, 128, 30.0);
    Vec c(2);
    c << 1.0, 0.0;
    // Exact grid harmonics so the spectral x'-derivative is exact.
    const double k1 = 2.0 * M_PI * 3 / g.x_len, k2 = 2.0 * M_PI * 2 / g.x_len;
    auto smooth = [=](double t, double x) {
        return std::sin(k1 * x) * std::exp(-0.1 * t) + 0.3 * std::cos(k2 * x + t);
    };
    HyperplaneField f = sample_hyperplane(g, 2, [&](double t, double x) {
        return Vec(smooth(t, x) * c);
    });
    HyperplaneField piF(g, 2);
    for (int it = 0; it < g.nt; ++it)
        for (int ix = 0; ix < g.nx; ++ix)
            piF.set_vec(it, ix, pair.pi * f.vec_at(it, ix));
    HyperplaneField lhs_field(g, 2);
    {
        HyperplaneField lf = ltan.apply(piF);
        for (int it = 0; it < g.nt; ++it)
            for (int ix = 0; ix < g.nx; ++ix)
                lhs_field.set_vec(it, ix, pair.pi * lf.vec_at(it, ix));
    }
    // Reference: (d/dt + v2 dx) pi f with closed-form derivatives.
    auto dt_smooth = [=](double t, double x) {
        return -0.1 * std::sin(k1 * x) * std::exp(-0.1 * t) -
               0.3 * std::sin(k2 * x + t);
    };
    auto dx_smooth = [=](double t, double x) {
        return k1 * std::cos(k1 * x) * std::exp(-0.1 * t) -
               0.3 * k2 * std::sin(k2 * x + t);
    };
    double max_err = 0.0;
    for (int it = 2; it < g.nt - 2; ++it)
        for (int ix = 0; ix < g.nx; ++ix) {
            const double t = g.time(it), x = g.x(ix);
            Vec expect = (dt_smooth(t, x) + v2 * dx_smooth(t, x)) * (pair.pi * c);
            max_err = std::max(max_err, (lhs_field.vec_at(it, ix) - expect).norm());
        }
    CHECK(max_err <= 1e-6);
}

TEST_CASE("reconstruct_expansion") {
    HyperplaneGrid g = make_grid(41, 2.0, 64, 16.0);
    GridSpec spec;
    spec.d = 2;
    spec.n = {64, 64};
    spec.length = {8.0, 16.0};

    // M = 0 with J^0 = 1: Heaviside in x1.
    JumpSequence seq;
    seq.order = 0;
    seq.grid = g;
    seq.jumps.push_back(sample_hyperplane(g, 1, [](double, double) {
        return Vec(Vec::Ones(1));
    }));
    GridField h = reconstruct_expansion(seq, spec, 1.0);
    std::vector<int> idx{spec.zero_index(0) + 5, 10};
    CHECK(h.at(spec.flat_index(idx), 0) == Complex(1.0));
    idx[0] = spec.zero_index(0) - 5;
    CHECK(h.at(spec.flat_index(idx), 0) == Complex(0.0));
    idx[0] = spec.zero_index(0);
    CHECK(h.at(spec.flat_index(idx), 0) == Complex(0.5));

    // All-zero jumps give the zero field.
    JumpSequence zero;
    zero.order = 1;
    zero.grid = g;
    zero.jumps.push_back(HyperplaneField(g, 1));
    zero.jumps.push_back(HyperplaneField(g, 1));
    GridField zf = reconstruct_expansion(zero, spec, 0.7);
    for (const Complex& z : zf.data) CHECK(std::abs(z) == 0.0);

    // M = 2 with polynomial jumps matches the hand expansion on x1 > 0.
    JumpSequence poly;
    poly.order = 2;
    poly.grid = g;
    for (int n = 0; n <= 2; ++n)
        poly.jumps.push_back(sample_hyperplane(g, 1, [n](double t, double x) {
            return Vec(Vec::Constant(1, Complex((n + 1.0) * (1.0 + 0.5 * t) +
                                                    0.1 * n * x,
                                                0.0)));
        }));
    const double tq = 1.0;
    GridField pf = reconstruct_expansion(poly, spec, tq);
    for (int i0 : {spec.zero_index(0) + 3, spec.zero_index(0) + 17}) {
        for (int i1 : {5, 40}) {
            const double x1 = spec.node_coord(0, i0);
            const double xp = spec.node_coord(1, i1);
            double expect = 0.0;
            double fact = 1.0, pw = 1.0;
            for (int n = 0; n <= 2; ++n) {
                expect += ((n + 1.0) * 1.5 + 0.1 * n * xp) * pw / fact;
                pw *= x1;
                fact *= (n + 1.0);
            }
            std::vector<int> ii{i0, i1};
            CHECK(pf.at(spec.flat_index(ii), 0).real() ==
                  doctest::Approx(expect).epsilon(1e-9));
        }
    }
}

TEST_CASE("jump equation residuals vanish at the discretization order") {
    HyperbolicSystem s1 = example_system_s1();
    ProjectorPair pair = reference_projector(s1);
    SheetModel sheet = fit_sheet(s1, 1.0);
    const RealVec& v = sheet.group_velocity();
    SourceModel src = SourceModel::registered("two_sided", 2, 1.0);

    auto jeqbis_norm = [&](int nt) {
        HyperplaneGrid g = make_grid(nt, 8.0, 128, 40.0);
        TangentialOperator ltan(s1);
        JumpSequence seq = solve_jump_sequence(
            pair, v, s1, g, 2,
            [&](int n, double t, double x) { return src.jump(n, t, x); });
        // Jeq: A1 J^0 = 0 pointwise.
        double jeq = 0.0;
        for (int it = 0; it < g.nt; it += 5)
            for (int ix = 0; ix < g.nx; ix += 5)
                jeq = std::max(jeq, (s1.A[0] * seq.jumps[0].vec_at(it, ix)).norm());
        CHECK(jeq <= 1e-8);
        // Jeqbis order n: A1 J^{n+1} + L_tan J^n - Jf^n -> 0.
        double worst = 0.0;
        for (int n = 0; n < 2; ++n) {
            HyperplaneField lt = ltan.apply(seq.jumps[n]);
            for (int it = 2; it < g.nt - 2; it += 3)
                for (int ix = 0; ix < g.nx; ix += 3) {
                    Vec r = s1.A[0] * seq.jumps[n + 1].vec_at(it, ix) +
                            lt.vec_at(it, ix) - src.jump(n, g.time(it), g.x(ix));
                    worst = std::max(worst, r.norm());
                }
        }
        return worst;
    };
    const double r1 = jeqbis_norm(201);
    const double r2 = jeqbis_norm(401);
    CHECK(r2 < r1);
    const double order = std::log2(r1 / r2);
    CHECK(order >= 2.0);
}

TEST_CASE("residual smoothness check round trip") {
    HyperbolicSystem s1 = example_system_s1();
    ProjectorPair pair = reference_projector(s1);
    SheetModel sheet = fit_sheet(s1, 1.0);
    const RealVec& v = sheet.group_velocity();
    SourceModel src = SourceModel::registered("gauss_jump", 2, 1.0);

    auto source_jump = [&](int n, double t, double x) { return src.jump(n, t, x); };
    auto source_side = [&](double t, const RealVec& x, int side) {
        return src.evaluate_side(t, x, side);
    };
    // Probes inside the source window, where the time quadrature is actually
    // exercised, plus one in the frozen regime.
    std::vector<double> probes{0.3, 0.55, 0.8, 1.25, 5.0};

    auto residual_at = [&](int nt) {
        HyperplaneGrid g = make_grid(nt, 8.0, 128, 40.0);
        JumpSequence seq =
            solve_jump_sequence(pair, v, s1, g, 2, source_jump);
        return residual_smoothness_check(s1, seq, source_side, source_jump, 2,
                                         0.5, 10, probes);
    };
    ResidualReport fine = residual_at(1601);
    REQUIRE(fine.residual_jump_norms.size() == 2);
    CHECK(fine.residual_jump_norms[0] <= 1e-6);
    CHECK(fine.residual_jump_norms[1] <= 1e-6);

    // Convergence order >= 2 under time-grid refinement, measured where the
    // time-step error still dominates the extraction floor.
    ResidualReport coarse = residual_at(41);
    ResidualReport mid = residual_at(81);
    const double worst_c = std::max(coarse.residual_jump_norms[0],
                                    coarse.residual_jump_norms[1]);
    const double worst_m = std::max(mid.residual_jump_norms[0],
                                    mid.residual_jump_norms[1]);
    CHECK(std::log2(worst_c / worst_m) >= 2.0);

    // Corrupting J^1 by a factor of two is detected at O(1).
    {
        HyperplaneGrid g = make_grid(801, 8.0, 128, 40.0);
        JumpSequence seq = solve_jump_sequence(pair, v, s1, g, 2, source_jump);
        for (Complex& z : seq.jumps[1].raw()) z *= 2.0;
        ResidualReport bad = residual_smoothness_check(
            s1, seq, source_side, source_jump, 2, 0.5, 10, probes);
        CHECK(bad.residual_jump_norms[0] > 1e-3);
    }

    // Zero jumps with a smooth source: residual jump is exactly the (zero)
    // jump of the smooth source.
    {
        HyperplaneGrid g = make_grid(401, 8.0, 128, 40.0);
        JumpSequence seq;
        seq.order = 2;
        seq.grid = g;
        for (int n = 0; n <= 2; ++n) seq.jumps.push_back(HyperplaneField(g, 2));
        auto smooth_side = [&](double t, const RealVec& x, int) {
            Vec f(2);
            f << std::exp(-x.squaredNorm()) * std::sin(t), 0.0;
            return f;
        };
        auto zero_jump = [&](int, double, double) { return Vec(Vec::Zero(2)); };
        ResidualReport rep = residual_smoothness_check(
            s1, seq, smooth_side, zero_jump, 2, 0.125, 10, probes);
        CHECK(rep.residual_jump_norms[0] <= 1e-10);
        CHECK(rep.residual_jump_norms[1] <= 1e-6);
    }
}

TEST_CASE("predicted growth slope vanishes in the trivial cases") {
    HyperbolicSystem s2 = example_system_s2();
    ProjectorPair pair = reference_projector(s2);
    SheetModel sheet = fit_sheet(s2, 1.0);
    DiffractiveOperator p = diffractive_operator(pair, sheet);
    CHECK(p.is_zero(1e-6));
    RealVec v = RealVec::Zero(2);
    Vec s = predict_growth_slope(
        p, v, [&](int, double, double) { return Vec(Vec::Zero(3)); }, 1.0, 0.3);
    CHECK(s.norm() <= 1e-12);

    // Cancellation: the Gaussian transverse profile has inflection points
    // where its second derivative vanishes; the characteristic through one
    // carries zero predicted slope.
    HyperbolicSystem s1 = example_system_s1();
    ProjectorPair pair1 = reference_projector(s1);
    SheetModel sheet1 = fit_sheet(s1, 1.0);
    DiffractiveOperator p1 = diffractive_operator(pair1, sheet1);
    SourceModel src = SourceModel::registered("gauss_jump", 2, 1.0);
    const double w = 4.0;   // transverse width of gauss_jump
    const double inflection = w / std::sqrt(2.0);
    Vec at_inflection = predict_growth_slope(
        p1, sheet1.group_velocity(),
        [&](int n, double t, double x) {
            return src.jump_xprime_derivative(n, 2, t, x);
        },
        1.0, inflection);
    Vec at_center = predict_growth_slope(
        p1, sheet1.group_velocity(),
        [&](int n, double t, double x) {
            return src.jump_xprime_derivative(n, 2, t, x);
        },
        1.0, 0.0);
    CHECK(at_center.norm() > 1e-3);
    CHECK(at_inflection.norm() <= 1e-10 * std::max(1.0, at_center.norm()));
}
