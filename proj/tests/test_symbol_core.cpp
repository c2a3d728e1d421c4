#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "jumpwave/hyperbolic_system.hpp"
#include "jumpwave/sheet.hpp"
#include "jumpwave/spectral.hpp"

using namespace jumpwave;

namespace {

RealVec xi2d(double a, double b) {
    RealVec v(2);
    v << a, b;
    return v;
}

HyperbolicSystem random_hermitian_system(std::mt19937_64& rng, int d, int k) {
    std::normal_distribution<double> g(0.0, 1.0);
    HyperbolicSystem sys;
    sys.d = d;
    sys.k = k;
    sys.symmetric = true;
    for (int j = 0; j < d; ++j) {
        Mat m(k, k);
        for (int r = 0; r < k; ++r)
            for (int c = 0; c < k; ++c) m(r, c) = Complex(g(rng), g(rng));
        sys.A.push_back(0.5 * (m + m.adjoint()).eval());
    }
    sys.validate();
    return sys;
}

} // namespace

TEST_CASE("assemble_symbol linear combinations") {
    HyperbolicSystem s1 = example_system_s1();
    Mat a = assemble_symbol(s1, xi2d(1, 0));
    CHECK(a(0, 0) == Complex(0));
    CHECK(a(1, 1) == Complex(1));
    CHECK(a(0, 1) == Complex(0));

    Mat z = assemble_symbol(s1, xi2d(0, 0));
    CHECK(z.cwiseAbs().maxCoeff() == 0.0);

    Mat m = assemble_symbol(s1, xi2d(1, 1));
    CHECK(m(0, 0) == Complex(0));
    CHECK(m(0, 1) == Complex(1));
    CHECK(m(1, 0) == Complex(1));
    CHECK(m(1, 1) == Complex(1));

    RealVec bad(3);
    bad << 1, 2, 3;
    CHECK_THROWS_AS(assemble_symbol(s1, bad), InputError);
}

TEST_CASE("spectral_decompose on the reference system") {
    HyperbolicSystem s1 = example_system_s1();

    SpectralDecomposition d1 = spectral_decompose(s1, xi2d(1, 0));
    REQUIRE(d1.size() == 2);
    CHECK(d1.eigenvalues[0] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(d1.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK((d1.projectors[0] - (Mat(2, 2) << 1, 0, 0, 0).finished()).norm() < 1e-12);
    CHECK((d1.projectors[1] - (Mat(2, 2) << 0, 0, 0, 1).finished()).norm() < 1e-12);

    SpectralDecomposition d2 = spectral_decompose(s1, xi2d(0, 1));
    REQUIRE(d2.size() == 2);
    CHECK(d2.eigenvalues[0] == doctest::Approx(-1.0));
    CHECK(d2.eigenvalues[1] == doctest::Approx(1.0));
    Mat pm = 0.5 * (Mat(2, 2) << 1, -1, -1, 1).finished();
    Mat pp = 0.5 * (Mat(2, 2) << 1, 1, 1, 1).finished();
    CHECK((d2.projectors[0] - pm).norm() < 1e-12);
    CHECK((d2.projectors[1] - pp).norm() < 1e-12);
}

TEST_CASE("closed-form branch values near the axis") {
    // A(1, eps) has eigenvalues (1 +- sqrt(1 + 4 eps^2)) / 2.
    HyperbolicSystem s1 = example_system_s1();
    for (double eps : {1e-3, 1e-2, 0.1, 0.3}) {
        SpectralDecomposition dec = spectral_decompose(s1, xi2d(1, eps));
        REQUIRE(dec.size() == 2);
        const double lo = (1.0 - std::sqrt(1.0 + 4 * eps * eps)) / 2.0;
        const double hi = (1.0 + std::sqrt(1.0 + 4 * eps * eps)) / 2.0;
        CHECK(dec.eigenvalues[0] == doctest::Approx(lo).epsilon(1e-12));
        CHECK(dec.eigenvalues[1] == doctest::Approx(hi).epsilon(1e-12));
    }
}

TEST_CASE("decomposition invariants on random Hermitian systems") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_int_distribution<int> kd(1, 6), dd(2, 3);
    for (int trial = 0; trial < 100; ++trial) {
        HyperbolicSystem sys = random_hermitian_system(rng, dd(rng), kd(rng));
        for (int s = 0; s < 20; ++s) {
            RealVec xi(sys.d);
            for (int j = 0; j < sys.d; ++j) xi(j) = g(rng) * std::pow(10.0, s % 3 - 1);
            Mat a = assemble_symbol(sys, xi);
            SpectralDecomposition dec = spectral_decompose(sys, xi);
            Mat sum = Mat::Zero(sys.k, sys.k);
            Mat rec = Mat::Zero(sys.k, sys.k);
            for (int i = 0; i < dec.size(); ++i) {
                sum += dec.projectors[i];
                rec += dec.eigenvalues[i] * dec.projectors[i];
                for (int l = 0; l < dec.size(); ++l)
                    if (i != l)
                        CHECK((dec.projectors[i] * dec.projectors[l]).norm() <= 1e-10);
            }
            CHECK((sum - identity(sys.k)).norm() <= 1e-10);
            CHECK((rec - a).norm() <= 1e-9 * std::max(1.0, a.norm()));
            int mult = 0;
            for (int m : dec.multiplicities) mult += m;
            CHECK(mult == sys.k);
            for (int i = 0; i + 1 < dec.size(); ++i)
                CHECK(dec.eigenvalues[i] < dec.eigenvalues[i + 1]);
        }
    }
}

TEST_CASE("projector scale invariance") {
    std::mt19937_64 rng(11);
    HyperbolicSystem sys = random_hermitian_system(rng, 2, 4);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 25; ++trial) {
        RealVec xi(2);
        xi << g(rng), g(rng);
        if (xi.norm() < 0.1) continue;
        SpectralDecomposition a = spectral_decompose(sys, xi);
        for (double s : {0.5, 3.0, 40.0}) {
            SpectralDecomposition b = spectral_decompose(sys, (s * xi).eval());
            REQUIRE(a.size() == b.size());
            for (int i = 0; i < a.size(); ++i) {
                CHECK(b.eigenvalues[i] == doctest::Approx(s * a.eigenvalues[i])
                                              .epsilon(1e-8));
                CHECK((a.projectors[i] - b.projectors[i]).norm() <= 1e-8);
            }
        }
    }
}

TEST_CASE("strong hyperbolicity verification") {
    HyperbolicSystem s1 = example_system_s1();
    auto samples = sphere_samples(2, 500, {1.0}, 3);
    HyperbolicityReport rep = verify_strong_hyperbolicity(s1, samples);
    CHECK(rep.condition_a);
    CHECK(std::abs(rep.kreiss_sup - 1.0) <= 1e-10);   // Hermitian: unitary

    // Defective system: A1 nilpotent.
    HyperbolicSystem bad;
    bad.d = 2;
    bad.k = 2;
    bad.A = {(Mat(2, 2) << 0, 1, 0, 0).finished(), Mat::Zero(2, 2)};
    bad.validate();
    HyperbolicityReport rep2 = verify_strong_hyperbolicity(bad, {xi2d(1, 0)});
    CHECK_FALSE(rep2.condition_a);
    CHECK(rep2.failure_xi.has_value());

    HyperbolicSystem s2 = example_system_s2();
    HyperbolicityReport rep3 =
        verify_strong_hyperbolicity(s2, sphere_samples(2, 300, {0.5, 1, 2}, 5));
    CHECK(rep3.condition_a);
    CHECK(rep3.condition_b_sup <= 1.0 + 1e-10);   // orthogonal projectors
}

TEST_CASE("propagator against the scaling-and-squaring oracle") {
    HyperbolicSystem s1 = example_system_s1();

    Mat id = propagator(s1, xi2d(0.3, -0.7), 0.0);
    CHECK((id - identity(2)).norm() < 1e-13);

    Mat pi_rot = propagator(s1, xi2d(1, 0), M_PI);
    CHECK(std::abs(pi_rot(0, 0) - Complex(1, 0)) < 1e-12);
    CHECK(std::abs(pi_rot(1, 1) - Complex(-1, 0)) < 1e-12);
    CHECK(std::abs(pi_rot(0, 1)) < 1e-12);

    for (double t : {0.3, 1.7, 5.0}) {
        Mat ours = propagator(s1, xi2d(0, 1), t);
        Mat arg = Complex(0, t) * assemble_symbol(s1, xi2d(0, 1));
        Mat oracle = arg.exp();   // Pade scaling-and-squaring
        CHECK((ours - oracle).norm() <= 1e-10);
    }
}

TEST_CASE("propagator semigroup property") {
    std::mt19937_64 rng(23);
    HyperbolicSystem sys = random_hermitian_system(rng, 2, 3);
    RealVec xi = xi2d(0.8, -1.3);
    for (auto [t, s] : std::vector<std::pair<double, double>>{
             {0.5, 0.25}, {1.0, 2.0}, {-0.7, 1.9}}) {
        Mat lhs = propagator(sys, xi, t) * propagator(sys, xi, s);
        Mat rhs = propagator(sys, xi, t + s);
        CHECK((lhs - rhs).norm() <= 1e-9);
    }
}

TEST_CASE("fit_sheet on the curved reference system") {
    HyperbolicSystem s1 = example_system_s1();
    SheetModel sheet = fit_sheet(s1, 1.0);

    CHECK(sheet.group_velocity().norm() <= 1e-8);
    CHECK(sheet.hessian()(0, 0) == doctest::Approx(-2.0).epsilon(1e-7));
    CHECK(sheet.rank_class() == RankClass::maximal);
    CHECK(sheet.hessian_rank() == 1);

    RealVec xp(1);
    xp << 0.7;
    CHECK(sheet.paraxial_q(xp) == doctest::Approx(-0.49).epsilon(1e-7));
    RealMat q = paraxial_form(sheet);
    CHECK(q(0, 0) == doctest::Approx(-1.0).epsilon(1e-7));

    // Closed-form branch: lambda(1, s) = (1 - sqrt(1 + 4 s^2)) / 2.
    for (double s : {0.05, 0.2, 0.5}) {
        const double expect = (1.0 - std::sqrt(1.0 + 4 * s * s)) / 2.0;
        CHECK(sheet.value(xi2d(1.0, s)) == doctest::Approx(expect).epsilon(1e-10));
        CHECK(sheet.value_fast(1.0, s) == doctest::Approx(expect).epsilon(1e-10));
    }
    // Degree-1 homogeneity and odd extension.
    CHECK(sheet.value(xi2d(2, 0.4)) ==
          doctest::Approx(2 * sheet.value(xi2d(1, 0.2))).epsilon(1e-10));
    CHECK(sheet.value_fast(-1.0, -0.2) ==
          doctest::Approx(-sheet.value_fast(1.0, 0.2)).epsilon(1e-10));

    // Euler identity at the axis: d lambda / d xi1 = lambda = 0.
    double l, d1, d2;
    sheet.gradient_fast(1.0, 0.0, d1, d2);
    l = sheet.value_fast(1.0, 0.0);
    CHECK(std::abs(l) <= 1e-10);
    CHECK(std::abs(d1) <= 1e-8);

    // Gradient handle matches the closed form away from the axis.
    sheet.gradient_fast(1.0, 0.3, d1, d2);
    const double rho = std::sqrt(1.0 + 4 * 0.09);
    CHECK(d1 == doctest::Approx(0.5 * (1.0 - 1.0 / rho)).epsilon(1e-9));
    CHECK(d2 == doctest::Approx(-2 * 0.3 / rho).epsilon(1e-9));
}

TEST_CASE("fit_sheet flat branch of the acoustics-type system") {
    HyperbolicSystem s2 = example_system_s2();
    SheetModel sheet = fit_sheet(s2, 1.0);
    CHECK(sheet.group_velocity().norm() <= 1e-8);
    CHECK(sheet.hessian().cwiseAbs().maxCoeff() <= 1e-7);
    CHECK(sheet.rank_class() == RankClass::flat);
    CHECK(sheet.value(xi2d(1.0, 0.4)) == doctest::Approx(0.0).epsilon(1e-10));
    RealVec xp(1);
    xp << 2.0;
    CHECK(sheet.paraxial_q(xp) == doctest::Approx(0.0));
    CHECK(sheet.paraxial_q((RealVec(1) << 0.0).finished()) == 0.0);
}

TEST_CASE("fit_sheet group velocity with a tangential drift") {
    HyperbolicSystem s3 = example_system_s3();
    SheetModel sheet = fit_sheet(s3, 0.35);
    CHECK(std::abs(sheet.group_velocity()(0)) <= 1e-8);
    CHECK(sheet.group_velocity()(1) == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(sheet.hessian()(0, 0) == doctest::Approx(-2.0).epsilon(1e-6));
}

TEST_CASE("fit_sheet detects branch collisions on the requested cone") {
    // Diagonal system whose sheets cross at angle pi/4.
    HyperbolicSystem crossing;
    crossing.d = 2;
    crossing.k = 2;
    crossing.symmetric = true;
    crossing.A = {(Mat(2, 2) << 0, 0, 0, 1).finished(),
                  (Mat(2, 2) << 1, 0, 0, 0).finished()};
    crossing.validate();
    CHECK_THROWS_AS(fit_sheet(crossing, 1.2), ContractError);
    // A narrow cone stays clear of the crossing.
    SheetModel ok = fit_sheet(crossing, 0.3);
    CHECK(ok.rank_class() == RankClass::flat);   // lambda = xi2 is linear
}

TEST_CASE("fit_sheet Richardson order on the Hessian") {
    HyperbolicSystem s1 = example_system_s1();
    auto err_at = [&](double h) {
        SheetModel sheet = fit_sheet(s1, 1.0, h);
        return std::abs(sheet.hessian()(0, 0) + 2.0);
    };
    const double e1 = err_at(0.04);
    const double e2 = err_at(0.02);
    const double order = std::log2(e1 / e2);
    CHECK(order >= 3.5);
}

TEST_CASE("fit_sheet rejects a non-characteristic hyperplane") {
    HyperbolicSystem sys;
    sys.d = 2;
    sys.k = 2;
    sys.symmetric = true;
    sys.A = {identity(2), (Mat(2, 2) << 0, 1, 1, 0).finished()};
    sys.validate();
    CHECK_THROWS_WITH_AS(fit_sheet(sys, 0.5),
                         doctest::Contains("not characteristic"), ContractError);
}
