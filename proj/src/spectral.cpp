#include "jumpwave/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

namespace jumpwave {

namespace {

std::string xi_to_string(const RealVec& xi) {
    std::ostringstream os;
    os << "(";
    for (int i = 0; i < xi.size(); ++i) os << (i ? ", " : "") << xi(i);
    os << ")";
    return os.str();
}

// Groups sorted eigenvalue indices into clusters separated by more than
// rel_tol * scale.
std::vector<std::vector<int>> cluster_indices(const std::vector<double>& vals,
                                              const std::vector<int>& order,
                                              double rel_tol, double scale) {
    std::vector<std::vector<int>> clusters;
    for (int idx : order) {
        if (!clusters.empty() &&
            vals[idx] - vals[clusters.back().back()] <= rel_tol * scale) {
            clusters.back().push_back(idx);
        } else {
            clusters.push_back({idx});
        }
    }
    return clusters;
}

} // namespace

Mat SpectralDecomposition::evolve(double t) const {
    const int k = projectors.empty() ? 0 : static_cast<int>(projectors[0].rows());
    Mat out = Mat::Zero(k, k);
    for (std::size_t i = 0; i < eigenvalues.size(); ++i)
        out += std::exp(Complex(0.0, t * eigenvalues[i])) * projectors[i];
    return out;
}

SpectralDecomposition spectral_decompose(const HyperbolicSystem& sys,
                                         const RealVec& xi,
                                         const SpectralOptions& opts) {
    const Mat a = assemble_symbol(sys, xi);
    const int k = sys.k;
    const double mat_scale = std::max(a.cwiseAbs().maxCoeff(), 1e-300);

    // Hermitian path: orthonormal eigenvectors, orthogonal projectors.
    const double herm_defect = (a - a.adjoint()).cwiseAbs().maxCoeff();
    if (herm_defect <= 1e-13 * mat_scale) {
        Eigen::SelfAdjointEigenSolver<Mat> es(a);
        if (es.info() != Eigen::Success)
            throw ContractError("eigensolver failed at xi = " + xi_to_string(xi));
        std::vector<double> vals(k);
        for (int i = 0; i < k; ++i) vals[i] = es.eigenvalues()(i);
        const double scale = std::max(std::abs(vals.front()),
                                      std::abs(vals.back()));
        std::vector<int> order(k);
        std::iota(order.begin(), order.end(), 0);
        auto clusters = cluster_indices(vals, order, opts.cluster_rel_tol,
                                        std::max(scale, 1e-300));
        SpectralDecomposition dec;
        for (const auto& c : clusters) {
            double mean = 0.0;
            Mat p = Mat::Zero(k, k);
            for (int idx : c) {
                mean += vals[idx];
                p += es.eigenvectors().col(idx) * es.eigenvectors().col(idx).adjoint();
            }
            dec.eigenvalues.push_back(mean / c.size());
            dec.projectors.push_back(p);
            dec.multiplicities.push_back(static_cast<int>(c.size()));
        }
        return dec;
    }

    // General path: complex eigensolver, oblique projectors from V and V^-1.
    Eigen::ComplexEigenSolver<Mat> es(a, /*computeEigenvectors=*/true);
    if (es.info() != Eigen::Success)
        throw ContractError("eigensolver failed at xi = " + xi_to_string(xi));

    double im_max = 0.0, re_max = 0.0;
    for (int i = 0; i < k; ++i) {
        im_max = std::max(im_max, std::abs(es.eigenvalues()(i).imag()));
        re_max = std::max(re_max, std::abs(es.eigenvalues()(i).real()));
    }
    const double spec_scale = std::max(std::max(re_max, im_max), 1e-300);
    if (im_max > opts.real_tol * spec_scale)
        throw ContractError("not hyperbolic at xi = " + xi_to_string(xi) +
                            " (eigenvalue imaginary part " + std::to_string(im_max) + ")");

    Mat v = es.eigenvectors();
    Eigen::JacobiSVD<Mat> svd(v);
    const double cond = svd.singularValues()(0) /
                        std::max(svd.singularValues()(k - 1), 1e-300);
    if (cond > opts.cond_threshold)
        throw ContractError("not strongly diagonalizable at xi = " +
                            xi_to_string(xi) + " (eigenvector condition " +
                            std::to_string(cond) + ")");
    Mat vinv = v.inverse();

    std::vector<double> vals(k);
    for (int i = 0; i < k; ++i) vals[i] = es.eigenvalues()(i).real();
    std::vector<int> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return vals[i] < vals[j]; });
    auto clusters = cluster_indices(vals, order, opts.cluster_rel_tol, spec_scale);

    SpectralDecomposition dec;
    for (const auto& c : clusters) {
        double mean = 0.0;
        Mat p = Mat::Zero(k, k);
        for (int idx : c) {
            mean += vals[idx];
            p += v.col(idx) * vinv.row(idx);
        }
        dec.eigenvalues.push_back(mean / c.size());
        dec.projectors.push_back(p);
        dec.multiplicities.push_back(static_cast<int>(c.size()));
    }
    return dec;
}

Mat propagator(const HyperbolicSystem& sys, const RealVec& xi, double t) {
    return spectral_decompose(sys, xi).evolve(t);
}

HyperbolicityReport verify_strong_hyperbolicity(
    const HyperbolicSystem& sys, const std::vector<RealVec>& samples) {
    if (samples.empty())
        throw InputError("verify_strong_hyperbolicity: empty sample set");
    HyperbolicityReport rep;
    rep.condition_a = true;
    rep.samples = static_cast<int>(samples.size());
    for (const auto& xi : samples) {
        try {
            SpectralDecomposition dec = spectral_decompose(sys, xi);
            for (const auto& p : dec.projectors)
                rep.condition_b_sup = std::max(rep.condition_b_sup, operator_norm(p));
            rep.kreiss_sup = std::max(rep.kreiss_sup, operator_norm(dec.evolve(1.0)));
        } catch (const ContractError& e) {
            if (rep.condition_a) {
                rep.condition_a = false;
                rep.failure_xi = xi;
                rep.failure_reason = e.what();
            }
            // exp(iA) still exists for defective symbols.
            Mat ia = Complex(0, 1) * assemble_symbol(sys, xi);
            rep.kreiss_sup = std::max(rep.kreiss_sup, operator_norm(ia.exp()));
        }
    }
    return rep;
}

std::vector<RealVec> sphere_samples(int d, int n_dirs,
                                    const std::vector<double>& radii,
                                    std::uint64_t seed) {
    std::vector<RealVec> dirs;
    dirs.reserve(n_dirs);
    if (d == 2) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const double offset = u(rng);
        for (int i = 0; i < n_dirs; ++i) {
            double th = 2.0 * M_PI * (i + offset) / n_dirs;
            RealVec v(2);
            v << std::cos(th), std::sin(th);
            dirs.push_back(v);
        }
    } else if (d == 3) {
        const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
        for (int i = 0; i < n_dirs; ++i) {
            double z = 1.0 - 2.0 * (i + 0.5) / n_dirs;
            double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            double th = 2.0 * M_PI * i / golden;
            RealVec v(3);
            v << r * std::cos(th), r * std::sin(th), z;
            dirs.push_back(v);
        }
    } else {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> g(0.0, 1.0);
        for (int i = 0; i < n_dirs; ++i) {
            RealVec v(d);
            do {
                for (int j = 0; j < d; ++j) v(j) = g(rng);
            } while (v.norm() < 1e-8);
            dirs.push_back(v / v.norm());
        }
    }
    std::vector<RealVec> out;
    out.reserve(dirs.size() * radii.size());
    for (double r : radii)
        for (const auto& v : dirs) out.push_back(r * v);
    return out;
}

} // namespace jumpwave
