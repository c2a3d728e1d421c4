// spectral.hpp — pointwise spectral decomposition of the symbol A(xi),
// the propagator exp(itA(xi)), and sampled strong-hyperbolicity checks.
//
// A(xi) = sum_lambda lambda * pi_lambda(xi) with pi_lambda the (possibly
// oblique) projector onto ker(A - lambda I) along the complementary
// eigenspaces. Eigenvalues closer than a relative cluster tolerance are
// merged into a single projector so genuine multiplicity is not split by
// roundoff.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "jumpwave/hyperbolic_system.hpp"

namespace jumpwave {

struct SpectralDecomposition {
    std::vector<double> eigenvalues;   // distinct, strictly increasing
    std::vector<Mat> projectors;       // same length; sum = I
    std::vector<int> multiplicities;   // sum = k

    int size() const { return static_cast<int>(eigenvalues.size()); }

    // pi_i applied to v summed with exp(i t lambda_i) weights.
    Mat evolve(double t) const;
};

struct SpectralOptions {
    double cluster_rel_tol = 1e-8;   // relative gap for merging eigenvalues
    double real_tol = 1e-9;          // |Im lambda| <= real_tol * scale
    double cond_threshold = 1e8;     // eigenvector condition number cap
};

// Throws ContractError "not hyperbolic at xi" for non-real spectrum, and
// "not strongly diagonalizable at xi" for defective symbols.
SpectralDecomposition spectral_decompose(const HyperbolicSystem& sys,
                                         const RealVec& xi,
                                         const SpectralOptions& opts = {});

// exp(i t A(xi)) = sum_lambda exp(i t lambda) pi_lambda. Unitary for
// symmetric systems.
Mat propagator(const HyperbolicSystem& sys, const RealVec& xi, double t);

struct HyperbolicityReport {
    bool condition_a = false;       // decomposition succeeded at every sample
    double condition_b_sup = 0.0;   // max over samples of max_lambda |pi|_2
    double kreiss_sup = 0.0;        // max over samples of |exp(iA(xi))|_2
    int samples = 0;
    std::optional<RealVec> failure_xi;
    std::string failure_reason;
};

// Sampled estimate only; a pass is evidence, not a proof. Samples should
// cover the unit sphere at several radii.
HyperbolicityReport verify_strong_hyperbolicity(
    const HyperbolicSystem& sys, const std::vector<RealVec>& samples);

// Deterministic sample set: `n_dirs` unit directions (uniform angles for
// d=2, Fibonacci sphere for d=3, Gaussian-normalized otherwise) times the
// given radii.
std::vector<RealVec> sphere_samples(int d, int n_dirs,
                                    const std::vector<double>& radii,
                                    std::uint64_t seed);

} // namespace jumpwave
