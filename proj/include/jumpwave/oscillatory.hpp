// oscillatory.hpp — direct evaluation of the oscillatory integrals:
// the Van der Corput profile integral sin(x eta + L / eta^k) / eta, the
// parity-reduced principal-value profile integral, its paraxial
// counterpart, nonstationary-phase decay fits, the dyadic partition of
// unity, and the small-epsilon stationary-phase scaling probe.
//
// Quadrature strategy: split at phase-derivative roots, subdivide each
// monotone piece at phase increments of pi with Gauss-Legendre panels.
// When the phase span is enormous, only a few boundary panels are computed
// and the alternating panel series is resummed by an Euler (Abel-boundary)
// transform; the first omitted difference provides the error estimate.

#pragma once

#include <functional>
#include <vector>

#include "jumpwave/cutoff.hpp"
#include "jumpwave/sheet.hpp"
#include "jumpwave/source.hpp"

namespace jumpwave {

struct OscOptions {
    double tol = 1e-8;
    int gl_points = 12;            // per-panel Gauss-Legendre order
    int euler_terms = 10;          // Euler transform depth at each end
    long direct_panel_limit = 4096;   // full marching below this many panels
    long max_panels = 200000;      // hard cap before AccuracyError
};

struct OscResult {
    Complex value{0.0, 0.0};
    double error = 0.0;   // estimated absolute error
    long panels = 0;
};

// integral of g(eta) exp(i psi(eta)) d eta over [a, b], 0 < a < b.
// `stationary_hints` lists candidate roots of psi' inside (a, b); the
// integrator also scans for sign changes of psi'. Throws AccuracyError if
// the estimate cannot be brought under opts.tol within the panel cap.
OscResult oscillatory_integral(const std::function<double(double)>& g,
                               const std::function<double(double)>& psi,
                               const std::function<double(double)>& dpsi,
                               double a, double b,
                               const std::vector<double>& stationary_hints,
                               const OscOptions& opts = {});

// int_I sin(x eta + L / eta^k) / eta d eta on a bounded I in (0, inf).
double corput_integral(double x, double lambda_coef, double k,
                       double a, double b, double tol = 1e-8);

// Transverse Schwartz profile a(xi') paired with the conic cutoff.
struct ProfileSpec {
    CutoffSymbol cutoff;
    PolyGaussian1D a;         // rapidly decreasing transverse profile
    double xi1_max = 0.0;     // optional hard truncation (0 = none); used to
                              // match a grid route's frequency window
};

// P.V. integral of chi phi a(xi2) / xi1 * exp(i (x.xi + t lambda(xi)))
// over R^2, reduced by central symmetry to xi1 > 0. Requires d = 2.
Complex pv_profile_integral(double t, const RealVec& x,
                            const ProfileSpec& profile, const SheetModel& sheet,
                            double tol = 1e-8);

// Same with the paraxial phase x.xi + t (v.xi + Q xi2^2 / xi1); q_coef is
// the scalar Q(1,1) for d = 2. The group-velocity factor translates x by
// v t exactly.
Complex paraxial_profile_integral(double t, const RealVec& x,
                                  const ProfileSpec& profile, const RealVec& v,
                                  double q_coef, double tol = 1e-8);

// Direct two-sided evaluation of the paraxial integral (no parity
// reduction); used to validate the reduced form.
Complex paraxial_profile_integral_two_sided(double t, const RealVec& x,
                                            const ProfileSpec& profile,
                                            const RealVec& v, double q_coef,
                                            double tol = 1e-8);

struct DecayFit {
    double exponent = 0.0;    // least-squares slope of log|value| vs log s
    double residual = 0.0;    // rms residual of the fit
    std::vector<double> s_values;
    std::vector<double> magnitudes;
};

// Evaluates the profile integral along (t, x) = s (t_hat, x_hat) and fits
// the decay exponent. Throws ContractError naming a stationary xi if the
// ray fails the nonstationarity check on the cutoff support.
DecayFit nonstationary_decay_probe(const ProfileSpec& profile,
                                   const SheetModel& sheet,
                                   double t_hat, const RealVec& x_hat,
                                   const std::vector<double>& s_grid,
                                   double tol = 1e-8);

// Dyadic partition of unity chi(x) = g(x) / sum_k g(2^k x) from an annulus
// bump g(|x|) >= 1 on 1 <= |x| <= 2 (radial, any dimension).
class DyadicPartition {
public:
    // g(r) = plateau bump supported on [r_lo, r_hi] containing [1, 2].
    DyadicPartition(double r_lo, double r_hi);

    double g(double r) const;
    double chi(double r) const;            // g / G
    double partition_sum(double r) const;  // sum_k chi(2^k r)
    double support_lo() const { return r_lo_ / 2; }
    double support_hi() const { return 2 * r_hi_; }

private:
    double big_g(double r) const;
    double r_lo_, r_hi_;
};

struct StationaryPhaseSample {
    double epsilon;
    Complex value;
    double ratio;   // |I| / (eps^{n/2} ln(1 + 1/eps) * norm)
};

struct StationaryPhaseReport {
    std::vector<StationaryPhaseSample> samples;
    double sup_ratio = 0.0;
    double norm = 0.0;        // |f|_inf + |f|_{W^{m,1}}, m = ceil(n/2)
    int dimension = 1;
};

// Registered phase/profile pairs: "gauss1" (n=1, phi=x^2/2, Gaussian f) and
// "gauss2" (n=2, radial phi=|x|^2/2, radial Gaussian f). I(eps) computed by
// oscillation-aware quadrature; n=2 reduces to a radial 1-D integral.
StationaryPhaseReport stationary_phase_estimate(
    const std::string& family, const std::vector<double>& eps_grid,
    double tol = 1e-9);

// Closed form for the registered Gaussian pairs (truncation ignored):
// n=1: sqrt(2 pi) (1 - i/eps)^{-1/2}; n=2: the square.
Complex stationary_phase_gaussian_closed_form(int n, double eps);

} // namespace jumpwave
