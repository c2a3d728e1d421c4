// duhamel.hpp — pseudospectral evolution on the periodic box.
//
// Per discrete frequency, the inhomogeneous solution is
//
//   u^(t, xi) = int_0^min(t,T) exp(i (t - s) A(xi)) f^(s, xi) ds,
//
// with the source transform taken at Gauss-Legendre nodes in s (the source
// is smooth in time on each side and supported in [0, T]); for t past the
// support the mode evolves freely. The scalar reduction, the microlocal
// splitting by the conic cutoff and the branch projector, and one-sided
// jump extraction from grid solutions live here too.

#pragma once

#include <functional>
#include <memory>

#include "jumpwave/cutoff.hpp"
#include "jumpwave/grid.hpp"
#include "jumpwave/sheet.hpp"
#include "jumpwave/source.hpp"

namespace jumpwave {

struct DuhamelOptions {
    int quadrature_nodes = 32;       // Gauss-Legendre nodes on [0, T]
    double aliasing_threshold = 1e-6;
    int threads = 1;
};

struct SolverWarnings {
    bool aliasing = false;
    double top_shell_fraction = 0.0;
    int chi_zero_mode_uses = 0;
};

class DuhamelSolver {
public:
    // Samples and transforms the source once; per-mode spectral data are
    // cached so each output time costs one weighted eigenmode sum plus an
    // inverse transform.
    DuhamelSolver(const HyperbolicSystem& sys, const GridSpec& spec,
                  const std::function<GridField(double)>& sample_at,
                  double t_support_end, const DuhamelOptions& opts = {});
    ~DuhamelSolver();

    GridField solution_at(double t) const;
    const SolverWarnings& warnings() const { return warnings_; }

private:
    struct Tables;
    HyperbolicSystem sys_;
    GridSpec spec_;
    double t_end_;
    DuhamelOptions opts_;
    SolverWarnings warnings_;
    std::function<GridField(double)> sample_;
    std::vector<double> quad_nodes_, quad_weights_;
    std::unique_ptr<Tables> tables_;
    GridField accumulate(double t) const;
};

// One-call convenience for a SourceModel right-hand side.
std::vector<GridField> solve_duhamel(const HyperbolicSystem& sys,
                                     const SourceModel& src,
                                     const GridSpec& spec,
                                     const std::vector<double>& output_times,
                                     SolverWarnings* warnings = nullptr,
                                     const DuhamelOptions& opts = {});

// Free scalar evolution of in-cone data: every mode is multiplied by
// exp(-i t lambda(xi)); modes outside the sheet cone are annihilated and
// must carry at most `out_of_cone_tol` of the L2 energy (ContractError
// otherwise). Works for negative t (time reversal). The zero mode carries
// lambda = 0 by homogeneity.
GridField scalar_evolve(const SheetModel& sheet, const GridField& w0, double t,
                        double out_of_cone_tol = 1e-6);

struct MicrolocalSplit {
    GridField far;      // (I - chi(D)) u
    GridField branch;   // pi_branch(D) chi(D) u
    GridField rest;     // (I - pi_branch(D)) chi(D) u
    int chi_zero_mode_uses = 0;
};

MicrolocalSplit microlocal_split(const GridField& u, const CutoffSymbol& cutoff,
                                 const SheetModel& sheet);

// One-sided values/derivatives at x1 = 0 by 4th-order one-sided polynomial
// extrapolation from nodes strictly on each side; returns right minus left
// for derivative order n in {0, 1}. The result is a field on the x'-slice.
// Throws DomainError if the stencil leaves the box.
std::vector<Vec> extract_jump(const GridField& u, int order);

} // namespace jumpwave
