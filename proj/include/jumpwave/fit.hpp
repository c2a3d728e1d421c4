// fit.hpp — small fitting utilities: one-sided polynomial extrapolation to
// a boundary point and least-squares line fits for slope/decay estimates.

#pragma once

#include <vector>

#include "jumpwave/errors.hpp"
#include "jumpwave/linalg.hpp"

namespace jumpwave {

// Given samples at x = h, 2h, ..., p*h (h may be negative for the left
// side), fits the degree p-1 polynomial and returns its value and first
// derivative at x = 0.
void one_sided_extrapolate(const std::vector<Vec>& vals, double h, Vec& value0,
                           Vec& deriv0);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rel_residual = 0.0;   // rms residual / rms centered data
};

LinearFit linear_fit(const std::vector<double>& xs, const std::vector<double>& ys);

} // namespace jumpwave
