#include "jumpwave/fit.hpp"

#include <cmath>

namespace jumpwave {

void one_sided_extrapolate(const std::vector<Vec>& vals, double h, Vec& value0,
                           Vec& deriv0) {
    const int p = static_cast<int>(vals.size());
    if (p < 2) throw InputError("one_sided_extrapolate: need at least 2 samples");
    RealMat vander(p, p);
    for (int i = 0; i < p; ++i) {
        double x = i + 1;   // in units of h
        double pw = 1.0;
        for (int j = 0; j < p; ++j) {
            vander(i, j) = pw;
            pw *= x;
        }
    }
    Eigen::PartialPivLU<RealMat> lu(vander);
    const int k = static_cast<int>(vals[0].size());
    value0 = Vec::Zero(k);
    deriv0 = Vec::Zero(k);
    RealVec rhs_re(p), rhs_im(p);
    for (int c = 0; c < k; ++c) {
        for (int i = 0; i < p; ++i) {
            rhs_re(i) = vals[i](c).real();
            rhs_im(i) = vals[i](c).imag();
        }
        RealVec cr = lu.solve(rhs_re), ci = lu.solve(rhs_im);
        value0(c) = Complex(cr(0), ci(0));
        deriv0(c) = Complex(cr(1) / h, ci(1) / h);
    }
}

LinearFit linear_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
    const std::size_t n = xs.size();
    if (n < 2 || ys.size() != n) throw InputError("linear_fit: need matching samples, >= 2");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double det = n * sxx - sx * sx;
    LinearFit fit;
    fit.slope = (n * sxy - sx * sy) / det;
    fit.intercept = (sy - fit.slope * sx) / n;
    double res = 0, var = 0;
    const double mean = sy / n;
    for (std::size_t i = 0; i < n; ++i) {
        double e = ys[i] - (fit.intercept + fit.slope * xs[i]);
        res += e * e;
        var += (ys[i] - mean) * (ys[i] - mean);
    }
    fit.rel_residual = var > 0 ? std::sqrt(res / var) : std::sqrt(res / n);
    return fit;
}

} // namespace jumpwave
