#include "jumpwave/source.hpp"

#include <cmath>

namespace jumpwave {

namespace {

std::vector<double> poly_derivative(const std::vector<double>& p) {
    std::vector<double> out;
    for (std::size_t i = 1; i < p.size(); ++i) out.push_back(p[i] * i);
    if (out.empty()) out.push_back(0.0);
    return out;
}

// (x - c) * p(x)
std::vector<double> poly_shift_mul(const std::vector<double>& p, double c) {
    std::vector<double> out(p.size() + 1, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
        out[i + 1] += p[i];
        out[i] -= c * p[i];
    }
    return out;
}

std::vector<double> poly_axpy(const std::vector<double>& a, double s,
                              const std::vector<double>& b) {
    std::vector<double> out(std::max(a.size(), b.size()), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) out[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) out[i] += s * b[i];
    return out;
}

double poly_eval(const std::vector<double>& p, double x) {
    double v = 0.0;
    for (std::size_t i = p.size(); i-- > 0;) v = v * x + p[i];
    return v;
}

} // namespace

PolyGaussian1D::PolyGaussian1D(std::vector<double> poly_coeffs, double center,
                               double width)
    : poly_(std::move(poly_coeffs)), center_(center), width_(width) {
    if (!(width_ > 0.0)) throw InputError("PolyGaussian1D: width must be positive");
    if (poly_.empty()) poly_ = {1.0};
}

double PolyGaussian1D::operator()(double x) const {
    const double u = (x - center_) / width_;
    return poly_eval(poly_, x) * std::exp(-u * u);
}

PolyGaussian1D PolyGaussian1D::derivative() const {
    // d/dx [p e^{-((x-c)/w)^2}] = [p' - (2/w^2)(x-c) p] e^{-((x-c)/w)^2}
    PolyGaussian1D out;
    out.center_ = center_;
    out.width_ = width_;
    out.poly_ = poly_axpy(poly_derivative(poly_), -2.0 / (width_ * width_),
                          poly_shift_mul(poly_, center_));
    return out;
}

double PolyGaussian1D::derivative_at(double x, int n) const {
    PolyGaussian1D g = *this;
    for (int i = 0; i < n; ++i) g = g.derivative();
    return g(x);
}

TimeBump::TimeBump(double T) : T_(T) {
    if (!(T > 0.0)) throw InputError("TimeBump: support length must be positive");
    const int m = 4096;
    const double h = T_ / m;
    double acc = 0.0;
    for (int i = 0; i < m; ++i) {
        double a = i * h, b = (i + 1) * h, c = 0.5 * (a + b);
        acc += (h / 6.0) * ((*this)(a) + 4.0 * (*this)(c) + (*this)(b));
    }
    integral_ = acc;
}

double TimeBump::operator()(double t) const {
    const double s = t / T_;
    if (s <= 0.0 || s >= 1.0) return 0.0;
    return std::exp(4.0 - 1.0 / (s * (1.0 - s)));
}

double TimeBump::integral() const { return integral_; }

SourceModel::SourceModel(int d, int k, TimeBump bump, SourceSide plus,
                         SourceSide minus)
    : d_(d), k_(k), bump_(std::move(bump)), plus_(std::move(plus)),
      minus_(std::move(minus)) {
    for (const SourceSide* s : {&plus_, &minus_}) {
        if (s->amplitude.size() != k_)
            throw InputError("SourceModel: amplitude size != k");
        if (static_cast<int>(s->factors.size()) != d_)
            throw InputError("SourceModel: need one spatial factor per axis");
    }
}

Vec SourceModel::evaluate_side(double t, const RealVec& x, int side) const {
    const SourceSide& s = side > 0 ? plus_ : minus_;
    double spatial = 1.0;
    for (int j = 0; j < d_; ++j) spatial *= s.factors[j](x(j));
    return bump_(t) * spatial * s.amplitude;
}

Vec SourceModel::evaluate(double t, const RealVec& x) const {
    if (x(0) > 0.0) return evaluate_side(t, x, +1);
    if (x(0) < 0.0) return evaluate_side(t, x, -1);
    return 0.5 * (evaluate_side(t, x, +1) + evaluate_side(t, x, -1));
}

Vec SourceModel::jump(int n, double t, double xprime) const {
    return jump_xprime_derivative(n, 0, t, xprime);
}

Vec SourceModel::jump_xprime_derivative(int n, int m, double t,
                                        double xprime) const {
    if (d_ != 2)
        throw InputError("SourceModel::jump: closed-form jumps implemented for d = 2");
    const double b = bump_(t);
    Vec out = Vec::Zero(k_);
    if (b == 0.0) return out;
    out += plus_.amplitude * (plus_.factors[0].derivative_at(0.0, n) *
                              plus_.factors[1].derivative_at(xprime, m));
    out -= minus_.amplitude * (minus_.factors[0].derivative_at(0.0, n) *
                               minus_.factors[1].derivative_at(xprime, m));
    return b * out;
}

SourceModel SourceModel::registered(const std::string& name, int k, double T) {
    TimeBump bump(T);
    auto ones = [&](double scale) {
        Vec v = Vec::Constant(k, Complex(scale, 0.0));
        return v;
    };
    if (name == "gauss_jump") {
        // One-sided Gaussian pulse; jump carried entirely by the plus side.
        SourceSide plus{ones(1.0),
                        {PolyGaussian1D({1.0}, 0.5, 1.5),
                         PolyGaussian1D({1.0}, 0.0, 4.0)}};
        SourceSide minus{ones(0.0),
                         {PolyGaussian1D({1.0}, 0.0, 1.0),
                          PolyGaussian1D({1.0}, 0.0, 1.0)}};
        return SourceModel(2, k, bump, plus, minus);
    }
    if (name == "two_sided") {
        SourceSide plus{ones(1.0),
                        {PolyGaussian1D({1.0}, 0.4, 1.2),
                         PolyGaussian1D({1.0}, 0.0, 3.0)}};
        SourceSide minus{ones(0.6),
                         {PolyGaussian1D({1.0, 0.3}, -0.5, 1.8),
                          PolyGaussian1D({1.0}, 0.5, 3.5)}};
        return SourceModel(2, k, bump, plus, minus);
    }
    if (name == "poly_gauss") {
        SourceSide plus{ones(1.0),
                        {PolyGaussian1D({1.0, 0.5}, 0.3, 1.0),
                         PolyGaussian1D({1.0, 0.0, 0.25}, 0.0, 3.0)}};
        SourceSide minus{ones(0.0),
                         {PolyGaussian1D({1.0}, 0.0, 1.0),
                          PolyGaussian1D({1.0}, 0.0, 1.0)}};
        return SourceModel(2, k, bump, plus, minus);
    }
    throw InputError("SourceModel: unknown registered source '" + name + "'");
}

GridField sample_source(const SourceModel& src, const GridSpec& spec, double t) {
    spec.validate();
    GridField f(spec, src.size(), t);
    if (t <= 0.0 || t >= src.support_end()) return f;
    const std::size_t nn = spec.total_nodes();
    std::vector<int> idx;
    RealVec x(spec.d);
    for (std::size_t i = 0; i < nn; ++i) {
        f.unflatten(i, idx);
        for (int j = 0; j < spec.d; ++j) x(j) = spec.node_coord(j, idx[j]);
        Vec v = src.evaluate(t, x);
        for (int c = 0; c < src.size(); ++c) f.at(i, c) = v(c);
    }
    return f;
}

FlatBranchSource::FlatBranchSource(TimeBump bump, PolyGaussian1D x1_plus,
                                   PolyGaussian1D x1_minus,
                                   PolyGaussian1D transverse)
    : bump_(std::move(bump)), x1p_(std::move(x1_plus)),
      x1m_(std::move(x1_minus)), tr_(std::move(transverse)) {
    if (std::abs(x1p_(0.0) - x1m_(0.0)) > 1e-12)
        throw InputError("FlatBranchSource: potential must be continuous at x1 = 0");
}

Vec FlatBranchSource::evaluate_side(double t, const RealVec& x, int side) const {
    const PolyGaussian1D& p = side > 0 ? x1p_ : x1m_;
    const double b = bump_(t);
    Vec f = Vec::Zero(3);
    // f = (0, d2 psi, -d1 psi) with psi = b(t) p(x1) g(x2)
    f(1) = b * p(x(0)) * tr_.derivative_at(x(1), 1);
    f(2) = -b * p.derivative_at(x(0), 1) * tr_(x(1));
    return f;
}

Vec FlatBranchSource::evaluate(double t, const RealVec& x) const {
    if (x(0) > 0.0) return evaluate_side(t, x, +1);
    if (x(0) < 0.0) return evaluate_side(t, x, -1);
    return 0.5 * (evaluate_side(t, x, +1) + evaluate_side(t, x, -1));
}

GridField FlatBranchSource::sample(const GridSpec& spec, double t) const {
    spec.validate();
    GridField f(spec, 3, t);
    if (t <= 0.0 || t >= bump_.support_end()) return f;
    const std::size_t nn = spec.total_nodes();
    std::vector<int> idx;
    RealVec x(2);
    for (std::size_t i = 0; i < nn; ++i) {
        f.unflatten(i, idx);
        x(0) = spec.node_coord(0, idx[0]);
        x(1) = spec.node_coord(1, idx[1]);
        Vec v = evaluate(t, x);
        for (int c = 0; c < 3; ++c) f.at(i, c) = v(c);
    }
    return f;
}

Vec FlatBranchSource::jump(int n, double t, double xprime) const {
    const double b = bump_(t);
    Vec out = Vec::Zero(3);
    if (b == 0.0) return out;
    const double dp = x1p_.derivative_at(0.0, n) - x1m_.derivative_at(0.0, n);
    const double dp1 = x1p_.derivative_at(0.0, n + 1) - x1m_.derivative_at(0.0, n + 1);
    out(1) = b * dp * tr_.derivative_at(xprime, 1);
    out(2) = -b * dp1 * tr_(xprime);
    return out;
}

} // namespace jumpwave
