// linalg.hpp — shared dense linear algebra aliases and small helpers.

#pragma once

#include <Eigen/Dense>
#include <complex>

namespace jumpwave {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RealMat = Eigen::MatrixXd;
using RealVec = Eigen::VectorXd;

// Largest singular value (operator 2-norm).
inline double operator_norm(const Mat& m) {
    return m.jacobiSvd().singularValues()(0);
}

inline Mat identity(int k) { return Mat::Identity(k, k); }

} // namespace jumpwave
