// hyperbolic_system.hpp — first-order constant-coefficient systems
//
//   d/dt + sum_j A_j d/dx_j,   symbol  A(xi) = sum_j A_j xi_j.
//
// Systems are defined by the spatial dimension d, the state size k, and the
// d coefficient matrices. A `symmetric` flag asserts that every A_j is
// Hermitian (checked to 1e-12 on construction), which guarantees strong
// hyperbolicity.

#pragma once

#include <string>
#include <vector>

#include "jumpwave/errors.hpp"
#include "jumpwave/linalg.hpp"

namespace jumpwave {

struct HyperbolicSystem {
    int d = 0;                // spatial dimension, >= 2
    int k = 0;                // system size, >= 1
    std::vector<Mat> A;       // d matrices, each k x k
    bool symmetric = false;

    // Throws InputError on dimension mismatch or a failed Hermitian check.
    void validate() const;

    // Structured text definition (JSON): fields d, k, symmetric, and A as a
    // list of d row-major matrices of [re, im] pairs. See README for the
    // schema.
    static HyperbolicSystem load(const std::string& path);
    void save(const std::string& path) const;

    static HyperbolicSystem from_json_text(const std::string& text);
    std::string to_json_text() const;
};

// A(xi) = sum_j A_j xi_j. Throws InputError if xi.size() != d or not finite.
Mat assemble_symbol(const HyperbolicSystem& sys, const RealVec& xi);

// Canonical desk-scale systems used across tests and experiments.
// s1: d=2, k=2, A1=[[0,0],[0,1]], A2=[[0,1],[1,0]]  (curved sheet, v=0)
// s2: d=2, k=3 acoustics-type, flat sheet through (1,0)
// s3: d=2, k=2 variant of s1 with tangential group velocity v=(0,1)
HyperbolicSystem example_system_s1();
HyperbolicSystem example_system_s2();
HyperbolicSystem example_system_s3();

} // namespace jumpwave
