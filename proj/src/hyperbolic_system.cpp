#include "jumpwave/hyperbolic_system.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace jumpwave {

using nlohmann::json;

void HyperbolicSystem::validate() const {
    if (d < 2) throw InputError("system: spatial dimension d must be >= 2");
    if (k < 1) throw InputError("system: size k must be >= 1");
    if (static_cast<int>(A.size()) != d)
        throw InputError("system: expected " + std::to_string(d) +
                         " coefficient matrices, got " + std::to_string(A.size()));
    for (int j = 0; j < d; ++j) {
        if (A[j].rows() != k || A[j].cols() != k)
            throw InputError("system: A[" + std::to_string(j) + "] is not " +
                             std::to_string(k) + "x" + std::to_string(k));
        if (!A[j].allFinite())
            throw InputError("system: A[" + std::to_string(j) + "] has non-finite entries");
        if (symmetric) {
            double defect = (A[j] - A[j].adjoint()).cwiseAbs().maxCoeff();
            double scale = std::max(1.0, A[j].cwiseAbs().maxCoeff());
            if (defect > 1e-12 * scale)
                throw InputError("system: flagged symmetric but A[" +
                                 std::to_string(j) + "] deviates from Hermitian by " +
                                 std::to_string(defect));
        }
    }
}

Mat assemble_symbol(const HyperbolicSystem& sys, const RealVec& xi) {
    if (xi.size() != sys.d)
        throw InputError("assemble_symbol: xi has dimension " +
                         std::to_string(xi.size()) + ", system has d = " +
                         std::to_string(sys.d));
    if (!xi.allFinite()) throw InputError("assemble_symbol: xi not finite");
    Mat m = Mat::Zero(sys.k, sys.k);
    for (int j = 0; j < sys.d; ++j) m += xi(j) * sys.A[j];
    return m;
}

namespace {

json matrix_to_json(const Mat& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            rows.push_back({m(i, j).real(), m(i, j).imag()});
    return rows;
}

Mat matrix_from_json(const json& entries, int k, const std::string& what) {
    if (!entries.is_array() || static_cast<int>(entries.size()) != k * k)
        throw InputError("system file: " + what + " must hold " +
                         std::to_string(k * k) + " [re, im] pairs");
    Mat m(k, k);
    int idx = 0;
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j, ++idx) {
            const json& e = entries[idx];
            if (!e.is_array() || e.size() != 2)
                throw InputError("system file: entry " + std::to_string(idx) +
                                 " of " + what + " is not a [re, im] pair");
            m(i, j) = Complex(e[0].get<double>(), e[1].get<double>());
        }
    return m;
}

} // namespace

HyperbolicSystem HyperbolicSystem::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("system file: JSON parse error: ") + e.what());
    }
    HyperbolicSystem sys;
    for (const char* field : {"d", "k", "A"})
        if (!j.contains(field))
            throw InputError(std::string("system file: missing field '") + field + "'");
    sys.d = j["d"].get<int>();
    sys.k = j["k"].get<int>();
    sys.symmetric = j.value("symmetric", false);
    if (!j["A"].is_array() || static_cast<int>(j["A"].size()) != sys.d)
        throw InputError("system file: A must list d matrices");
    for (int m = 0; m < sys.d; ++m)
        sys.A.push_back(matrix_from_json(j["A"][m], sys.k, "A[" + std::to_string(m) + "]"));
    sys.validate();
    return sys;
}

std::string HyperbolicSystem::to_json_text() const {
    json j;
    j["d"] = d;
    j["k"] = k;
    j["symmetric"] = symmetric;
    json mats = json::array();
    for (const auto& m : A) mats.push_back(matrix_to_json(m));
    j["A"] = mats;
    return j.dump(2);
}

HyperbolicSystem HyperbolicSystem::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("system file: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

void HyperbolicSystem::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw InputError("system file: cannot write " + path);
    out << to_json_text() << "\n";
}

HyperbolicSystem example_system_s1() {
    HyperbolicSystem sys;
    sys.d = 2;
    sys.k = 2;
    sys.symmetric = true;
    Mat a1 = Mat::Zero(2, 2), a2 = Mat::Zero(2, 2);
    a1(1, 1) = 1.0;
    a2(0, 1) = 1.0;
    a2(1, 0) = 1.0;
    sys.A = {a1, a2};
    sys.validate();
    return sys;
}

HyperbolicSystem example_system_s2() {
    HyperbolicSystem sys;
    sys.d = 2;
    sys.k = 3;
    sys.symmetric = true;
    Mat a1 = Mat::Zero(3, 3), a2 = Mat::Zero(3, 3);
    a1(0, 1) = 1.0;
    a1(1, 0) = 1.0;
    a2(0, 2) = 1.0;
    a2(2, 0) = 1.0;
    sys.A = {a1, a2};
    sys.validate();
    return sys;
}

HyperbolicSystem example_system_s3() {
    HyperbolicSystem sys;
    sys.d = 2;
    sys.k = 2;
    sys.symmetric = true;
    Mat a1 = Mat::Zero(2, 2), a2 = Mat::Zero(2, 2);
    a1(1, 1) = 1.0;
    a2(0, 0) = 1.0;
    a2(0, 1) = 1.0;
    a2(1, 0) = 1.0;
    sys.A = {a1, a2};
    sys.validate();
    return sys;
}

} // namespace jumpwave
