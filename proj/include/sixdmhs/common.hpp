// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace sixdmhs {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;
using rvec = std::vector<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSpeedOfLight = 2.99792458e8;

// Thrown when a constraint set admits no solution (exit code 2 at the CLI).
struct InfeasibleError : std::runtime_error {
    explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a detector is fed an all-zero image.
struct NoDetectionError : std::runtime_error {
    explicit NoDetectionError(const std::string& what) : std::runtime_error(what) {}
};

inline double dbm_to_watt(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }
inline double watt_to_dbm(double w) { return 10.0 * std::log10(w / 1e-3); }
inline double db_to_lin(double db) { return std::pow(10.0, db / 10.0); }

inline cplx cdot(const cvec& a, const cvec& b) {
    // sum of conj(a_i) * b_i
    if (a.size() != b.size()) throw std::invalid_argument("cdot: size mismatch");
    cplx s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

inline double norm2sq(const cvec& a) {
    double s = 0.0;
    for (const auto& v : a) s += std::norm(v);
    return s;
}

}  // namespace sixdmhs
