// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "sixdmhs/common.hpp"

namespace sixdmhs {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3() = default;
    Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const { return std::sqrt(dot(*this)); }
    Vec3 normalized() const {
        double n = norm();
        if (n == 0.0) return *this;
        return {x / n, y / n, z / n};
    }
};

struct Mat3 {
    // row-major
    std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

    static Mat3 identity() { return Mat3{}; }

    double operator()(int r, int c) const { return m[3 * r + c]; }
    double& operator()(int r, int c) { return m[3 * r + c]; }

    Vec3 apply(const Vec3& v) const {
        return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
                m[3] * v.x + m[4] * v.y + m[5] * v.z,
                m[6] * v.x + m[7] * v.y + m[8] * v.z};
    }

    // R^T v (inverse rotation for orthonormal R)
    Vec3 apply_transpose(const Vec3& v) const {
        return {m[0] * v.x + m[3] * v.y + m[6] * v.z,
                m[1] * v.x + m[4] * v.y + m[7] * v.z,
                m[2] * v.x + m[5] * v.y + m[8] * v.z};
    }

    Mat3 mul(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double s = 0.0;
                for (int k = 0; k < 3; ++k) s += (*this)(i, k) * o(k, j);
                r(i, j) = s;
            }
        return r;
    }

    double det() const {
        return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
               m[2] * (m[3] * m[7] - m[4] * m[6]);
    }

    // max abs deviation of R^T R from the identity
    double orthonormality_error() const;
};

// Rotation by `alpha` about the unit axis `v` (Rodrigues form).
Mat3 rodrigues(const Vec3& v, double alpha);

// Rotation taking the unit vector `u_local` onto the unit vector `u_global`.
// Antiparallel inputs fall back to a half-turn about a deterministic axis
// orthogonal to u_local (the one maximizing |axis . e1|).
Mat3 rotation_between(const Vec3& u_local, const Vec3& u_global);

struct SurfaceLayout {
    int m_x = 1;
    int m_y = 1;
    double spacing = 0.0;              // element pitch d [m]
    std::vector<Vec3> feeds;           // feed positions, local frame

    int elements() const { return m_x * m_y; }
    Vec3 local_element(int ix, int iy) const {
        return {ix * spacing, iy * spacing, 0.0};
    }
};

struct SurfacePose {
    Mat3 rotation;
    Vec3 position;                     // surface center q_b, global frame
    int slot = -1;                     // slot index, -1 when off the table

    Vec3 normal() const { return rotation.apply({0.0, 0.0, 1.0}); }
};

// Global coordinates of element (m_x, m_y): q_b + R_b [m_x d, m_y d, 0]^T.
Vec3 element_coords(const SurfacePose& pose, const SurfaceLayout& layout, int ix, int iy);

// Discrete translation slots on a sphere (Fibonacci lattice on a z-cap).
std::vector<Vec3> fibonacci_sphere_slots(int count, double radius,
                                         double z_min = -1.0, double z_max = 1.0);

struct FeasibilityViolation {
    enum class Kind { Reflection, Blockage, Collision, SharedSlot };
    Kind kind;
    int b1 = -1;
    int b2 = -1;
    double value = 0.0;
};

struct FeasibilityReport {
    std::vector<FeasibilityViolation> violations;
    bool ok() const { return violations.empty(); }
};

// Checks the three orientation constraints plus slot uniqueness:
//   reflection: n_b . (q_b' - q_b) <= 0 for all b' != b
//   blockage:   n_b . q_b >= 0
//   collision:  |q_b - q_b'| >= d_min
FeasibilityReport check_feasible(const std::vector<SurfacePose>& poses,
                                 const std::vector<Vec3>& normals, double d_min);

inline FeasibilityReport check_feasible(const std::vector<SurfacePose>& poses, double d_min) {
    std::vector<Vec3> normals;
    normals.reserve(poses.size());
    for (const auto& p : poses) normals.push_back(p.normal());
    return check_feasible(poses, normals, d_min);
}

}  // namespace sixdmhs
