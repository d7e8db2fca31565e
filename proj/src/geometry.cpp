// SPDX-License-Identifier: Apache-2.0
#include "sixdmhs/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace sixdmhs {

double Mat3::orthonormality_error() const {
    double err = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += (*this)(k, i) * (*this)(k, j);
            err = std::max(err, std::abs(s - (i == j ? 1.0 : 0.0)));
        }
    return err;
}

Mat3 rodrigues(const Vec3& v, double alpha) {
    if (std::abs(v.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("rodrigues: axis must be a unit vector");
    double c = std::cos(alpha), s = std::sin(alpha);
    Mat3 r;
    // cos(a) I + (1 - cos(a)) v v^T + sin(a) V
    r(0, 0) = c + (1 - c) * v.x * v.x;
    r(0, 1) = (1 - c) * v.x * v.y - s * v.z;
    r(0, 2) = (1 - c) * v.x * v.z + s * v.y;
    r(1, 0) = (1 - c) * v.y * v.x + s * v.z;
    r(1, 1) = c + (1 - c) * v.y * v.y;
    r(1, 2) = (1 - c) * v.y * v.z - s * v.x;
    r(2, 0) = (1 - c) * v.z * v.x - s * v.y;
    r(2, 1) = (1 - c) * v.z * v.y + s * v.x;
    r(2, 2) = c + (1 - c) * v.z * v.z;
    return r;
}

Mat3 rotation_between(const Vec3& u_local, const Vec3& u_global) {
    if (std::abs(u_local.norm() - 1.0) > 1e-9 || std::abs(u_global.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("rotation_between: inputs must be unit vectors");
    Vec3 cr = u_local.cross(u_global);
    double cn = cr.norm();
    double d = std::clamp(u_local.dot(u_global), -1.0, 1.0);
    if (cn < 1e-6) {
        if (d > 0.0) return Mat3::identity();
        // Antiparallel: half-turn about the axis orthogonal to u_local that
        // maximizes |axis . e1|.
        Vec3 e1{1.0, 0.0, 0.0};
        Vec3 w = e1 - u_local * e1.dot(u_local);
        if (w.norm() < 1e-6) {
            Vec3 e2{0.0, 1.0, 0.0};
            w = e2 - u_local * e2.dot(u_local);
        }
        return rodrigues(w.normalized(), kPi);
    }
    return rodrigues(cr * (1.0 / cn), std::acos(d));
}

Vec3 element_coords(const SurfacePose& pose, const SurfaceLayout& layout, int ix, int iy) {
    if (ix < 0 || ix >= layout.m_x || iy < 0 || iy >= layout.m_y)
        throw std::invalid_argument("element_coords: index out of range");
    return pose.position + pose.rotation.apply(layout.local_element(ix, iy));
}

std::vector<Vec3> fibonacci_sphere_slots(int count, double radius, double z_min, double z_max) {
    if (count < 1) throw std::invalid_argument("fibonacci_sphere_slots: count must be >= 1");
    std::vector<Vec3> slots;
    slots.reserve(count);
    const double golden_angle = kPi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
        double z = z_max - (i + 0.5) * (z_max - z_min) / count;
        double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        double az = golden_angle * i;
        slots.push_back(Vec3{r * std::cos(az), r * std::sin(az), z} * radius);
    }
    return slots;
}

FeasibilityReport check_feasible(const std::vector<SurfacePose>& poses,
                                 const std::vector<Vec3>& normals, double d_min) {
    if (poses.size() != normals.size())
        throw std::invalid_argument("check_feasible: one normal per pose required");
    FeasibilityReport report;
    const int n = static_cast<int>(poses.size());
    const double eps = 1e-12;
    for (int b1 = 0; b1 < n; ++b1) {
        // blockage: n_b . q_b >= 0
        double bl = normals[b1].dot(poses[b1].position);
        if (bl < -eps)
            report.violations.push_back({FeasibilityViolation::Kind::Blockage, b1, -1, bl});
        for (int b2 = 0; b2 < n; ++b2) {
            if (b1 == b2) continue;
            // reflection: no other surface center in front of b1's plane
            double rf = normals[b1].dot(poses[b2].position - poses[b1].position);
            if (rf > eps)
                report.violations.push_back({FeasibilityViolation::Kind::Reflection, b1, b2, rf});
            if (b2 > b1) {
                double dist = (poses[b1].position - poses[b2].position).norm();
                if (dist < d_min - eps)
                    report.violations.push_back(
                        {FeasibilityViolation::Kind::Collision, b1, b2, dist});
                if (poses[b1].slot >= 0 && poses[b1].slot == poses[b2].slot)
                    report.violations.push_back({FeasibilityViolation::Kind::SharedSlot, b1, b2,
                                                 static_cast<double>(poses[b1].slot)});
            }
        }
    }
    return report;
}

}  // namespace sixdmhs
