// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"
#include "sixdmhs/geometry.hpp"
#include "sixdmhs/rng.hpp"

using namespace sixdmhs;

namespace {

Vec3 random_unit(Rng& rng) {
    Vec3 v{rng.normal(), rng.normal(), rng.normal()};
    while (v.norm() < 1e-6) v = {rng.normal(), rng.normal(), rng.normal()};
    return v.normalized();
}

}  // namespace

TEST_SUITE_BEGIN("geometry");

TEST_CASE("rodrigues basic rotations") {
    Mat3 id = rodrigues({0, 0, 1}, 0.0);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) CHECK(id(r, c) == doctest::Approx(r == c ? 1.0 : 0.0));

    Mat3 half_x = rodrigues({1, 0, 0}, kPi);
    CHECK(half_x(0, 0) == doctest::Approx(1.0));
    CHECK(half_x(1, 1) == doctest::Approx(-1.0));
    CHECK(half_x(2, 2) == doctest::Approx(-1.0));
    CHECK(std::abs(half_x(0, 1)) < 1e-12);

    Vec3 rotated = rodrigues({0, 0, 1}, kPi / 2).apply({1, 0, 0});
    CHECK(rotated.x == doctest::Approx(0.0));
    CHECK(rotated.y == doctest::Approx(1.0));
    CHECK(rotated.z == doctest::Approx(0.0));
}

TEST_CASE("rodrigues rejects non-unit axis") {
    CHECK_THROWS_AS(rodrigues({1.0, 1.0, 0.0}, 0.3), std::invalid_argument);
}

TEST_CASE("rodrigues orthonormality over random draws") {
    Rng rng(42);
    for (int i = 0; i < 1000; ++i) {
        Mat3 r = rodrigues(random_unit(rng), rng.uniform(-kPi, kPi));
        CHECK(r.orthonormality_error() < 1e-9);
        CHECK(std::abs(r.det() - 1.0) < 1e-9);
    }
}

TEST_CASE("rotation_between aligns vectors") {
    Mat3 id = rotation_between({0, 0, 1}, {0, 0, 1});
    CHECK(id.orthonormality_error() < 1e-12);
    CHECK(id(0, 0) == doctest::Approx(1.0));

    Mat3 r = rotation_between({0, 0, 1}, {1, 0, 0});
    Vec3 mapped = r.apply({0, 0, 1});
    CHECK((mapped - Vec3{1, 0, 0}).norm() < 1e-8);
}

TEST_CASE("rotation_between antiparallel fallback") {
    Mat3 r = rotation_between({0, 0, 1}, {0, 0, -1});
    Vec3 mapped = r.apply({0, 0, 1});
    CHECK((mapped - Vec3{0, 0, -1}).norm() < 1e-8);
    CHECK(std::abs(r.det() - 1.0) < 1e-9);
    // axis orthogonal to z maximizing |axis . e1| is e1 itself
    Vec3 e1_mapped = r.apply({1, 0, 0});
    CHECK((e1_mapped - Vec3{1, 0, 0}).norm() < 1e-8);
}

TEST_CASE("rotation_between random pairs") {
    Rng rng(7);
    int done = 0;
    while (done < 1000) {
        Vec3 u = random_unit(rng), w = random_unit(rng);
        if (u.cross(w).norm() < 1e-6) continue;
        Mat3 r = rotation_between(u, w);
        CHECK((r.apply(u) - w).norm() < 1e-8);
        ++done;
    }
}

TEST_CASE("element_coords identity pose") {
    SurfaceLayout layout;
    layout.m_x = 4;
    layout.m_y = 4;
    layout.spacing = 0.005;
    SurfacePose pose;  // identity at origin
    Vec3 r = element_coords(pose, layout, 2, 3);
    CHECK(r.x == doctest::Approx(0.010));
    CHECK(r.y == doctest::Approx(0.015));
    CHECK(r.z == doctest::Approx(0.0));
    Vec3 origin = element_coords(pose, layout, 0, 0);
    CHECK(origin.norm() == doctest::Approx(0.0));
    // exact local-grid reproduction
    for (int ix = 0; ix < layout.m_x; ++ix)
        for (int iy = 0; iy < layout.m_y; ++iy) {
            Vec3 c = element_coords(pose, layout, ix, iy);
            CHECK(c.x == ix * layout.spacing);
            CHECK(c.y == iy * layout.spacing);
            CHECK(c.z == 0.0);
        }
}

TEST_CASE("element_coords rotated pose and bounds") {
    SurfaceLayout layout;
    layout.m_x = 2;
    layout.m_y = 2;
    layout.spacing = 1.0;
    SurfacePose pose;
    pose.rotation = rodrigues({0, 0, 1}, kPi / 2);
    Vec3 r = element_coords(pose, layout, 1, 0);
    CHECK(r.x == doctest::Approx(0.0));
    CHECK(r.y == doctest::Approx(1.0));
    CHECK_THROWS_AS(element_coords(pose, layout, 2, 0), std::invalid_argument);
    CHECK_THROWS_AS(element_coords(pose, layout, 0, -1), std::invalid_argument);
}

TEST_CASE("check_feasible collision and blockage") {
    SurfacePose a, b;
    a.position = {1, 0, 0};
    b.position = {1, 0, 0};
    a.rotation = rotation_between({0, 0, 1}, {1, 0, 0});
    b.rotation = a.rotation;
    auto report = check_feasible({a, b}, 0.1);
    bool has_collision = false;
    for (const auto& v : report.violations)
        if (v.kind == FeasibilityViolation::Kind::Collision) has_collision = true;
    CHECK(has_collision);

    // single surface with outward radial normal is feasible
    auto single = check_feasible({a}, 0.1);
    CHECK(single.ok());
}

TEST_CASE("check_feasible sphere with radial normals") {
    // direct evaluation of the three constraints over all pairs
    auto slots = fibonacci_sphere_slots(6, 1.0);
    std::vector<SurfacePose> poses;
    for (size_t i = 0; i < slots.size(); ++i) {
        SurfacePose p;
        p.position = slots[i];
        p.slot = static_cast<int>(i);
        p.rotation = rotation_between({0, 0, 1}, slots[i].normalized());
        poses.push_back(p);
    }
    auto report = check_feasible(poses, 0.1);
    CHECK(report.ok());
}

TEST_CASE("check_feasible is symmetric under permutation") {
    Rng rng(3);
    auto slots = fibonacci_sphere_slots(8, 1.0);
    std::vector<SurfacePose> poses;
    for (int i = 0; i < 4; ++i) {
        SurfacePose p;
        p.position = slots[i * 2];
        p.rotation = rodrigues(random_unit(rng), rng.uniform(-kPi, kPi));
        poses.push_back(p);
    }
    auto verdict = check_feasible(poses, 0.5).ok();
    std::vector<SurfacePose> permuted{poses[2], poses[0], poses[3], poses[1]};
    CHECK(check_feasible(permuted, 0.5).ok() == verdict);
    CHECK(check_feasible(poses, 0.5).violations.size() ==
          check_feasible(permuted, 0.5).violations.size());
}

TEST_CASE("shared slots are flagged") {
    SurfacePose a, b;
    a.position = {0, 0, 1};
    b.position = {0, 1, 0};
    a.slot = 3;
    b.slot = 3;
    a.rotation = rotation_between({0, 0, 1}, a.position.normalized());
    b.rotation = rotation_between({0, 0, 1}, b.position.normalized());
    auto report = check_feasible({a, b}, 0.1);
    bool shared = false;
    for (const auto& v : report.violations)
        if (v.kind == FeasibilityViolation::Kind::SharedSlot) shared = true;
    CHECK(shared);
}

TEST_SUITE_END();
