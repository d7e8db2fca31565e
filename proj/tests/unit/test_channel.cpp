// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"
#include "sixdmhs/channel.hpp"
#include "sixdmhs/rhs.hpp"

using namespace sixdmhs;

namespace {

ChannelParams test_params() {
    ChannelParams p;
    p.f_c = 30e9;
    p.rician_k = 10.0;
    p.n_nlos = 3;
    // fixed receiver for deterministic moments
    p.rx_range_min = 10.0;
    p.rx_range_max = 10.0;
    p.rx_height = 2.0;
    p.rx_azimuth_min = 0.3;
    p.rx_azimuth_max = 0.3;
    return p;
}

SurfacePose top_pose() {
    SurfacePose pose;
    pose.position = {0.0, 0.0, 1.0};
    pose.rotation = Mat3::identity();
    pose.slot = 0;
    return pose;
}

}  // namespace

TEST_SUITE_BEGIN("channel");

TEST_CASE("direction_vector basics") {
    Vec3 a = direction_vector(0.0, 0.0);
    CHECK((a - Vec3{1, 0, 0}).norm() < 1e-12);
    Vec3 b = direction_vector(kPi / 2, 0.0);
    CHECK((b - Vec3{0, 1, 0}).norm() < 1e-12);
    Vec3 c = direction_vector(1.234, kPi / 2);
    CHECK((c - Vec3{0, 0, 1}).norm() < 1e-12);
    CHECK(direction_vector(0.7, -0.3).norm() == doctest::Approx(1.0));
}

TEST_CASE("steering normalization and broadside") {
    SurfaceLayout layout;
    layout.m_x = 4;
    layout.m_y = 4;
    layout.spacing = 0.005;
    SurfacePose pose;  // identity at origin, elements in z = 0
    double lam = 0.01;

    cvec a = steering(pose, layout, 0.0, kPi / 2, lam);  // f = [0,0,1]
    for (const auto& v : a) {
        CHECK(v.real() == doctest::Approx(0.25));
        CHECK(std::abs(v.imag()) < 1e-12);
    }
    cvec b = steering(pose, layout, 0.7, 0.2, lam);
    CHECK(std::sqrt(norm2sq(b)) == doctest::Approx(1.0).epsilon(1e-9));

    SurfaceLayout single;
    single.m_x = 1;
    single.m_y = 1;
    single.spacing = 0.005;
    cvec s = steering(pose, single, 0.4, 0.1, lam);
    CHECK(s.size() == 1);
    CHECK(std::abs(s[0] - cplx{1.0, 0.0}) < 1e-9);
}

TEST_CASE("rician limit suppresses NLoS") {
    ChannelParams p = test_params();
    p.rician_k = 1e9;
    auto ch = draw_channel(p, 1, {top_pose()}, 99);
    double los = 0.0, nlos_max = 0.0;
    for (size_t i = 0; i < ch.paths[0][0].size(); ++i) {
        double g = std::abs(ch.paths[0][0][i].gain);
        if (ch.paths[0][0][i].is_los)
            los = g;
        else
            nlos_max = std::max(nlos_max, g);
    }
    CHECK(los > 0.0);
    CHECK(nlos_max < 1e-4 * los);
}

TEST_CASE("channel power matches the analytic moment") {
    // Monte-Carlo check of E||h||^2 = M ((K/(K+1)) + n_nlos/(K+1)) Omega with
    // every path unmasked (surface straight above the origin).
    ChannelParams p = test_params();
    SurfaceLayout layout;
    layout.m_x = 4;
    layout.m_y = 4;
    layout.spacing = 0.005;
    SurfacePose pose = top_pose();
    double acc = 0.0;
    int n_draws = 10000;
    double omega = 0.0;
    for (int i = 0; i < n_draws; ++i) {
        auto ch = draw_channel(p, 1, {pose}, 1000 + i);
        acc += norm2sq(channel_vector(ch, 0, 0, pose, layout));
        omega = ch.path_loss[0][0];
    }
    double m = layout.elements();
    double expected =
        m * omega * (p.rician_k / (p.rician_k + 1.0) + p.n_nlos / (p.rician_k + 1.0));
    CHECK(acc / n_draws == doctest::Approx(expected).epsilon(0.05));
}

TEST_CASE("masked receiver sees a zero channel") {
    ChannelParams p = test_params();
    p.n_nlos = 0;
    SurfacePose behind;
    behind.position = {-1.0, 0.0, -0.3};  // q . f_los < 0 for the +x receiver
    behind.rotation = Mat3::identity();
    SurfaceLayout layout;
    layout.m_x = 2;
    layout.m_y = 2;
    layout.spacing = 0.005;
    auto ch = draw_channel(p, 1, {behind}, 5);
    CHECK(ch.mask[0][0][0] == 0);
    CHECK(norm2sq(channel_vector(ch, 0, 0, behind, layout)) == doctest::Approx(0.0));
}

TEST_CASE("path loss halves by 6.02 dB when distance doubles") {
    ChannelParams p = test_params();
    SurfacePose origin_pose;
    origin_pose.position = {0, 0, 0};
    p.rx_range_min = p.rx_range_max = 10.0;
    p.rx_height = 0.0;
    auto near = draw_channel(p, 1, {origin_pose}, 1);
    p.rx_range_min = p.rx_range_max = 20.0;
    auto far = draw_channel(p, 1, {origin_pose}, 1);
    double ratio_db = 10.0 * std::log10(near.path_loss[0][0] / far.path_loss[0][0]);
    CHECK(ratio_db == doctest::Approx(6.0206).epsilon(1e-4));
}

TEST_CASE("mask predicate consistency") {
    ChannelParams p = test_params();
    auto ch = draw_channel(p, 2, {top_pose(), top_pose()}, 17);
    SurfacePose pose = top_pose();
    for (int k = 0; k < 2; ++k)
        for (size_t i = 0; i < ch.paths[k][0].size(); ++i) {
            Vec3 f = direction_vector(ch.paths[k][0][i].theta, ch.paths[k][0][i].phi);
            CHECK(static_cast<bool>(ch.mask[k][0][i]) ==
                  mask_predicate(pose, f, MaskMode::Position));
        }
}

TEST_CASE("seed determinism") {
    ChannelParams p = test_params();
    p.rx_range_min = 5.0;
    p.rx_range_max = 25.0;
    p.rx_azimuth_min = -kPi;
    p.rx_azimuth_max = kPi;
    auto a = draw_channel(p, 3, {top_pose(), top_pose(), top_pose()}, 1234);
    auto b = draw_channel(p, 3, {top_pose(), top_pose(), top_pose()}, 1234);
    for (int k = 0; k < 3; ++k)
        for (int s = 0; s < 3; ++s)
            for (size_t i = 0; i < a.paths[k][s].size(); ++i) {
                CHECK(a.paths[k][s][i].gain == b.paths[k][s][i].gain);
                CHECK(a.paths[k][s][i].theta == b.paths[k][s][i].theta);
            }
}

TEST_CASE("equivalent channel matches the direct form") {
    ChannelParams p = test_params();
    SurfaceLayout layout;
    layout.m_x = 4;
    layout.m_y = 4;
    layout.spacing = 0.005;
    layout.feeds = {{0.005, 0.01, 0.0}, {0.01, 0.005, 0.0}};
    RhsParams rp{0.8, 3.0, 30e9};
    EmResponse em = em_response(layout, rp);
    SurfacePose pose = top_pose();
    auto ch = draw_channel(p, 1, {pose}, 21);

    rvec psi(layout.elements());
    Rng rng(3);
    for (auto& v : psi) v = rng.uniform();

    cvec hbar = equivalent_channel(ch, 0, 0, pose, layout, psi, em.data, em.q);

    SUBCASE("zero psi gives a zero vector") {
        rvec zero(layout.elements(), 0.0);
        cvec z = equivalent_channel(ch, 0, 0, pose, layout, zero, em.data, em.q);
        CHECK(std::sqrt(norm2sq(z)) == doctest::Approx(0.0));
    }

    SUBCASE("dimension mismatch throws") {
        rvec bad(3, 0.5);
        CHECK_THROWS_AS(equivalent_channel(ch, 0, 0, pose, layout, bad, em.data, em.q),
                        std::invalid_argument);
    }

    SUBCASE("receive signal identity") {
        // y through hbar X equals y through h^T diag(Psi) Theta X
        cvec x(em.q);
        for (auto& v : x) v = rng.cnormal(1.0);
        cplx via_hbar = 0.0;
        for (int q = 0; q < em.q; ++q) via_hbar += hbar[q] * x[q];
        cvec h = channel_vector(ch, 0, 0, pose, layout);
        cplx via_full = 0.0;
        for (int q = 0; q < em.q; ++q) {
            cplx s = 0.0;
            for (int i = 0; i < em.m; ++i) s += h[i] * psi[i] * em.data[i * em.q + q];
            via_full += s * x[q];
        }
        CHECK(std::abs(via_hbar - via_full) < 1e-10 * std::max(1.0, std::abs(via_full)));
    }

    SUBCASE("single LoS path expands directly") {
        ChannelParams p1 = p;
        p1.n_nlos = 0;
        auto ch1 = draw_channel(p1, 1, {pose}, 8);
        cvec hb = equivalent_channel(ch1, 0, 0, pose, layout, psi, em.data, em.q);
        const auto& path = ch1.paths[0][0][0];
        cvec a = steering(pose, layout, path.theta, path.phi, ch1.wavelength);
        double sqrt_m = std::sqrt(static_cast<double>(em.m));
        for (int q = 0; q < em.q; ++q) {
            cplx direct = 0.0;
            for (int i = 0; i < em.m; ++i)
                direct += sqrt_m * path.gain * a[i] * psi[i] * em.data[i * em.q + q];
            CHECK(std::abs(hb[q] - direct) < 1e-12);
        }
    }
}

TEST_SUITE_END();
