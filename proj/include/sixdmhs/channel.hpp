// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "sixdmhs/geometry.hpp"
#include "sixdmhs/rng.hpp"

namespace sixdmhs {

// f(theta, phi) = [cos(t)cos(p), sin(t)cos(p), sin(p)]
Vec3 direction_vector(double theta, double phi);

struct Angles {
    double theta = 0.0;
    double phi = 0.0;
};
Angles angles_of(const Vec3& f);

enum class MaskMode : uint8_t {
    Position,  // q_b . f > 0 (literal form)
    Normal,    // n_b . f > 0
};

struct ChannelParams {
    double f_c = 30e9;              // carrier [Hz]
    double rician_k = 10.0;         // linear Rician factor
    int n_nlos = 3;                 // scatterer count
    double pathloss_exponent = 2.0; // free-space at 2
    MaskMode mask_mode = MaskMode::Position;
    // receiver placement: uniform over an annulus sector at fixed height
    double rx_range_min = 5.0;
    double rx_range_max = 25.0;
    double rx_height = 3.0;
    double rx_azimuth_min = -kPi;
    double rx_azimuth_max = kPi;

    double wavelength() const { return kSpeedOfLight / f_c; }
};

// One propagation path; `gain` is eta (Rician scaling and path loss folded in).
struct PathComponent {
    double theta = 0.0;
    double phi = 0.0;
    cplx gain;
    bool is_los = false;
};

// Pose-independent draw: receiver positions, path angles and the unit-variance
// NLoS fading. Masks and path losses depend on surface poses and are applied
// by realize().
struct ChannelScene {
    ChannelParams params;
    int n_rx = 0;
    int n_surfaces = 0;
    std::vector<Vec3> rx_positions;
    std::vector<std::vector<Angles>> path_angles;       // [k][iota], iota 0 = LoS
    std::vector<std::vector<cvec>> kappa;               // [k][iota-1][b] ~ CN(0,1)
};

struct ChannelRealization {
    double wavelength = 0.0;
    int n_rx = 0;
    int n_surfaces = 0;
    std::vector<Vec3> rx_positions;
    std::vector<std::vector<std::vector<PathComponent>>> paths;  // [k][b][iota]
    std::vector<std::vector<std::vector<uint8_t>>> mask;         // [k][b][iota]
    std::vector<std::vector<double>> path_loss;                  // [k][b]
};

ChannelScene draw_scene(const ChannelParams& params, int n_rx, int n_surfaces, Rng& rng);

bool mask_predicate(const SurfacePose& pose, const Vec3& f, MaskMode mode);

// Per-(receiver, surface) Rician multipath for the given poses.
ChannelRealization realize(const ChannelScene& scene, const std::vector<SurfacePose>& poses);

// draw_scene + realize with an explicit seed.
ChannelRealization draw_channel(const ChannelParams& params, int n_rx,
                                const std::vector<SurfacePose>& poses, uint64_t seed);

// Steering vector a_b(theta, phi); entry (m_x M_y + m_y) =
// exp(j 2 pi / lambda f^T r_{b,m_x,m_y}) / sqrt(M).
cvec steering(const SurfacePose& pose, const SurfaceLayout& layout, double theta, double phi,
              double wavelength);

// h_{k,b} = sqrt(M) sum_iota Lambda eta a_b(theta, phi)  (length M)
cvec channel_vector(const ChannelRealization& ch, int k, int b, const SurfacePose& pose,
                    const SurfaceLayout& layout);

// hbar_{k,b} = sqrt(M) sum_iota Lambda eta a_b^T diag(Psi) Theta_b  (length Q)
cvec equivalent_channel(const ChannelRealization& ch, int k, int b, const SurfacePose& pose,
                        const SurfaceLayout& layout, const rvec& psi, const cvec& em_response,
                        int n_feeds);

// Index of the path with the largest masked gain |Lambda eta| for (k, b); -1 if
// everything is masked.
int dominant_path(const ChannelRealization& ch, int k, int b);

}  // namespace sixdmhs
