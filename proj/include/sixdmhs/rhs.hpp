// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "sixdmhs/channel.hpp"
#include "sixdmhs/geometry.hpp"

namespace sixdmhs {

struct RhsParams {
    double efficiency = 1.0;   // eta
    double refractive = 3.0;   // rho
    double f_c = 30e9;

    double wavelength() const { return kSpeedOfLight / f_c; }
};

// Electromagnetic response Theta_b, an M x Q matrix stored row-major
// (entry(m, q) with m = m_x * M_y + m_y). Distances are taken in the local
// frame, which makes the response pose-invariant and cacheable.
struct EmResponse {
    int m = 0;
    int q = 0;
    cvec data;

    cplx operator()(int row, int col) const { return data[row * q + col]; }
    cvec column(int col) const {
        cvec c(m);
        for (int i = 0; i < m; ++i) c[i] = data[i * q + col];
        return c;
    }
};

EmResponse em_response(const SurfaceLayout& layout, const RhsParams& params);

// Amplitude-only holographic beamformer: Psi in [0,1]^M plus the feed mixing
// weights on the simplex.
struct HoloBeamformer {
    rvec psi;
    rvec weights;
};

// Psi = sum_q w_q (Re{ sqrt(M/eta) diag(Theta_q) a } + 1) / 2 for the steering
// vector `a` of the target direction.
HoloBeamformer holo_beamformer(const cvec& target_steering, const EmResponse& em,
                               const rvec& weights, double efficiency);

// Compact gain: | sum_q a^T diag(Psi) Theta_q |.
double beam_gain(const rvec& psi, const EmResponse& em, const cvec& steering_vec);

// Independent elementwise expansion of the gain into main / twin / cross-feed
// parts. Construction direction and weights are the ones Psi was built from;
// evaluation happens at `eval`. Used as a cross-check of beam_gain.
struct GainExpansion {
    cplx part_main;   // q = q' difference terms
    cplx part_twin;   // q = q' sum terms plus the constant-offset terms
    cplx part_cross;  // q != q' terms
    double total() const { return std::abs(part_main + part_twin + part_cross); }
};

GainExpansion beam_gain_expanded(const SurfaceLayout& layout, const RhsParams& params,
                                 const SurfacePose& pose, const rvec& weights,
                                 const Angles& construction, const Angles& eval);

struct GainSample {
    double theta = 0.0;
    double phi = 0.0;
    double gain = 0.0;
};

struct GainProfile {
    std::vector<GainSample> samples;
    double max_gain = 0.0;
    double min_gain = 0.0;
    Angles argmax;

    double anisotropy() const { return min_gain > 0.0 ? max_gain / min_gain : 0.0; }
};

// Profile over construction directions: for each (theta, phi) on the grid the
// beamformer is built for that direction and evaluated there. Local frame
// (identity pose at the origin), front hemisphere.
GainProfile sample_gain_profile(const SurfaceLayout& layout, const RhsParams& params,
                                const rvec& weights, int n_theta = 181, int n_phi = 91);

struct FeedSearchConfig {
    uint64_t seed = 1;
    int restarts = 24;
    int coarse_theta = 36;
    int coarse_phi = 12;
    int refine_rounds = 40;
    double step = 0.02;        // final perturbation scale (aperture fractions / radians)
    double min_feed_dist = 0;  // epsilon_r; 0 = lambda / 2
};

struct FeedSearchResult {
    Angles direction;
    std::vector<Vec3> feeds;
    rvec weights;
    double gain = 0.0;
};

// Joint search over direction, feed positions (pairwise >= epsilon_r, set S2)
// and mixing weights (simplex, set S1) maximizing the construction-direction
// gain. Deterministic for a fixed seed.
FeedSearchResult find_max_gain_direction(const SurfaceLayout& layout, const RhsParams& params,
                                         int n_feeds, const FeedSearchConfig& cfg);

}  // namespace sixdmhs
