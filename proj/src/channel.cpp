// SPDX-License-Identifier: Apache-2.0
#include "sixdmhs/channel.hpp"

#include <algorithm>
#include <cmath>

namespace sixdmhs {

Vec3 direction_vector(double theta, double phi) {
    double cp = std::cos(phi);
    return {std::cos(theta) * cp, std::sin(theta) * cp, std::sin(phi)};
}

Angles angles_of(const Vec3& f) {
    double phi = std::asin(std::clamp(f.z, -1.0, 1.0));
    double theta = std::atan2(f.y, f.x);
    return {theta, phi};
}

ChannelScene draw_scene(const ChannelParams& params, int n_rx, int n_surfaces, Rng& rng) {
    ChannelScene scene;
    scene.params = params;
    scene.n_rx = n_rx;
    scene.n_surfaces = n_surfaces;
    scene.rx_positions.reserve(n_rx);
    for (int k = 0; k < n_rx; ++k) {
        double u = rng.uniform();
        double r = std::sqrt(params.rx_range_min * params.rx_range_min +
                             u * (params.rx_range_max * params.rx_range_max -
                                  params.rx_range_min * params.rx_range_min));
        double az = rng.uniform(params.rx_azimuth_min, params.rx_azimuth_max);
        scene.rx_positions.push_back({r * std::cos(az), r * std::sin(az), params.rx_height});
    }
    scene.path_angles.resize(n_rx);
    scene.kappa.resize(n_rx);
    for (int k = 0; k < n_rx; ++k) {
        Angles los = angles_of(scene.rx_positions[k].normalized());
        scene.path_angles[k].push_back(los);
        for (int i = 0; i < params.n_nlos; ++i) {
            double theta = rng.uniform(-kPi, kPi);
            double phi = std::asin(rng.uniform());  // area-uniform upper hemisphere
            scene.path_angles[k].push_back({theta, phi});
        }
        scene.kappa[k].resize(params.n_nlos);
        for (int i = 0; i < params.n_nlos; ++i) {
            scene.kappa[k][i].resize(n_surfaces);
            for (int b = 0; b < n_surfaces; ++b) scene.kappa[k][i][b] = rng.cnormal(1.0);
        }
    }
    return scene;
}

bool mask_predicate(const SurfacePose& pose, const Vec3& f, MaskMode mode) {
    if (mode == MaskMode::Position) return pose.position.dot(f) > 0.0;
    return pose.normal().dot(f) > 0.0;
}

ChannelRealization realize(const ChannelScene& scene, const std::vector<SurfacePose>& poses) {
    if (static_cast<int>(poses.size()) != scene.n_surfaces)
        throw std::invalid_argument("realize: pose count does not match scene");
    const ChannelParams& p = scene.params;
    const double lam = p.wavelength();
    ChannelRealization ch;
    ch.wavelength = lam;
    ch.n_rx = scene.n_rx;
    ch.n_surfaces = scene.n_surfaces;
    ch.rx_positions = scene.rx_positions;
    ch.paths.resize(scene.n_rx);
    ch.mask.resize(scene.n_rx);
    ch.path_loss.resize(scene.n_rx);
    const double k_r = p.rician_k;
    for (int k = 0; k < scene.n_rx; ++k) {
        ch.paths[k].resize(scene.n_surfaces);
        ch.mask[k].resize(scene.n_surfaces);
        ch.path_loss[k].resize(scene.n_surfaces);
        for (int b = 0; b < scene.n_surfaces; ++b) {
            double dist = (scene.rx_positions[k] - poses[b].position).norm();
            double amp = lam / (4.0 * kPi);
            double omega = amp * amp / std::pow(dist, p.pathloss_exponent);
            ch.path_loss[k][b] = omega;
            auto& path_list = ch.paths[k][b];
            auto& mask_list = ch.mask[k][b];
            for (size_t iota = 0; iota < scene.path_angles[k].size(); ++iota) {
                const Angles& ang = scene.path_angles[k][iota];
                PathComponent pc;
                pc.theta = ang.theta;
                pc.phi = ang.phi;
                pc.is_los = (iota == 0);
                if (iota == 0) {
                    pc.gain = std::sqrt(k_r / (k_r + 1.0)) * std::sqrt(omega);
                } else {
                    pc.gain = std::sqrt(1.0 / (k_r + 1.0)) * std::sqrt(omega) *
                              scene.kappa[k][iota - 1][b];
                }
                Vec3 f = direction_vector(ang.theta, ang.phi);
                mask_list.push_back(mask_predicate(poses[b], f, p.mask_mode) ? 1 : 0);
                path_list.push_back(pc);
            }
        }
    }
    return ch;
}

ChannelRealization draw_channel(const ChannelParams& params, int n_rx,
                                const std::vector<SurfacePose>& poses, uint64_t seed) {
    Rng rng(seed);
    ChannelScene scene = draw_scene(params, n_rx, static_cast<int>(poses.size()), rng);
    return realize(scene, poses);
}

cvec steering(const SurfacePose& pose, const SurfaceLayout& layout, double theta, double phi,
              double wavelength) {
    const Vec3 f = direction_vector(theta, phi);
    const double beta = 2.0 * kPi / wavelength;
    const double scale = 1.0 / std::sqrt(static_cast<double>(layout.elements()));
    cvec a(layout.elements());
    for (int ix = 0; ix < layout.m_x; ++ix)
        for (int iy = 0; iy < layout.m_y; ++iy) {
            Vec3 r = element_coords(pose, layout, ix, iy);
            double ph = beta * f.dot(r);
            a[ix * layout.m_y + iy] = scale * cplx{std::cos(ph), std::sin(ph)};
        }
    return a;
}

cvec channel_vector(const ChannelRealization& ch, int k, int b, const SurfacePose& pose,
                    const SurfaceLayout& layout) {
    const int m = layout.elements();
    const double sqrt_m = std::sqrt(static_cast<double>(m));
    cvec h(m, cplx{0.0, 0.0});
    const auto& path_list = ch.paths[k][b];
    for (size_t iota = 0; iota < path_list.size(); ++iota) {
        if (!ch.mask[k][b][iota]) continue;
        cvec a = steering(pose, layout, path_list[iota].theta, path_list[iota].phi,
                          ch.wavelength);
        cplx g = sqrt_m * path_list[iota].gain;
        for (int i = 0; i < m; ++i) h[i] += g * a[i];
    }
    return h;
}

cvec equivalent_channel(const ChannelRealization& ch, int k, int b, const SurfacePose& pose,
                        const SurfaceLayout& layout, const rvec& psi, const cvec& em_response,
                        int n_feeds) {
    const int m = layout.elements();
    if (static_cast<int>(psi.size()) != m || static_cast<int>(em_response.size()) != m * n_feeds)
        throw std::invalid_argument("equivalent_channel: dimension mismatch");
    cvec h = channel_vector(ch, k, b, pose, layout);
    cvec hbar(n_feeds, cplx{0.0, 0.0});
    for (int q = 0; q < n_feeds; ++q) {
        cplx s = 0.0;
        for (int i = 0; i < m; ++i) s += h[i] * psi[i] * em_response[i * n_feeds + q];
        hbar[q] = s;
    }
    return hbar;
}

int dominant_path(const ChannelRealization& ch, int k, int b) {
    const auto& path_list = ch.paths[k][b];
    int best = -1;
    double best_gain = 0.0;
    for (size_t iota = 0; iota < path_list.size(); ++iota) {
        if (!ch.mask[k][b][iota]) continue;
        double g = std::abs(path_list[iota].gain);
        if (g > best_gain) {
            best_gain = g;
            best = static_cast<int>(iota);
        }
    }
    return best;
}

}  // namespace sixdmhs
