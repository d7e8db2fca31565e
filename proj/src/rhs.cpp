// SPDX-License-Identifier: Apache-2.0
#include "sixdmhs/rhs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sixdmhs/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sixdmhs {

namespace {

cplx unit_phasor(double phase) { return {std::cos(phase), std::sin(phase)}; }

double simplex_sum(const rvec& w) {
    double s = 0.0;
    for (double v : w) s += v;
    return s;
}

}  // namespace

EmResponse em_response(const SurfaceLayout& layout, const RhsParams& params) {
    EmResponse em;
    em.m = layout.elements();
    em.q = static_cast<int>(layout.feeds.size());
    em.data.resize(static_cast<size_t>(em.m) * em.q);
    const double beta_rho = 2.0 * kPi * params.f_c * params.refractive / kSpeedOfLight;
    const double amp = std::sqrt(params.efficiency);
    for (int ix = 0; ix < layout.m_x; ++ix)
        for (int iy = 0; iy < layout.m_y; ++iy) {
            int row = ix * layout.m_y + iy;
            Vec3 r = layout.local_element(ix, iy);
            for (int q = 0; q < em.q; ++q) {
                double d = (r - layout.feeds[q]).norm();
                em.data[row * em.q + q] = amp * unit_phasor(-beta_rho * d);
            }
        }
    return em;
}

HoloBeamformer holo_beamformer(const cvec& target_steering, const EmResponse& em,
                               const rvec& weights, double efficiency) {
    if (static_cast<int>(weights.size()) != em.q)
        throw std::invalid_argument("holo_beamformer: one weight per feed required");
    if (std::abs(simplex_sum(weights) - 1.0) > 1e-9 ||
        std::any_of(weights.begin(), weights.end(), [](double w) { return w < -1e-12; }))
        throw std::invalid_argument("holo_beamformer: weights must lie on the simplex");
    if (static_cast<int>(target_steering.size()) != em.m)
        throw std::invalid_argument("holo_beamformer: steering length mismatch");
    const double scale = std::sqrt(static_cast<double>(em.m) / efficiency);
    HoloBeamformer hb;
    hb.weights = weights;
    hb.psi.assign(em.m, 0.0);
    for (int q = 0; q < em.q; ++q) {
        if (weights[q] == 0.0) continue;
        for (int i = 0; i < em.m; ++i) {
            double re = std::real(scale * em.data[i * em.q + q] * target_steering[i]);
            hb.psi[i] += weights[q] * (re + 1.0) / 2.0;
        }
    }
    return hb;
}

double beam_gain(const rvec& psi, const EmResponse& em, const cvec& steering_vec) {
    if (static_cast<int>(psi.size()) != em.m || static_cast<int>(steering_vec.size()) != em.m)
        throw std::invalid_argument("beam_gain: dimension mismatch");
    cplx total = 0.0;
    for (int q = 0; q < em.q; ++q) {
        cplx s = 0.0;
        for (int i = 0; i < em.m; ++i) s += steering_vec[i] * psi[i] * em.data[i * em.q + q];
        total += s;
    }
    return std::abs(total);
}

GainExpansion beam_gain_expanded(const SurfaceLayout& layout, const RhsParams& params,
                                 const SurfacePose& pose, const rvec& weights,
                                 const Angles& construction, const Angles& eval) {
    const int n_feeds = static_cast<int>(layout.feeds.size());
    const double lam = params.wavelength();
    const double beta = 2.0 * kPi / lam;
    const Vec3 f_eval = direction_vector(eval.theta, eval.phi);
    const Vec3 f_con = direction_vector(construction.theta, construction.phi);
    GainExpansion out;
    cplx p_main = 0.0, p_twin = 0.0, p_cross = 0.0;
    for (int ix = 0; ix < layout.m_x; ++ix)
        for (int iy = 0; iy < layout.m_y; ++iy) {
            Vec3 r_local = layout.local_element(ix, iy);
            Vec3 r_global = pose.position + pose.rotation.apply(r_local);
            double ph_eval = beta * f_eval.dot(r_global);
            double ph_con = beta * f_con.dot(r_global);
            for (int q = 0; q < n_feeds; ++q) {
                double d_q = (r_local - layout.feeds[q]).norm();
                double x_q = ph_eval - beta * params.refractive * d_q;
                // constant-offset term, sum_q' w_q' = 1
                p_twin += unit_phasor(x_q) * 0.5;
                for (int qp = 0; qp < n_feeds; ++qp) {
                    double d_qp = (r_local - layout.feeds[qp]).norm();
                    double x0_qp = ph_con - beta * params.refractive * d_qp;
                    cplx diff = unit_phasor(x_q - x0_qp) * (weights[qp] / 4.0);
                    cplx sum = unit_phasor(x_q + x0_qp) * (weights[qp] / 4.0);
                    if (q == qp) {
                        p_main += diff;
                        p_twin += sum;
                    } else {
                        p_cross += diff + sum;
                    }
                }
            }
        }
    const double scale = std::sqrt(params.efficiency / static_cast<double>(layout.elements()));
    out.part_main = p_main * scale;
    out.part_twin = p_twin * scale;
    out.part_cross = p_cross * scale;
    return out;
}

GainProfile sample_gain_profile(const SurfaceLayout& layout, const RhsParams& params,
                                const rvec& weights, int n_theta, int n_phi) {
    EmResponse em = em_response(layout, params);
    const double lam = params.wavelength();
    SurfacePose local_pose;  // identity at the origin
    GainProfile profile;
    profile.samples.resize(static_cast<size_t>(n_theta) * n_phi);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int it = 0; it < n_theta; ++it) {
        double theta = -kPi + 2.0 * kPi * it / (n_theta - 1);
        for (int ip = 0; ip < n_phi; ++ip) {
            double phi = 0.5 * kPi * ip / (n_phi - 1);
            cvec a = steering(local_pose, layout, theta, phi, lam);
            HoloBeamformer hb = holo_beamformer(a, em, weights, params.efficiency);
            double g = beam_gain(hb.psi, em, a);
            profile.samples[static_cast<size_t>(it) * n_phi + ip] = {theta, phi, g};
        }
    }
    profile.max_gain = 0.0;
    profile.min_gain = std::numeric_limits<double>::infinity();
    for (const auto& s : profile.samples) {
        if (s.gain > profile.max_gain) {
            profile.max_gain = s.gain;
            profile.argmax = {s.theta, s.phi};
        }
        profile.min_gain = std::min(profile.min_gain, s.gain);
    }
    return profile;
}

namespace {

struct FeedEvaluator {
    const SurfaceLayout& base;
    const RhsParams& params;
    double lam;

    double gain_at(const std::vector<Vec3>& feeds, const rvec& weights, double theta,
                   double phi) const {
        SurfaceLayout layout = base;
        layout.feeds = feeds;
        EmResponse em = em_response(layout, params);
        SurfacePose local_pose;
        cvec a = steering(local_pose, layout, theta, phi, lam);
        HoloBeamformer hb = holo_beamformer(a, em, weights, params.efficiency);
        return beam_gain(hb.psi, em, a);
    }
};

bool feeds_admissible(const std::vector<Vec3>& feeds, double eps_r) {
    for (size_t i = 0; i < feeds.size(); ++i)
        for (size_t j = i + 1; j < feeds.size(); ++j)
            if ((feeds[i] - feeds[j]).norm() < eps_r) return false;
    return true;
}

}  // namespace

FeedSearchResult find_max_gain_direction(const SurfaceLayout& layout, const RhsParams& params,
                                         int n_feeds, const FeedSearchConfig& cfg) {
    const double lam = params.wavelength();
    const double eps_r = cfg.min_feed_dist > 0.0 ? cfg.min_feed_dist : lam / 2.0;
    const double width = (layout.m_x - 1) * layout.spacing;
    const double height = (layout.m_y - 1) * layout.spacing;
    // packing bound: feeds on an eps_r grid must fit the aperture
    const int cap = (static_cast<int>(std::floor(width / eps_r)) + 1) *
                    (static_cast<int>(std::floor(height / eps_r)) + 1);
    if (n_feeds > cap)
        throw InfeasibleError("find_max_gain_direction: feed spacing does not fit the aperture");

    FeedEvaluator eval{layout, params, lam};
    FeedSearchResult best;
    best.gain = -1.0;

    for (int restart = 0; restart < cfg.restarts; ++restart) {
        Rng rng(Rng::derive(cfg.seed, restart));
        std::vector<Vec3> feeds;
        if (restart == 0) {
            // centered regular placement
            for (int q = 0; q < n_feeds; ++q) {
                double fx = width * (q + 1.0) / (n_feeds + 1.0);
                feeds.push_back({fx, height / 2.0, 0.0});
            }
            if (!feeds_admissible(feeds, eps_r)) feeds.clear();
        }
        int tries = 0;
        while (feeds.empty() || !feeds_admissible(feeds, eps_r)) {
            feeds.clear();
            for (int q = 0; q < n_feeds; ++q)
                feeds.push_back({rng.uniform(0.0, width), rng.uniform(0.0, height), 0.0});
            if (++tries > 2000)
                throw InfeasibleError("find_max_gain_direction: cannot place feeds");
        }
        rvec weights(n_feeds, 1.0 / n_feeds);
        if (restart > 0 && n_feeds > 1) {
            double total = 0.0;
            for (double& w : weights) {
                w = -std::log(std::max(rng.uniform(), 1e-12));
                total += w;
            }
            for (double& w : weights) w /= total;
        }
        // coarse direction grid
        double best_g = -1.0;
        Angles best_dir;
        for (int it = 0; it < cfg.coarse_theta; ++it) {
            double theta = -kPi + 2.0 * kPi * it / cfg.coarse_theta;
            for (int ip = 0; ip < cfg.coarse_phi; ++ip) {
                double phi = 0.5 * kPi * (ip + 0.5) / cfg.coarse_phi;
                double g = eval.gain_at(feeds, weights, theta, phi);
                if (g > best_g) {
                    best_g = g;
                    best_dir = {theta, phi};
                }
            }
        }
        if (best_g > best.gain) best = {best_dir, feeds, weights, best_g};
    }

    // coordinate-descent refinement with shrinking steps
    double dir_step = kPi / cfg.coarse_theta;
    double pos_step = std::max(width, height) / 8.0;
    double w_step = 0.25;
    for (int round = 0; round < cfg.refine_rounds; ++round) {
        bool improved = false;
        auto try_candidate = [&](const Angles& dir, const std::vector<Vec3>& feeds,
                                 const rvec& weights) {
            if (!feeds_admissible(feeds, eps_r)) return;
            for (const auto& f : feeds)
                if (f.x < 0.0 || f.x > width || f.y < 0.0 || f.y > height) return;
            double g = eval.gain_at(feeds, weights, dir.theta, dir.phi);
            if (g > best.gain + 1e-12) {
                best = {dir, feeds, weights, g};
                improved = true;
            }
        };
        for (int sgn : {-1, 1}) {
            try_candidate({best.direction.theta + sgn * dir_step, best.direction.phi},
                          best.feeds, best.weights);
            try_candidate({best.direction.theta,
                           std::clamp(best.direction.phi + sgn * dir_step, 0.0, 0.5 * kPi)},
                          best.feeds, best.weights);
        }
        for (size_t q = 0; q < best.feeds.size(); ++q)
            for (int axis = 0; axis < 2; ++axis)
                for (int sgn : {-1, 1}) {
                    auto feeds = best.feeds;
                    (axis == 0 ? feeds[q].x : feeds[q].y) += sgn * pos_step;
                    try_candidate(best.direction, feeds, best.weights);
                }
        if (best.weights.size() > 1) {
            for (size_t i = 0; i < best.weights.size(); ++i)
                for (size_t j = 0; j < best.weights.size(); ++j) {
                    if (i == j) continue;
                    auto w = best.weights;
                    double delta = std::min(w_step, w[i]);
                    if (delta <= 0.0) continue;
                    w[i] -= delta;
                    w[j] += delta;
                    try_candidate(best.direction, best.feeds, w);
                }
        }
        if (!improved) {
            if (dir_step <= cfg.step && pos_step <= cfg.step * layout.spacing * layout.m_x &&
                w_step <= cfg.step)
                break;
            dir_step = std::max(dir_step / 2.0, cfg.step);
            pos_step = std::max(pos_step / 2.0, cfg.step * layout.spacing * layout.m_x);
            w_step = std::max(w_step / 2.0, cfg.step);
        }
    }
    return best;
}

}  // namespace sixdmhs
