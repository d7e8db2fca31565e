// SPDX-License-Identifier: Apache-2.0
#include "sixdmhs/orientation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sixdmhs {

namespace {

int n_surfaces(const OrientationProblem& p) { return static_cast<int>(p.sensed_dirs.size()); }

// per-(k, b) coupling row c_{k,b} = a_b(f_k)^T diag(Psi_b) Theta_b, length Q
struct Couplings {
    int k_n = 0, b_n = 0, q_n = 0;
    std::vector<cvec> rows;  // [k * B + b], length Q

    const cvec& at(int k, int b) const { return rows[k * b_n + b]; }
};

rvec psi_for(const OrientationProblem& problem, const SurfacePose& pose, const Vec3& target,
             const rvec& omega) {
    Angles ang = angles_of(target);
    cvec a = steering(pose, problem.layout, ang.theta, ang.phi, problem.wavelength);
    return holo_beamformer(a, problem.em, omega, problem.efficiency).psi;
}

Couplings build_couplings(const OrientationProblem& problem, const OrientationState& state,
                          const std::vector<rvec>& psi) {
    const int k_n = n_surfaces(problem);
    const int b_n = k_n;
    const int q_n = problem.em.q;
    const int m = problem.em.m;
    Couplings c;
    c.k_n = k_n;
    c.b_n = b_n;
    c.q_n = q_n;
    c.rows.assign(static_cast<size_t>(k_n) * b_n, cvec(q_n, cplx{0.0, 0.0}));
    for (int k = 0; k < k_n; ++k) {
        Angles ang = angles_of(problem.sensed_dirs[k]);
        for (int b = 0; b < b_n; ++b) {
            cvec a = steering(state.poses[b], problem.layout, ang.theta, ang.phi,
                              problem.wavelength);
            cvec& row = c.rows[k * b_n + b];
            for (int q = 0; q < q_n; ++q) {
                cplx s = 0.0;
                for (int i = 0; i < m; ++i)
                    s += a[i] * psi[b][i] * problem.em.data[i * q_n + q];
                row[q] = s;
            }
        }
    }
    return c;
}

std::vector<rvec> all_psi(const OrientationProblem& problem, const OrientationState& state) {
    const int b_n = n_surfaces(problem);
    std::vector<rvec> psi(b_n);
    for (int b = 0; b < b_n; ++b)
        psi[b] = psi_for(problem, state.poses[b], problem.sensed_dirs[b], state.omega[b]);
    return psi;
}

// Xi_k[k'] = sum_b c_{k,b} . X_{k',b}
cvec xi_row(const Couplings& c, const std::vector<cvec>& x, int k) {
    cvec xi(c.k_n, cplx{0.0, 0.0});
    for (int kp = 0; kp < c.k_n; ++kp) {
        cplx s = 0.0;
        for (int b = 0; b < c.b_n; ++b) {
            const cvec& row = c.at(k, b);
            for (int q = 0; q < c.q_n; ++q) s += row[q] * x[kp][b * c.q_n + q];
        }
        xi[kp] = s;
    }
    return xi;
}

double true_objective(const Couplings& c, const std::vector<cvec>& x) {
    double v = std::numeric_limits<double>::infinity();
    for (int k = 0; k < c.k_n; ++k) v = std::min(v, norm2sq(xi_row(c, x, k)));
    return v;
}

double surrogate(const Couplings& c, const std::vector<cvec>& x, const std::vector<cvec>& zeta,
                 int k) {
    cvec xi = xi_row(c, x, k);
    cplx dot = 0.0;
    for (int kp = 0; kp < c.k_n; ++kp) dot += std::conj(zeta[k][kp]) * xi[kp];
    return 2.0 * std::real(dot) - norm2sq(zeta[k]);
}

double min_surrogate(const Couplings& c, const std::vector<cvec>& x,
                     const std::vector<cvec>& zeta) {
    double v = std::numeric_limits<double>::infinity();
    for (int k = 0; k < c.k_n; ++k) v = std::min(v, surrogate(c, x, zeta, k));
    return v;
}

void project_ball(std::vector<cvec>& x, double p_budget) {
    double total = 0.0;
    for (const auto& v : x) total += norm2sq(v);
    if (total > p_budget && total > 0.0) {
        double s = std::sqrt(p_budget / total);
        for (auto& v : x)
            for (auto& e : v) e *= s;
    }
}

rvec project_simplex(rvec v) {
    rvec u = v;
    std::sort(u.begin(), u.end(), std::greater<double>());
    double css = 0.0, tau = 0.0;
    int rho = 0;
    for (size_t i = 0; i < u.size(); ++i) {
        css += u[i];
        double t = (css - 1.0) / static_cast<double>(i + 1);
        if (u[i] - t > 0.0) {
            rho = static_cast<int>(i + 1);
            tau = t;
        }
    }
    for (auto& e : v) e = std::max(e - tau, 0.0);
    return v;
}

// (P4-1): projected supergradient over X, best iterate kept.
void solve_x(const OrientationProblem& problem, const Couplings& c, OrientationState& state) {
    const int k_n = c.k_n;
    const int dim = c.b_n * c.q_n;
    auto x = state.precoders;
    auto best_x = x;
    double best = min_surrogate(c, x, state.zeta);
    const double step0 = 0.3 * std::sqrt(problem.p_tx);
    int stall = 0;
    for (int it = 1; it <= problem.subgradient_iters; ++it) {
        int kmin = 0;
        double vmin = std::numeric_limits<double>::infinity();
        for (int k = 0; k < k_n; ++k) {
            double v = surrogate(c, x, state.zeta, k);
            if (v < vmin) {
                vmin = v;
                kmin = k;
            }
        }
        if (vmin > best + problem.subgradient_tol * std::max(1.0, std::abs(best))) {
            best = vmin;
            best_x = x;
            stall = 0;
        } else if (++stall > 250) {
            break;
        }
        // gradient of 2 Re{zeta^H Xi_kmin}
        std::vector<cvec> g(k_n, cvec(dim, cplx{0.0, 0.0}));
        for (int kp = 0; kp < k_n; ++kp) {
            cplx z = state.zeta[kmin][kp];
            for (int b = 0; b < c.b_n; ++b) {
                const cvec& row = c.at(kmin, b);
                for (int q = 0; q < c.q_n; ++q)
                    g[kp][b * c.q_n + q] = 2.0 * z * std::conj(row[q]);
            }
        }
        double gnorm = 0.0;
        for (const auto& v : g) gnorm += norm2sq(v);
        gnorm = std::sqrt(gnorm);
        if (gnorm < 1e-300) break;
        double step = step0 / std::sqrt(static_cast<double>(it));
        for (int k = 0; k < k_n; ++k)
            for (int i = 0; i < dim; ++i) x[k][i] += (step / gnorm) * g[k][i];
        project_ball(x, problem.p_tx);
    }
    state.precoders = best_x;
}

// (P4-2): projected supergradient over the per-surface simplices.
void solve_omega(const OrientationProblem& problem, OrientationState& state) {
    const int k_n = n_surfaces(problem);
    const int b_n = k_n;
    const int q_n = problem.em.q;
    const int m = problem.em.m;
    if (q_n < 2) return;
    // V_k[k'][b][q] = (a_k^T diag(psi_{b,q}) Theta_b) X_{k',b}; Xi is linear in
    // omega with this tensor.
    std::vector<rvec> psi_feed(static_cast<size_t>(b_n) * q_n);
    for (int b = 0; b < b_n; ++b) {
        rvec unit(q_n, 0.0);
        for (int q = 0; q < q_n; ++q) {
            rvec w = unit;
            w[q] = 1.0;
            psi_feed[b * q_n + q] =
                psi_for(problem, state.poses[b], problem.sensed_dirs[b], w);
        }
    }
    std::vector<cvec> v(static_cast<size_t>(k_n) * k_n, cvec(b_n * q_n, cplx{0.0, 0.0}));
    for (int k = 0; k < k_n; ++k) {
        Angles ang = angles_of(problem.sensed_dirs[k]);
        for (int b = 0; b < b_n; ++b) {
            cvec a = steering(state.poses[b], problem.layout, ang.theta, ang.phi,
                              problem.wavelength);
            for (int q = 0; q < q_n; ++q) {
                // row through feed-q hologram: length Q
                cvec row(q_n, cplx{0.0, 0.0});
                const rvec& psi = psi_feed[b * q_n + q];
                for (int qt = 0; qt < q_n; ++qt) {
                    cplx s = 0.0;
                    for (int i = 0; i < m; ++i)
                        s += a[i] * psi[i] * problem.em.data[i * q_n + qt];
                    row[qt] = s;
                }
                for (int kp = 0; kp < k_n; ++kp) {
                    cplx s = 0.0;
                    for (int qt = 0; qt < q_n; ++qt) s += row[qt] * state.precoders[kp][b * q_n + qt];
                    v[k * k_n + kp][b * q_n + q] = s;
                }
            }
        }
    }
    auto omega_flat = [&](const std::vector<rvec>& om) {
        rvec f(b_n * q_n);
        for (int b = 0; b < b_n; ++b)
            for (int q = 0; q < q_n; ++q) f[b * q_n + q] = om[b][q];
        return f;
    };
    auto value = [&](const rvec& f) {
        double vmin = std::numeric_limits<double>::infinity();
        for (int k = 0; k < k_n; ++k) {
            double s = 0.0;
            cplx dot = 0.0;
            for (int kp = 0; kp < k_n; ++kp) {
                cplx xi = 0.0;
                const cvec& vk = v[k * k_n + kp];
                for (int i = 0; i < b_n * q_n; ++i) xi += f[i] * vk[i];
                dot += std::conj(state.zeta[k][kp]) * xi;
            }
            s = 2.0 * std::real(dot) - norm2sq(state.zeta[k]);
            vmin = std::min(vmin, s);
        }
        return vmin;
    };
    rvec f = omega_flat(state.omega);
    rvec best_f = f;
    double best = value(f);
    int stall = 0;
    for (int it = 1; it <= problem.subgradient_iters; ++it) {
        // active k and its gradient
        int kmin = 0;
        double vmin = std::numeric_limits<double>::infinity();
        for (int k = 0; k < k_n; ++k) {
            double s;
            {
                cplx dot = 0.0;
                for (int kp = 0; kp < k_n; ++kp) {
                    cplx xi = 0.0;
                    const cvec& vk = v[k * k_n + kp];
                    for (int i = 0; i < b_n * q_n; ++i) xi += f[i] * vk[i];
                    dot += std::conj(state.zeta[k][kp]) * xi;
                }
                s = 2.0 * std::real(dot) - norm2sq(state.zeta[k]);
            }
            if (s < vmin) {
                vmin = s;
                kmin = k;
            }
        }
        if (vmin > best + problem.subgradient_tol * std::max(1.0, std::abs(best))) {
            best = vmin;
            best_f = f;
            stall = 0;
        } else if (++stall > 250) {
            break;
        }
        rvec g(b_n * q_n, 0.0);
        for (int i = 0; i < b_n * q_n; ++i) {
            cplx s = 0.0;
            for (int kp = 0; kp < k_n; ++kp)
                s += std::conj(state.zeta[kmin][kp]) * v[kmin * k_n + kp][i];
            g[i] = 2.0 * std::real(s);
        }
        double gnorm = 0.0;
        for (double e : g) gnorm += e * e;
        gnorm = std::sqrt(gnorm);
        if (gnorm < 1e-300) break;
        double step = 0.5 / std::sqrt(static_cast<double>(it));
        for (int i = 0; i < b_n * q_n; ++i) f[i] += (step / gnorm) * g[i];
        for (int b = 0; b < b_n; ++b) {
            rvec wb(q_n);
            for (int q = 0; q < q_n; ++q) wb[q] = f[b * q_n + q];
            wb = project_simplex(wb);
            for (int q = 0; q < q_n; ++q) f[b * q_n + q] = wb[q];
        }
    }
    for (int b = 0; b < b_n; ++b)
        for (int q = 0; q < q_n; ++q) state.omega[b][q] = best_f[b * q_n + q];
}

}  // namespace

SurfacePose pose_for(const OrientationProblem& problem, int b, const Vec3& position, int slot) {
    SurfacePose pose;
    pose.position = position;
    pose.slot = slot;
    switch (problem.rotation_policy) {
        case RotationPolicy::SensingAligned:
            pose.rotation = rotation_between(problem.max_gain_local, problem.sensed_dirs[b]);
            break;
        case RotationPolicy::Radial:
            pose.rotation = rotation_between({0.0, 0.0, 1.0}, position.normalized());
            break;
        case RotationPolicy::FixedInitial:
            pose.rotation = problem.initial_poses[b].rotation;
            break;
    }
    return pose;
}

std::vector<Mat3> rotations_from_sensing(const Vec3& max_gain_local,
                                         const std::vector<Vec3>& sensed_dirs) {
    std::vector<Mat3> rot;
    rot.reserve(sensed_dirs.size());
    for (const auto& u : sensed_dirs) rot.push_back(rotation_between(max_gain_local, u));
    return rot;
}

double gain_objective(const OrientationProblem& problem, const OrientationState& state) {
    auto psi = all_psi(problem, state);
    Couplings c = build_couplings(problem, state, psi);
    return true_objective(c, state.precoders);
}

long select_slots(const OrientationProblem& problem, OrientationState& state, int* sweeps) {
    const int b_n = n_surfaces(problem);
    const int m1 = static_cast<int>(problem.slot_table.size());
    long candidates = 0;
    int pass = 0;
    auto psi = all_psi(problem, state);
    Couplings c = build_couplings(problem, state, psi);
    // only surface b's rows change when its slot moves
    auto refresh_surface = [&](Couplings& cc, std::vector<rvec>& pp, int b,
                               const SurfacePose& pose) {
        pp[b] = psi_for(problem, pose, problem.sensed_dirs[b], state.omega[b]);
        for (int k = 0; k < b_n; ++k) {
            Angles ang = angles_of(problem.sensed_dirs[k]);
            cvec a = steering(pose, problem.layout, ang.theta, ang.phi, problem.wavelength);
            cvec& row = cc.rows[k * b_n + b];
            for (int q = 0; q < cc.q_n; ++q) {
                cplx s = 0.0;
                for (int i = 0; i < problem.em.m; ++i)
                    s += a[i] * pp[b][i] * problem.em.data[i * cc.q_n + q];
                row[q] = s;
            }
        }
    };
    double g_old = true_objective(c, state.precoders);
    double g_before_pass = -std::numeric_limits<double>::infinity();
    while (std::abs(g_old - g_before_pass) >= problem.epsilon * std::max(1.0, std::abs(g_old))) {
        g_before_pass = g_old;
        for (int slot = 0; slot < m1; ++slot) {
            for (int b = 0; b < b_n; ++b) {
                ++candidates;
                if (state.slots[b] == slot) continue;
                SurfacePose pose = pose_for(problem, b, problem.slot_table[slot], slot);
                Couplings c_trial = c;
                auto psi_trial = psi;
                refresh_surface(c_trial, psi_trial, b, pose);
                double g_new = true_objective(c_trial, state.precoders);
                if (g_new <= g_old) continue;
                auto poses = state.poses;
                poses[b] = pose;
                if (!check_feasible(poses, problem.d_min).ok()) continue;
                state.slots[b] = slot;
                state.poses = std::move(poses);
                c = std::move(c_trial);
                psi = std::move(psi_trial);
                g_old = g_new;
            }
        }
        if (++pass >= 50) break;
    }
    if (sweeps) *sweeps = pass;
    return candidates;
}

void fp_refine(const OrientationProblem& problem, OrientationState& state,
               rvec* surrogate_trace) {
    auto psi = all_psi(problem, state);
    Couplings c = build_couplings(problem, state, psi);
    // zeta matched to the current iterate
    for (int k = 0; k < c.k_n; ++k) state.zeta[k] = xi_row(c, state.precoders, k);
    double prev = min_surrogate(c, state.precoders, state.zeta);
    for (int cycle = 0; cycle < problem.max_inner; ++cycle) {
        solve_x(problem, c, state);
        if (problem.em.q > 1) {
            solve_omega(problem, state);
            psi = all_psi(problem, state);
            c = build_couplings(problem, state, psi);
        }
        for (int k = 0; k < c.k_n; ++k) state.zeta[k] = xi_row(c, state.precoders, k);
        double val = min_surrogate(c, state.precoders, state.zeta);
        if (surrogate_trace) surrogate_trace->push_back(val);
        if (std::abs(val - prev) <= problem.epsilon * std::max(1.0, std::abs(prev))) break;
        prev = val;
    }
}

OrientationSolution optimize_orientation(const OrientationProblem& problem) {
    const int b_n = n_surfaces(problem);
    if (b_n == 0) throw std::invalid_argument("optimize_orientation: empty problem");
    if (static_cast<int>(problem.initial_poses.size()) != b_n)
        throw std::invalid_argument("optimize_orientation: one initial pose per surface");

    OrientationState state;
    state.slots.resize(b_n);
    state.poses.resize(b_n);
    for (int b = 0; b < b_n; ++b) {
        int slot = b < static_cast<int>(problem.initial_slots.size()) ? problem.initial_slots[b]
                                                                      : -1;
        Vec3 pos = slot >= 0 ? problem.slot_table[slot] : problem.initial_poses[b].position;
        state.slots[b] = slot;
        state.poses[b] = pose_for(problem, b, pos, slot);
    }
    state.omega.assign(b_n, rvec(problem.em.q, 1.0 / problem.em.q));
    state.zeta.assign(b_n, cvec(b_n, cplx{0.0, 0.0}));
    // equal-power precoders matched to the sensed directions
    {
        auto psi = all_psi(problem, state);
        Couplings c = build_couplings(problem, state, psi);
        state.precoders.assign(b_n, cvec(b_n * problem.em.q, cplx{0.0, 0.0}));
        for (int k = 0; k < b_n; ++k) {
            cvec stacked(b_n * problem.em.q);
            for (int b = 0; b < b_n; ++b)
                for (int q = 0; q < problem.em.q; ++q)
                    stacked[b * problem.em.q + q] = c.at(k, b)[q];
            double n = std::sqrt(norm2sq(stacked));
            if (n == 0.0) continue;
            double s = std::sqrt(problem.p_tx / b_n) / n;
            for (size_t i = 0; i < stacked.size(); ++i)
                state.precoders[k][i] = s * std::conj(stacked[i]);
        }
    }

    // repair an infeasible initial assignment before the trace starts;
    // Algorithm 1's accept rule cannot leave an infeasible configuration
    if (problem.optimize_slots && !check_feasible(state.poses, problem.d_min).ok()) {
        const int m1 = static_cast<int>(problem.slot_table.size());
        for (int pass = 0; pass < 2 * b_n; ++pass) {
            size_t current = check_feasible(state.poses, problem.d_min).violations.size();
            if (current == 0) break;
            bool progressed = false;
            for (int b = 0; b < b_n; ++b) {
                size_t state_violations =
                    check_feasible(state.poses, problem.d_min).violations.size();
                size_t best_violations = state_violations;
                double best_g = -std::numeric_limits<double>::infinity();
                int best_slot = -1;
                for (int slot = 0; slot < m1; ++slot) {
                    OrientationState trial = state;
                    trial.slots[b] = slot;
                    trial.poses[b] = pose_for(problem, b, problem.slot_table[slot], slot);
                    size_t after =
                        check_feasible(trial.poses, problem.d_min).violations.size();
                    if (after >= state_violations) continue;
                    double g = gain_objective(problem, trial);
                    if (after < best_violations || (after == best_violations && g > best_g)) {
                        best_violations = after;
                        best_g = g;
                        best_slot = slot;
                    }
                }
                if (best_slot >= 0) {
                    state.slots[b] = best_slot;
                    state.poses[b] =
                        pose_for(problem, b, problem.slot_table[best_slot], best_slot);
                    progressed = true;
                }
            }
            if (!progressed) break;
        }
        if (!check_feasible(state.poses, problem.d_min).ok())
            throw InfeasibleError("optimize_orientation: no feasible slot assignment found");
    }

    OrientationSolution sol;
    double prev = gain_objective(problem, state);
    sol.outer_trace.push_back(prev);
    for (int outer = 0; outer < problem.max_outer; ++outer) {
        if (problem.optimize_slots) {
            int sweeps = 0;
            sol.slot_candidates += select_slots(problem, state, &sweeps);
            sol.sweeps += sweeps;
        }
        fp_refine(problem, state, &sol.inner_surrogate_trace);
        double obj = gain_objective(problem, state);
        sol.outer_trace.push_back(obj);
        bool converged = std::abs(obj - prev) <= problem.epsilon * std::max(1.0, std::abs(prev));
        prev = obj;
        if (converged || !problem.optimize_slots) break;
    }

    sol.poses = state.poses;
    sol.omega = state.omega;
    sol.precoders = state.precoders;
    sol.objective = prev;
    sol.psi.resize(b_n);
    auto psi = all_psi(problem, state);
    for (int b = 0; b < b_n; ++b) sol.psi[b] = psi[b];
    sol.feasibility = check_feasible(state.poses, problem.d_min);
    if (problem.optimize_slots && !sol.feasibility.ok())
        throw InfeasibleError("optimize_orientation: no feasible slot assignment found");
    return sol;
}

}  // namespace sixdmhs
