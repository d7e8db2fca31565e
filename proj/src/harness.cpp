// SPDX-License-Identifier: Apache-2.0
#include "sixdmhs/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sixdmhs {

using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct SchemePolicy {
    bool holographic_sensing = false;
    bool ls_sensing = false;
    bool truth_dominant = false;  // perfect CSI: strongest path known
    bool truth_los = false;       // LoS direction known
    RotationPolicy rotation = RotationPolicy::SensingAligned;
    bool optimize_slots = false;
    bool full_csi_overhead = false;
};

SchemePolicy policy_for(SchemeId scheme) {
    SchemePolicy p;
    switch (scheme) {
        case SchemeId::Proposed:
            p.holographic_sensing = true;
            p.rotation = RotationPolicy::SensingAligned;
            p.optimize_slots = true;
            break;
        case SchemeId::Fpa:
            p.holographic_sensing = true;
            p.rotation = RotationPolicy::Radial;
            p.optimize_slots = false;
            break;
        case SchemeId::RotationOnly:
            p.holographic_sensing = true;
            p.rotation = RotationPolicy::SensingAligned;
            p.optimize_slots = false;
            break;
        case SchemeId::TranslationOnly:
            p.holographic_sensing = true;
            p.rotation = RotationPolicy::Radial;
            p.optimize_slots = true;
            break;
        case SchemeId::LsSensing:
            p.ls_sensing = true;
            p.rotation = RotationPolicy::SensingAligned;
            p.optimize_slots = true;
            break;
        case SchemeId::PerfectCsi:
            p.truth_dominant = true;
            p.rotation = RotationPolicy::SensingAligned;
            p.optimize_slots = true;
            p.full_csi_overhead = true;
            break;
        case SchemeId::LosOnly:
            p.truth_los = true;
            p.rotation = RotationPolicy::SensingAligned;
            p.optimize_slots = true;
            break;
    }
    return p;
}

// strongest-path direction per receiver at the given realization
Vec3 truth_direction(const ChannelRealization& ch, int k) {
    const auto& path_list = ch.paths[k][0];
    int best = 0;
    double best_score = -1.0;
    for (size_t iota = 0; iota < path_list.size(); ++iota) {
        double score = 0.0;
        for (int b = 0; b < ch.n_surfaces; ++b)
            if (ch.mask[k][b][iota]) score += std::norm(ch.paths[k][b][iota].gain);
        if (score > best_score) {
            best_score = score;
            best = static_cast<int>(iota);
        }
    }
    if (best_score <= 0.0) best = 0;  // everything masked; fall back to LoS
    return direction_vector(path_list[best].theta, path_list[best].phi);
}

Vec3 perturb_direction(const Vec3& f, double error_norm, Rng& rng) {
    if (error_norm <= 0.0) return f;
    // rotate by delta about a random axis orthogonal to f: |f' - f| = error_norm
    double delta = 2.0 * std::asin(std::clamp(error_norm / 2.0, 0.0, 1.0));
    Vec3 helper{rng.normal(), rng.normal(), rng.normal()};
    Vec3 axis = f.cross(helper);
    while (axis.norm() < 1e-9) {
        helper = {rng.normal(), rng.normal(), rng.normal()};
        axis = f.cross(helper);
    }
    return rodrigues(axis.normalized(), delta).apply(f);
}

}  // namespace

uint64_t trial_seed(uint64_t master, int trial) {
    return Rng::derive(master, 0x7261696Cu + static_cast<uint64_t>(trial));
}

ScenarioContext make_context(const Scenario& scenario) {
    ScenarioContext ctx;
    ctx.scenario = scenario;
    ctx.layout.m_x = scenario.m_x;
    ctx.layout.m_y = scenario.m_y;
    ctx.layout.spacing = scenario.element_spacing();

    RhsParams rhs_params{scenario.efficiency, scenario.refractive, scenario.f_c};
    FeedSearchConfig cfg;
    cfg.seed = scenario.search_seed;
    cfg.restarts = scenario.search_restarts;
    cfg.min_feed_dist = scenario.feed_min_dist_wl * scenario.wavelength();
    FeedSearchResult fs = find_max_gain_direction(ctx.layout, rhs_params, scenario.n_feeds, cfg);
    ctx.layout.feeds = fs.feeds;
    ctx.max_gain_local = direction_vector(fs.direction.theta, fs.direction.phi);
    ctx.max_gain_value = fs.gain;
    ctx.em = em_response(ctx.layout, rhs_params);

    ctx.slot_table = fibonacci_sphere_slots(scenario.n_slots, scenario.slot_radius,
                                            scenario.slot_z_min, scenario.slot_z_max);
    if (scenario.n_surfaces > scenario.n_slots)
        throw std::invalid_argument("make_context: more surfaces than slots");
    // fixed arrangement: the first B table slots, radial rotations
    for (int b = 0; b < scenario.n_surfaces; ++b) {
        SurfacePose pose;
        pose.position = ctx.slot_table[b];
        pose.slot = b;
        pose.rotation = rotation_between({0.0, 0.0, 1.0}, pose.position.normalized());
        ctx.initial_poses.push_back(pose);
    }
    ctx.sensing = scenario.sensing_layout();
    return ctx;
}

// one slot per surface, greedily the best-aligned unused slot toward the
// sensed direction
std::vector<int> aim_aligned_slots(const std::vector<Vec3>& slot_table,
                                   const std::vector<Vec3>& sensed_dirs) {
    std::vector<int> slots(sensed_dirs.size(), -1);
    std::vector<uint8_t> used(slot_table.size(), 0);
    for (size_t b = 0; b < sensed_dirs.size(); ++b) {
        int best = -1;
        double best_dot = -2.0;
        for (size_t m = 0; m < slot_table.size(); ++m) {
            if (used[m]) continue;
            double d = slot_table[m].normalized().dot(sensed_dirs[b]);
            if (d > best_dot) {
                best_dot = d;
                best = static_cast<int>(m);
            }
        }
        slots[b] = best;
        used[best] = 1;
    }
    return slots;
}

SensingOutcome run_sensing(const ScenarioContext& ctx, SchemeId scheme, uint64_t seed) {
    const Scenario& sc = ctx.scenario;
    const SchemePolicy policy = policy_for(scheme);
    const int k_n = sc.n_surfaces;
    SensingOutcome out;

    Rng rng_channel(Rng::derive(seed, 1));
    out.scene = draw_scene(sc.channel_params(), k_n, sc.n_surfaces, rng_channel);
    ChannelRealization init_ch = realize(out.scene, ctx.initial_poses);

    out.truths.resize(k_n);
    for (int k = 0; k < k_n; ++k) out.truths[k] = truth_direction(init_ch, k);

    std::vector<Mat3> init_rot;
    for (const auto& p : ctx.initial_poses) init_rot.push_back(p.rotation);

    out.estimates.resize(k_n);
    if (sc.rmse_injection >= 0.0) {
        Rng rng_inject(Rng::derive(seed, 4));
        for (int k = 0; k < k_n; ++k) {
            out.estimates[k].f_global =
                perturb_direction(out.truths[k], sc.rmse_injection, rng_inject);
            out.estimates[k].surface = k;
        }
    } else if (policy.truth_dominant || policy.truth_los) {
        for (int k = 0; k < k_n; ++k) {
            out.estimates[k].f_global =
                policy.truth_los ? direction_vector(out.scene.path_angles[k][0].theta,
                                                    out.scene.path_angles[k][0].phi)
                                 : out.truths[k];
            out.estimates[k].surface = k;
        }
    } else if (policy.ls_sensing) {
        LsBaselineConfig cfg;
        cfg.snapshots = sc.ls_snapshots;
        cfg.p_sense = sc.p_sense();
        cfg.noise_var = sc.sense_noise_var();
        std::vector<Vec3> grid = fft_bin_grid(ctx.sensing, sc.wavelength());
        for (int k = 0; k < k_n; ++k) {
            cfg.seed = Rng::derive(seed, 0x6C730000u + k);
            out.estimates[k] = ls_baseline_detect(init_ch, k, ctx.initial_poses, ctx.layout,
                                                  ctx.em, grid, init_rot, cfg);
        }
    } else {
        // holographic sensing, TDMA over receivers
        Rng rng_sense(Rng::derive(seed, 2));
        DetectOptions opt{sc.zero_pad, sc.bin_mapping};
        for (int k = 0; k < k_n; ++k) {
            std::vector<BorderComplex> images(sc.n_surfaces);
            for (int b = 0; b < sc.n_surfaces; ++b) {
                BorderComplex uplink =
                    border_channel(init_ch, k, b, ctx.initial_poses[b], ctx.sensing);
                double a_const = sc.reference_gain * sc.p_sense() * init_ch.path_loss[k][b];
                ReferenceField ref = draw_reference(ctx.sensing, a_const, sc.sigma1, rng_sense);
                BorderReal readings = meter_readings(uplink, ctx.sensing, ref, sc.p_sense(),
                                                     sc.sense_noise_var(), rng_sense);
                images[b] = excite(readings, ctx.sensing, ref);
            }
            out.estimates[k] = fft_detect(images, ctx.sensing, sc.wavelength(), init_rot, opt);
        }
    }

    double acc = 0.0;
    for (int k = 0; k < k_n; ++k) {
        Vec3 d = out.estimates[k].f_global - out.truths[k];
        acc += d.dot(d);
    }
    out.rmse_term = acc / k_n;
    return out;
}

TrialResult run_protocol(const ScenarioContext& ctx, SchemeId scheme, uint64_t seed) {
    const Scenario& sc = ctx.scenario;
    const SchemePolicy policy = policy_for(scheme);
    const int k_n = sc.n_surfaces;

    TrialResult result;
    result.scheme = scheme;
    result.seed = seed;

    SensingOutcome sensing = run_sensing(ctx, scheme, seed);
    result.truths = sensing.truths;
    result.estimates.resize(k_n);
    for (int k = 0; k < k_n; ++k) result.estimates[k] = sensing.estimates[k].f_global;
    result.sensing_rmse = sensing.rmse_term;

    double ts = policy.full_csi_overhead
                    ? sc.overhead.ts_full_csi(k_n, sc.n_surfaces, sc.m_x * sc.m_y)
                    : sc.overhead.ts_equivalent(k_n, sc.n_surfaces, sc.n_feeds);
    result.overhead_factor = sc.overhead.factor(ts);

    OrientationProblem problem;
    problem.sensed_dirs = result.estimates;
    problem.max_gain_local = ctx.max_gain_local;
    problem.slot_table = ctx.slot_table;
    problem.layout = ctx.layout;
    problem.em = ctx.em;
    problem.wavelength = sc.wavelength();
    problem.efficiency = sc.efficiency;
    problem.p_tx = sc.p_tx();
    problem.d_min = sc.d_min;
    problem.rotation_policy = policy.rotation;
    problem.initial_poses = ctx.initial_poses;
    if (policy.optimize_slots) {
        problem.initial_slots = aim_aligned_slots(ctx.slot_table, problem.sensed_dirs);
    } else {
        problem.initial_slots.resize(k_n);
        for (int b = 0; b < k_n; ++b) problem.initial_slots[b] = ctx.initial_poses[b].slot;
    }
    problem.optimize_slots = policy.optimize_slots;
    problem.epsilon = sc.epsilon;
    problem.subgradient_iters = sc.subgradient_iters;

    OrientationSolution sol;
    try {
        sol = optimize_orientation(problem);
    } catch (const InfeasibleError& e) {
        result.infeasible = true;
        result.infeasible_reason = e.what();
        result.metrics.min_eh_dc = 0.0;
        return result;
    }
    result.stage2_objective = sol.objective;
    result.stage2_trace = sol.outer_trace;
    result.slots.resize(k_n);
    for (int b = 0; b < k_n; ++b) result.slots[b] = sol.poses[b].slot;

    // downlink at the final poses
    ChannelRealization final_ch = realize(sensing.scene, sol.poses);
    EquivalentChannels hbar(k_n);
    for (int k = 0; k < k_n; ++k) {
        hbar[k].resize(static_cast<size_t>(k_n) * sc.n_feeds);
        for (int b = 0; b < k_n; ++b) {
            cvec h = equivalent_channel(final_ch, k, b, sol.poses[b], ctx.layout, sol.psi[b],
                                        ctx.em.data, sc.n_feeds);
            for (int q = 0; q < sc.n_feeds; ++q) hbar[k][b * sc.n_feeds + q] = h[q];
        }
    }
    if (sc.csi_noise_var > 0.0) {
        Rng rng_csi(Rng::derive(seed, 5));
        for (auto& row : hbar)
            for (auto& v : row) v += rng_csi.cnormal(sc.csi_noise_var);
    }

    IdetOptions opt;
    opt.p_tx = sc.p_tx();
    opt.r0 = sc.r0;
    opt.sigma0_sq = sc.sigma0_sq();
    opt.sigma_cov_sq = sc.sigma_cov_sq();
    opt.epsilon = sc.epsilon;
    opt.subgradient_iters = sc.subgradient_iters;
    try {
        IdetResult idet = optimize_idet(hbar, sc.eh_curve, opt);
        result.metrics = idet.metrics;
        result.rho = idet.state.rho;
        result.stage3_trace = idet.objective_trace;
    } catch (const InfeasibleError& e) {
        result.infeasible = true;
        result.infeasible_reason = e.what();
        result.metrics.min_eh_dc = 0.0;
        return result;
    }
    result.min_rate = result.metrics.rate.empty()
                          ? 0.0
                          : *std::min_element(result.metrics.rate.begin(),
                                              result.metrics.rate.end());
    result.min_eh_dc_eff = result.overhead_factor * result.metrics.min_eh_dc;
    return result;
}

const char* axis_name(SweepAxis a) {
    switch (a) {
        case SweepAxis::PTx: return "p_tx_dbm";
        case SweepAxis::R0: return "r0";
        case SweepAxis::DS: return "d_s_wl";
        case SweepAxis::KR: return "k_r_db";
        case SweepAxis::M: return "m_side";
        case SweepAxis::Q: return "q";
        case SweepAxis::RmseInjection: return "rmse_injection";
        case SweepAxis::None: return "none";
    }
    return "none";
}

SweepAxis axis_from_name(const std::string& name) {
    for (auto a : {SweepAxis::PTx, SweepAxis::R0, SweepAxis::DS, SweepAxis::KR, SweepAxis::M,
                   SweepAxis::Q, SweepAxis::RmseInjection, SweepAxis::None})
        if (name == axis_name(a)) return a;
    throw std::invalid_argument("unknown axis: " + name);
}

namespace {

Scenario apply_axis(const Scenario& base, SweepAxis axis, double value) {
    Scenario s = base;
    switch (axis) {
        case SweepAxis::PTx: s.p_tx_dbm = value; break;
        case SweepAxis::R0: s.r0 = value; break;
        case SweepAxis::DS: s.sense_spacing_wl = value; break;
        case SweepAxis::KR: s.rician_k = db_to_lin(value); break;
        case SweepAxis::M:
            s.m_x = static_cast<int>(value);
            s.m_y = static_cast<int>(value);
            break;
        case SweepAxis::Q: s.n_feeds = static_cast<int>(value); break;
        case SweepAxis::RmseInjection: s.rmse_injection = value; break;
        case SweepAxis::None: break;
    }
    return s;
}

SweepRow row_from_trial(const TrialResult& t, const std::string& axis, double axis_value) {
    SweepRow r;
    r.row_type = "trial";
    r.axis = axis;
    r.axis_value = axis_value;
    r.scheme = scheme_name(t.scheme);
    r.seed = t.seed;
    r.infeasible = t.infeasible ? 1 : 0;
    r.sensing_rmse = t.sensing_rmse;
    r.stage2_objective = t.stage2_objective;
    r.min_rate = t.min_rate;
    r.min_eh_dc = t.metrics.min_eh_dc;
    r.min_eh_dc_eff = t.min_eh_dc_eff;
    r.overhead_factor = t.overhead_factor;
    r.rho = t.rho;
    r.rate = t.metrics.rate;
    r.eh_dc = t.metrics.eh_dc;
    return r;
}

void append_aggregate(std::vector<SweepRow>& rows, const std::vector<SweepRow>& group) {
    if (group.empty()) return;
    SweepRow agg = group.front();
    agg.row_type = "aggregate";
    agg.trial = -1;
    agg.seed = 0;
    agg.n = static_cast<int>(group.size());
    double mean = 0.0, mean_eff = 0.0, mean_rmse = 0.0, mean_rate = 0.0, mean_obj = 0.0;
    int infeasible = 0;
    for (const auto& r : group) {
        mean += r.min_eh_dc;
        mean_eff += r.min_eh_dc_eff;
        mean_rmse += r.sensing_rmse;
        mean_rate += r.min_rate;
        mean_obj += r.stage2_objective;
        infeasible += r.infeasible;
    }
    const double n = static_cast<double>(group.size());
    mean /= n;
    mean_eff /= n;
    mean_rmse /= n;
    mean_rate /= n;
    mean_obj /= n;
    double var = 0.0;
    for (const auto& r : group) var += (r.min_eh_dc - mean) * (r.min_eh_dc - mean);
    double sd = group.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
    agg.min_eh_dc = mean;
    agg.min_eh_dc_eff = mean_eff;
    agg.sensing_rmse = mean_rmse;
    agg.min_rate = mean_rate;
    agg.stage2_objective = mean_obj;
    agg.infeasible = infeasible;
    agg.ci95_min_eh_dc = 1.96 * sd / std::sqrt(n);
    agg.rho.clear();
    agg.rate.clear();
    agg.eh_dc.clear();
    rows.push_back(agg);
}

}  // namespace

SweepResult sweep(const Scenario& scenario, SweepAxis axis, const std::vector<double>& values,
                  const std::vector<SchemeId>& schemes, int n_threads) {
    SweepResult result;
    result.n_rx = scenario.n_surfaces;
    std::vector<double> vals = values.empty() ? std::vector<double>{0.0} : values;
    for (double value : vals) {
        Scenario s = apply_axis(scenario, axis, value);
        ScenarioContext ctx = make_context(s);
        const int n_tr = s.trials;
        for (const auto scheme : schemes) {
            std::vector<TrialResult> trials(n_tr);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads( \
        n_threads > 0 ? n_threads : omp_get_max_threads())
#endif
            for (int t = 0; t < n_tr; ++t)
                trials[t] = run_protocol(ctx, scheme, trial_seed(s.master_seed, t));
            std::vector<SweepRow> group;
            for (int t = 0; t < n_tr; ++t) {
                SweepRow r = row_from_trial(trials[t], axis_name(axis), value);
                r.trial = t;
                group.push_back(r);
            }
            for (const auto& r : group) result.rows.push_back(r);
            append_aggregate(result.rows, group);
        }
    }
    return result;
}

SweepResult run_experiment(const ExperimentSpec& spec, int n_threads) {
    SweepResult merged;
    merged.n_rx = spec.scenario.n_surfaces;
    std::vector<double> outer =
        spec.values2.empty() ? std::vector<double>{0.0} : spec.values2;
    for (double v2 : outer) {
        Scenario s = spec.axis2 == SweepAxis::None ? spec.scenario
                                                   : apply_axis(spec.scenario, spec.axis2, v2);
        SweepResult part = sweep(s, spec.axis, spec.values, spec.schemes, n_threads);
        for (auto& r : part.rows) {
            r.axis2 = axis_name(spec.axis2);
            r.axis2_value = v2;
            merged.rows.push_back(r);
        }
    }
    return merged;
}

SweepResult::Aggregate SweepResult::aggregate(double axis_value, const std::string& scheme,
                                              bool effective) const {
    Aggregate out;
    double mean = 0.0;
    std::vector<double> vals;
    for (const auto& r : rows) {
        if (r.row_type != "trial" || r.scheme != scheme) continue;
        if (std::abs(r.axis_value - axis_value) > 1e-12) continue;
        vals.push_back(effective ? r.min_eh_dc_eff : r.min_eh_dc);
    }
    if (vals.empty()) return out;
    for (double v : vals) mean += v;
    mean /= static_cast<double>(vals.size());
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    double sd = vals.size() > 1 ? std::sqrt(var / (vals.size() - 1.0)) : 0.0;
    out.mean = mean;
    out.ci95 = 1.96 * sd / std::sqrt(static_cast<double>(vals.size()));
    out.n = static_cast<int>(vals.size());
    return out;
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::string SweepResult::to_csv() const {
    std::ostringstream out;
    out << "row_type,axis,axis_value,axis2,axis2_value,scheme,trial,seed,infeasible,"
           "sensing_rmse,stage2_objective,min_rate,min_eh_dc,min_eh_dc_eff,overhead_factor,"
           "ci95_min_eh_dc,n";
    for (int k = 0; k < n_rx; ++k) out << ",rho_" << k;
    for (int k = 0; k < n_rx; ++k) out << ",rate_" << k;
    for (int k = 0; k < n_rx; ++k) out << ",eh_dc_" << k;
    out << "\n";
    for (const auto& r : rows) {
        out << r.row_type << ',' << r.axis << ',' << fmt(r.axis_value) << ',' << r.axis2 << ','
            << fmt(r.axis2_value) << ',' << r.scheme << ',' << r.trial << ',' << r.seed << ','
            << r.infeasible << ',' << fmt(r.sensing_rmse) << ',' << fmt(r.stage2_objective)
            << ',' << fmt(r.min_rate) << ',' << fmt(r.min_eh_dc) << ',' << fmt(r.min_eh_dc_eff)
            << ',' << fmt(r.overhead_factor) << ',' << fmt(r.ci95_min_eh_dc) << ',' << r.n;
        for (int k = 0; k < n_rx; ++k)
            out << ',' << (k < static_cast<int>(r.rho.size()) ? fmt(r.rho[k]) : "");
        for (int k = 0; k < n_rx; ++k)
            out << ',' << (k < static_cast<int>(r.rate.size()) ? fmt(r.rate[k]) : "");
        for (int k = 0; k < n_rx; ++k)
            out << ',' << (k < static_cast<int>(r.eh_dc.size()) ? fmt(r.eh_dc[k]) : "");
        out << "\n";
    }
    return out.str();
}

ExperimentSpec experiment_preset(int figure, const Scenario& base) {
    ExperimentSpec spec;
    spec.scenario = base;
    switch (figure) {
        case 4:
            spec.axis = SweepAxis::PTx;
            spec.values = {30.0, 35.0, 40.0, 45.0};
            spec.schemes = {SchemeId::Proposed, SchemeId::RotationOnly,
                            SchemeId::TranslationOnly, SchemeId::Fpa};
            spec.name = "fig4";
            break;
        case 5:
            spec.axis = SweepAxis::R0;
            spec.values = {0.0, 2.0, 4.0, 6.0};
            spec.axis2 = SweepAxis::RmseInjection;
            spec.values2 = {0.0, 0.1, 0.17};
            spec.schemes = {SchemeId::Proposed};
            spec.name = "fig5";
            break;
        case 7:
            spec.axis = SweepAxis::DS;
            spec.values = {0.25, 0.5, 1.0};
            spec.schemes = {SchemeId::Proposed, SchemeId::LsSensing};
            spec.name = "fig7";
            break;
        case 9:
            spec.axis = SweepAxis::M;
            spec.values = {8.0, 12.0, 16.0};
            spec.axis2 = SweepAxis::Q;
            spec.values2 = {1.0, 4.0};
            spec.schemes = {SchemeId::Proposed};
            spec.name = "fig9";
            break;
        case 10:
            spec.axis = SweepAxis::KR;
            spec.values = {-4.0, -2.0, 0.0, 2.0, 4.0, 6.0, 8.0, 10.0};
            spec.schemes = {SchemeId::Proposed, SchemeId::PerfectCsi, SchemeId::LosOnly};
            spec.name = "fig10";
            break;
        default:
            throw std::invalid_argument("experiment_preset: no preset for figure " +
                                        std::to_string(figure));
    }
    return spec;
}

void write_experiment(const SweepResult& result, const ExperimentSpec& spec,
                      const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    std::filesystem::path dir(out_dir);
    {
        std::ofstream csv(dir / (spec.name + ".csv"));
        csv << result.to_csv();
    }
    json manifest;
    manifest["name"] = spec.name;
    manifest["version"] = kVersion;
    manifest["axis"] = axis_name(spec.axis);
    manifest["values"] = spec.values;
    manifest["axis2"] = axis_name(spec.axis2);
    manifest["values2"] = spec.values2;
    json sch = json::array();
    for (auto s : spec.schemes) sch.push_back(scheme_name(s));
    manifest["schemes"] = sch;
    manifest["trials"] = spec.scenario.trials;
    manifest["master_seed"] = spec.scenario.master_seed;
    json seeds = json::array();
    for (int t = 0; t < spec.scenario.trials; ++t)
        seeds.push_back(trial_seed(spec.scenario.master_seed, t));
    manifest["trial_seeds"] = seeds;
    manifest["config_hash"] = spec.scenario.config_hash();
    manifest["scenario"] = json::parse(spec.scenario.to_json());
    manifest["rows"] = result.rows.size();
    std::ofstream mf(dir / (spec.name + ".manifest.json"));
    mf << manifest.dump(2) << "\n";
}

std::string orientation_to_json(const OrientationSolution& sol) {
    json j;
    json poses = json::array();
    for (const auto& p : sol.poses) {
        json pose;
        pose["slot"] = p.slot;
        pose["position"] = {p.position.x, p.position.y, p.position.z};
        json rot = json::array();
        for (int r = 0; r < 3; ++r) rot.push_back({p.rotation(r, 0), p.rotation(r, 1),
                                                   p.rotation(r, 2)});
        pose["rotation"] = rot;
        poses.push_back(pose);
    }
    j["poses"] = poses;
    j["omega"] = sol.omega;
    json x = json::array();
    for (const auto& xk : sol.precoders) {
        json re = json::array(), im = json::array();
        for (const auto& v : xk) {
            re.push_back(v.real());
            im.push_back(v.imag());
        }
        x.push_back({{"re", re}, {"im", im}});
    }
    j["precoders"] = x;
    j["objective"] = sol.objective;
    j["outer_trace"] = sol.outer_trace;
    j["feasible"] = sol.feasibility.ok();
    return j.dump(2);
}

std::string trial_to_json(const TrialResult& t) {
    json j;
    j["scheme"] = scheme_name(t.scheme);
    j["seed"] = t.seed;
    j["infeasible"] = t.infeasible;
    if (t.infeasible) j["infeasible_reason"] = t.infeasible_reason;
    json est = json::array(), tru = json::array();
    for (const auto& f : t.estimates) est.push_back({f.x, f.y, f.z});
    for (const auto& f : t.truths) tru.push_back({f.x, f.y, f.z});
    j["estimates"] = est;
    j["truths"] = tru;
    j["sensing_rmse"] = t.sensing_rmse;
    j["stage2_objective"] = t.stage2_objective;
    j["slots"] = t.slots;
    j["rho"] = t.rho;
    j["sinr"] = t.metrics.sinr;
    j["rate"] = t.metrics.rate;
    j["eh_rf_w"] = t.metrics.eh_rf;
    j["eh_dc_w"] = t.metrics.eh_dc;
    j["min_eh_dc_w"] = t.metrics.min_eh_dc;
    j["min_eh_dc_eff_w"] = t.min_eh_dc_eff;
    j["overhead_factor"] = t.overhead_factor;
    j["min_rate"] = t.min_rate;
    return j.dump(2);
}

}  // namespace sixdmhs
