// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: sensing, orientation and transmission stages of the
// protocol, the figure experiment suite and gain-map export.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "sixdmhs/harness.hpp"

namespace fs = std::filesystem;
using namespace sixdmhs;

namespace {

struct CommonArgs {
    std::string scenario_path;
    std::string out_dir = "results";
    std::string scheme = "proposed";
    uint64_t seed = 0;
    bool seed_set = false;
    int trials = 0;
    bool paper_scale = false;
};

Scenario load_scenario(const CommonArgs& args) {
    Scenario s;
    if (!args.scenario_path.empty()) s = Scenario::load(args.scenario_path);
    if (args.seed_set) s.master_seed = args.seed;
    if (args.trials > 0) s.trials = args.trials;
    if (args.paper_scale) s.apply_paper_scale();
    return s;
}

void add_common(CLI::App* cmd, CommonArgs& args, bool with_scheme = true) {
    cmd->add_option("--scenario", args.scenario_path, "scenario JSON file");
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--seed", args.seed, "override the master seed")
        ->each([&args](const std::string&) { args.seed_set = true; });
    cmd->add_option("--trials", args.trials, "override the trial count");
    cmd->add_flag("--paper-scale", args.paper_scale, "use the 32x32 / 50-slot configuration");
    if (with_scheme) cmd->add_option("--scheme", args.scheme, "scheme to run");
}

void write_text(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path().string());
    std::ofstream out(path);
    out << text;
    if (text.empty() || text.back() != '\n') out << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"6D movable holographic surface IDET simulator"};
    app.require_subcommand(1);

    CommonArgs sense_args, orient_args, transmit_args, exp_args, gain_args;

    auto* cmd_sense = app.add_subcommand("sense", "run the uplink sensing stage");
    add_common(cmd_sense, sense_args);

    auto* cmd_orient = app.add_subcommand("orient", "run sensing + orientation optimization");
    add_common(cmd_orient, orient_args);

    auto* cmd_transmit =
        app.add_subcommand("transmit", "run the full three-stage protocol for one trial");
    add_common(cmd_transmit, transmit_args);

    auto* cmd_exp = app.add_subcommand("experiment", "run a figure experiment sweep");
    int figure = 0;
    std::string manifest_path, axis_str;
    std::vector<double> axis_values;
    std::vector<std::string> scheme_names;
    cmd_exp->add_option("--fig", figure, "figure preset (4, 5, 7, 9, 10)");
    cmd_exp->add_option("--manifest", manifest_path, "re-run from a manifest file");
    cmd_exp->add_option("--axis", axis_str, "sweep axis for a custom experiment");
    cmd_exp->add_option("--values", axis_values, "axis values");
    cmd_exp->add_option("--schemes", scheme_names, "schemes for a custom experiment");
    add_common(cmd_exp, exp_args, false);

    auto* cmd_gain = app.add_subcommand("gainmap", "export the sampled gain profile as CSV");
    int gain_theta = 181, gain_phi = 91;
    bool gain_check = false;
    cmd_gain->add_option("--theta-samples", gain_theta, "azimuth sample count");
    cmd_gain->add_option("--phi-samples", gain_phi, "elevation sample count");
    cmd_gain->add_flag("--check", gain_check, "cross-check compact vs expanded gain forms");
    add_common(cmd_gain, gain_args, false);

    try {
        app.parse(argc, argv);

        if (*cmd_sense) {
            Scenario s = load_scenario(sense_args);
            ScenarioContext ctx = make_context(s);
            SensingOutcome out = run_sensing(ctx, scheme_from_name(sense_args.scheme),
                                             trial_seed(s.master_seed, 0));
            nlohmann::json j;
            nlohmann::json est = nlohmann::json::array();
            for (size_t k = 0; k < out.estimates.size(); ++k) {
                const auto& e = out.estimates[k];
                est.push_back({{"f_global", {e.f_global.x, e.f_global.y, e.f_global.z}},
                               {"surface", e.surface},
                               {"bin_x", e.bin_x},
                               {"bin_y", e.bin_y},
                               {"peak", e.peak},
                               {"truth",
                                {out.truths[k].x, out.truths[k].y, out.truths[k].z}}});
            }
            j["estimates"] = est;
            j["rmse_term"] = out.rmse_term;
            write_text(fs::path(sense_args.out_dir) / "estimates.json", j.dump(2));
            std::cout << "estimates written to " << sense_args.out_dir << "/estimates.json\n";
        } else if (*cmd_orient) {
            Scenario s = load_scenario(orient_args);
            ScenarioContext ctx = make_context(s);
            SchemeId scheme = scheme_from_name(orient_args.scheme);
            uint64_t seed = trial_seed(s.master_seed, 0);
            SensingOutcome sensing = run_sensing(ctx, scheme, seed);
            OrientationProblem problem;
            problem.sensed_dirs.resize(sensing.estimates.size());
            for (size_t k = 0; k < sensing.estimates.size(); ++k)
                problem.sensed_dirs[k] = sensing.estimates[k].f_global;
            problem.max_gain_local = ctx.max_gain_local;
            problem.slot_table = ctx.slot_table;
            problem.layout = ctx.layout;
            problem.em = ctx.em;
            problem.wavelength = s.wavelength();
            problem.efficiency = s.efficiency;
            problem.p_tx = s.p_tx();
            problem.d_min = s.d_min;
            problem.initial_poses = ctx.initial_poses;
            problem.initial_slots = aim_aligned_slots(ctx.slot_table, problem.sensed_dirs);
            problem.subgradient_iters = s.subgradient_iters;
            problem.epsilon = s.epsilon;
            OrientationSolution sol = optimize_orientation(problem);
            write_text(fs::path(orient_args.out_dir) / "orientation.json",
                       orientation_to_json(sol));
            std::cout << "orientation written to " << orient_args.out_dir
                      << "/orientation.json (objective " << sol.objective << ")\n";
        } else if (*cmd_transmit) {
            Scenario s = load_scenario(transmit_args);
            ScenarioContext ctx = make_context(s);
            TrialResult t = run_protocol(ctx, scheme_from_name(transmit_args.scheme),
                                         trial_seed(s.master_seed, 0));
            write_text(fs::path(transmit_args.out_dir) / "metrics.json", trial_to_json(t));
            std::cout << "metrics written to " << transmit_args.out_dir << "/metrics.json\n";
            if (t.infeasible) {
                std::cerr << "infeasible: " << t.infeasible_reason << "\n";
                return 2;
            }
        } else if (*cmd_exp) {
            ExperimentSpec spec;
            if (!manifest_path.empty()) {
                std::ifstream in(manifest_path);
                if (!in) throw std::runtime_error("cannot open manifest: " + manifest_path);
                nlohmann::json mj = nlohmann::json::parse(in);
                spec.scenario = Scenario::from_json(mj["scenario"].dump());
                spec.axis = axis_from_name(mj["axis"].get<std::string>());
                spec.values = mj["values"].get<std::vector<double>>();
                spec.axis2 = axis_from_name(mj["axis2"].get<std::string>());
                spec.values2 = mj["values2"].get<std::vector<double>>();
                for (const auto& n : mj["schemes"])
                    spec.schemes.push_back(scheme_from_name(n.get<std::string>()));
                spec.name = mj["name"].get<std::string>();
                if (exp_args.trials > 0) spec.scenario.trials = exp_args.trials;
            } else if (figure > 0) {
                spec = experiment_preset(figure, load_scenario(exp_args));
            } else if (!axis_str.empty()) {
                spec.scenario = load_scenario(exp_args);
                spec.axis = axis_from_name(axis_str);
                spec.values = axis_values;
                for (const auto& n : scheme_names)
                    spec.schemes.push_back(scheme_from_name(n));
                if (spec.schemes.empty()) spec.schemes = spec.scenario.schemes;
                spec.name = "sweep_" + axis_str;
            } else {
                throw CLI::ValidationError("experiment",
                                           "one of --fig, --manifest or --axis is required");
            }
            SweepResult result = run_experiment(spec);
            write_experiment(result, spec, exp_args.out_dir);
            std::cout << spec.name << ": " << result.rows.size() << " rows written to "
                      << exp_args.out_dir << "/" << spec.name << ".csv\n";
        } else if (*cmd_gain) {
            Scenario s = load_scenario(gain_args);
            ScenarioContext ctx = make_context(s);
            RhsParams params{s.efficiency, s.refractive, s.f_c};
            rvec weights(s.n_feeds, 1.0 / s.n_feeds);
            GainProfile profile =
                sample_gain_profile(ctx.layout, params, weights, gain_theta, gain_phi);
            std::ostringstream csv;
            csv << "theta,phi,gain\n";
            for (const auto& g : profile.samples) {
                char buf[96];
                std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", g.theta, g.phi, g.gain);
                csv << buf;
            }
            write_text(fs::path(gain_args.out_dir) / "gainmap.csv", csv.str());
            std::cout << "gain map written to " << gain_args.out_dir
                      << "/gainmap.csv (max gain " << profile.max_gain << " at theta "
                      << profile.argmax.theta << ", phi " << profile.argmax.phi
                      << ", anisotropy " << profile.anisotropy() << ")\n";
            if (gain_check) {
                SurfacePose origin_pose;
                Rng rng(s.search_seed);
                double worst = 0.0;
                for (int i = 0; i < 20; ++i) {
                    Angles con{rng.uniform(-kPi, kPi), rng.uniform(0.0, kPi / 2)};
                    Angles ev{rng.uniform(-kPi, kPi), rng.uniform(0.0, kPi / 2)};
                    cvec a_con = steering(origin_pose, ctx.layout, con.theta, con.phi,
                                          s.wavelength());
                    cvec a_ev =
                        steering(origin_pose, ctx.layout, ev.theta, ev.phi, s.wavelength());
                    HoloBeamformer hb = holo_beamformer(a_con, ctx.em, weights, s.efficiency);
                    double compact = beam_gain(hb.psi, ctx.em, a_ev);
                    double expanded =
                        beam_gain_expanded(ctx.layout, params, origin_pose, weights, con, ev)
                            .total();
                    worst = std::max(worst, std::abs(compact - expanded));
                }
                std::cout << "compact vs expanded gain: max |delta| = " << worst << "\n";
            }
        }
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
