// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sixdmhs/orientation.hpp"
#include "sixdmhs/scenario.hpp"

namespace sixdmhs {

// Per-scenario precomputation shared by every trial: the optimized feed
// layout, EM response, slot table and initial arrangement.
struct ScenarioContext {
    Scenario scenario;
    SurfaceLayout layout;        // with optimized feeds
    EmResponse em;
    Vec3 max_gain_local;         // u_bar
    double max_gain_value = 0.0;
    std::vector<Vec3> slot_table;
    std::vector<SurfacePose> initial_poses;  // slots 0..B-1, radial rotations
    SensingLayout sensing;
};

ScenarioContext make_context(const Scenario& scenario);

// Greedy distinct-slot assignment pointing each surface at its receiver.
std::vector<int> aim_aligned_slots(const std::vector<Vec3>& slot_table,
                                   const std::vector<Vec3>& sensed_dirs);

struct TrialResult {
    SchemeId scheme = SchemeId::Proposed;
    uint64_t seed = 0;
    bool infeasible = false;
    std::string infeasible_reason;
    std::vector<Vec3> estimates;      // sensed global direction per receiver
    std::vector<Vec3> truths;         // strongest-path direction per receiver
    double sensing_rmse = 0.0;        // per-trial mean |f_e - f_t|^2
    double stage2_objective = 0.0;
    std::vector<int> slots;
    IdetMetrics metrics;
    rvec rho;
    double min_rate = 0.0;
    double overhead_factor = 1.0;
    double min_eh_dc_eff = 0.0;
    rvec stage2_trace;                // Algorithm 2 outer objective
    rvec stage3_trace;                // Algorithm 3 objective
};

TrialResult run_protocol(const ScenarioContext& ctx, SchemeId scheme, uint64_t trial_seed);

// seed for trial `t` under master seed `m`; shared across schemes/axis values
// so trials are matched
uint64_t trial_seed(uint64_t master, int trial);

enum class SweepAxis : uint8_t { PTx, R0, DS, KR, M, Q, RmseInjection, None };

const char* axis_name(SweepAxis a);
SweepAxis axis_from_name(const std::string& name);

struct SweepRow {
    std::string row_type;  // "trial" or "aggregate"
    std::string axis;
    double axis_value = 0.0;
    std::string axis2 = "none";
    double axis2_value = 0.0;
    std::string scheme;
    int trial = -1;
    uint64_t seed = 0;
    int infeasible = 0;
    double sensing_rmse = 0.0;
    double stage2_objective = 0.0;
    double min_rate = 0.0;
    double min_eh_dc = 0.0;
    double min_eh_dc_eff = 0.0;
    double overhead_factor = 1.0;
    double ci95_min_eh_dc = 0.0;  // aggregate rows only
    int n = 1;
    rvec rho;
    rvec rate;
    rvec eh_dc;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    int n_rx = 0;

    std::string to_csv() const;
    // mean / CI of min_eh_dc over trial rows matching (axis value, scheme)
    struct Aggregate {
        double mean = 0.0;
        double ci95 = 0.0;
        int n = 0;
    };
    Aggregate aggregate(double axis_value, const std::string& scheme,
                        bool effective = false) const;
};

SweepResult sweep(const Scenario& scenario, SweepAxis axis, const std::vector<double>& values,
                  const std::vector<SchemeId>& schemes, int n_threads = 0);

// Figure presets; each fills the axis/value/scheme triple and may adjust the
// scenario geometry. An optional second axis loops outside the first.
struct ExperimentSpec {
    Scenario scenario;
    SweepAxis axis = SweepAxis::None;
    std::vector<double> values;
    SweepAxis axis2 = SweepAxis::None;
    std::vector<double> values2;
    std::vector<SchemeId> schemes;
    std::string name;
};

ExperimentSpec experiment_preset(int figure, const Scenario& base);

SweepResult run_experiment(const ExperimentSpec& spec, int n_threads = 0);

// Sensing-only slice of the protocol (Stage I), reused by run_protocol.
struct SensingOutcome {
    std::vector<AngleEstimate> estimates;
    std::vector<Vec3> truths;
    double rmse_term = 0.0;
    ChannelScene scene;
};

SensingOutcome run_sensing(const ScenarioContext& ctx, SchemeId scheme, uint64_t seed);

// Writes <name>.csv and <name>.manifest.json under out_dir.
void write_experiment(const SweepResult& result, const ExperimentSpec& spec,
                      const std::string& out_dir);

std::string orientation_to_json(const OrientationSolution& sol);
std::string trial_to_json(const TrialResult& result);

}  // namespace sixdmhs
