// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "sixdmhs/channel.hpp"
#include "sixdmhs/geometry.hpp"
#include "sixdmhs/rhs.hpp"

namespace sixdmhs {

enum class RotationPolicy : uint8_t {
    SensingAligned,  // max-gain direction onto the sensed direction
    Radial,          // surface normal along q_b / |q_b|
    FixedInitial,    // keep the initial rotation
};

struct OrientationProblem {
    std::vector<Vec3> sensed_dirs;       // unit direction per receiver, K = B
    Vec3 max_gain_local;                 // u_bar, local frame
    std::vector<Vec3> slot_table;
    SurfaceLayout layout;
    EmResponse em;
    double wavelength = 0.01;
    double efficiency = 1.0;
    double p_tx = 10.0;
    double d_min = 0.25;
    RotationPolicy rotation_policy = RotationPolicy::SensingAligned;
    std::vector<SurfacePose> initial_poses;
    std::vector<int> initial_slots;      // indices into slot_table; -1 = keep initial position
    bool optimize_slots = true;
    double epsilon = 1e-4;
    int max_outer = 15;
    int max_inner = 25;
    int subgradient_iters = 2000;
    double subgradient_tol = 1e-6;
};

struct OrientationState {
    std::vector<int> slots;              // -1 = off-table fixed position
    std::vector<SurfacePose> poses;
    std::vector<rvec> omega;             // feed weights per surface
    std::vector<cvec> precoders;         // X_k, length B*Q
    std::vector<cvec> zeta;              // FP auxiliaries, length K
};

struct OrientationSolution {
    std::vector<SurfacePose> poses;
    std::vector<rvec> omega;
    std::vector<rvec> psi;               // final holographic beamformers
    std::vector<cvec> precoders;         // Stage-II precoders (auxiliary)
    double objective = 0.0;              // min_k power gain at the sensed directions
    rvec outer_trace;
    rvec inner_surrogate_trace;
    long slot_candidates = 0;            // Algorithm 1 candidate evaluations
    int sweeps = 0;
    FeasibilityReport feasibility;
};

// Pose of surface b under the problem's rotation policy at the given position.
SurfacePose pose_for(const OrientationProblem& problem, int b, const Vec3& position, int slot);

std::vector<Mat3> rotations_from_sensing(const Vec3& max_gain_local,
                                         const std::vector<Vec3>& sensed_dirs);

// min_k sum_k' | sum_b a_b(f_k)^T diag(Psi_b) Theta_b X_k',b |^2
double gain_objective(const OrientationProblem& problem, const OrientationState& state);

// Algorithm 1: greedy slot sweeps, accepting strictly improving feasible moves.
// Returns the number of candidate evaluations.
long select_slots(const OrientationProblem& problem, OrientationState& state, int* sweeps);

// Algorithm 2 inner loop: alternating X / omega / zeta updates on the
// quadratic-transform surrogate. Appends the surrogate value per cycle.
void fp_refine(const OrientationProblem& problem, OrientationState& state,
               rvec* surrogate_trace);

// Algorithm 2: alternates select_slots and fp_refine until the true objective
// settles. The returned solution passes check_feasible when slot optimization
// is enabled; otherwise the report is informational.
OrientationSolution optimize_orientation(const OrientationProblem& problem);

}  // namespace sixdmhs
