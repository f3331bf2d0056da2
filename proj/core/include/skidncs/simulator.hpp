#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "skidncs/norm_bounded_embedding.hpp"

namespace skidncs {

// ---- scenario parameter blocks -------------------------------------------

/// Fixed slip deviation on both tracks.
struct ConstantSlip {
    double d_mu_r = 0.0;
    double d_mu_l = 0.0;
};

/// Antiphase sinusoidal slip: the right track leads, the left track
/// mirrors it, which maximally excites the heading error.
struct SinusoidSlip {
    double amplitude = 0.0;
    double period = 1.0;  // s
};

/// Per-period random walk, one independent step per track per sampling
/// period, held constant within the period.
struct RandomWalkSlip {
    double step_size = 0.0;
};

using SlipProfile = std::variant<ConstantSlip, SinusoidSlip, RandomWalkSlip>;

struct ConstantDelay {
    double tau = 0.0;  // s; must lie within the delay bounds
};

struct UniformRandomDelay {};

/// Delay sweeping linearly between tau_min and tau_max and back.
struct TriangleWaveDelay {
    double period = 1.0;  // s
};

using DelayProfile = std::variant<ConstantDelay, UniformRandomDelay, TriangleWaveDelay>;

struct OpenLoop {};

/// du_k = -K xi_k, with xi_k assembled from the nonlinear plant's sampled
/// tracking error and the previous control increment.
struct StaticGain {
    Mat K;  // 2x5
};

using ControllerSpec = std::variant<OpenLoop, StaticGain>;

/// Full description of one co-simulation run. Everything downstream is a
/// deterministic function of this record (including the seed).
struct Scenario {
    RobotGeometry geometry;
    TrajectorySegment segment;
    DelayBounds bounds;
    TrackingError initial_error;
    double delta_mu_max = 0.2;  // slip deviations are clipped to +/- this
    int horizon_steps = 0;
    std::uint64_t seed = 0;
    SlipProfile slip_profile;
    DelayProfile delay_profile;
    ControllerSpec controller;
    int sim_substeps = 1000;  // integrator substeps per sampling period
};

/// Throws std::invalid_argument describing the first violated invariant.
void validate_scenario(const Scenario& sc);

/// Synchronized trajectories of the nonlinear plant, the lifted linear
/// model, and the norm-bounded model, all driven by the same delay, slip,
/// and control sequences. Row k holds the states at t_k and the inputs
/// applied over [t_k, t_{k+1}); the final row's inputs are the values the
/// next period would have used.
struct SimTrace {
    std::vector<double> t;
    std::vector<double> tau;
    std::vector<Vec2> d;      // slip deviation sampled at t_k
    std::vector<Vec2> du;     // control increment
    std::vector<TrackingError> e_nonlinear;
    std::vector<TrackingError> e_linear;
    std::vector<TrackingError> e_norm_bounded;
    std::vector<double> div_linear;        // |e_nl - e_lin|_2 per step
    std::vector<double> div_norm_bounded;  // |e_nl - e_nb|_2 per step

    size_t size() const { return t.size(); }
};

struct InputSequences {
    std::vector<double> delays;  // horizon_steps + 1 entries, substep-aligned
    std::vector<Vec2> slips;     // slip deviation at each t_k, clipped
};

/// Deterministic delay and slip sequences for the scenario. Delays are
/// quantized to the integration substep grid (so actuation instants are
/// exact) and stay within bounds; throws if no grid point falls inside
/// [tau_min, tau_max].
InputSequences sequence_generators(const Scenario& sc);

SimTrace run_scenario(const Scenario& sc);

/// Stabilizing static gain for the nominal lifted pair at the midpoint
/// hold interval, from a discrete Riccati fixed-point iteration with
/// identity weights. Throws for v_desired = 0 (the lateral error is
/// uncontrollable at standstill) or if the iteration fails to converge.
Mat default_gain(const LiftedSystem& sys);

}  // namespace skidncs
