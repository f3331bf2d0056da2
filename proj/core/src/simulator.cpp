#include "skidncs/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace skidncs {

namespace {

// Portable uniform draw in [0, 1): top 53 bits of the generator output.
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double clip(double v, double lo, double hi) { return std::min(hi, std::max(lo, v)); }

// Snaps tau onto the substep grid without leaving [tau_min, tau_max]
// (up to sub-ulp roundoff, which hold_interval tolerates).
double quantize_delay(double tau, const DelayBounds& b, double dt) {
    const auto g_min = static_cast<long long>(std::ceil(b.tau_min / dt - 1e-9));
    const auto g_max = static_cast<long long>(std::floor(b.tau_max / dt + 1e-9));
    if (g_min > g_max) {
        throw std::invalid_argument(
            "sequence_generators: no substep boundary falls inside the delay bounds; "
            "increase sim_substeps");
    }
    const long long g = std::clamp(std::llround(tau / dt), g_min, g_max);
    return static_cast<double>(g) * dt;
}

// Continuous slip deviation signal driving the nonlinear plant. The
// random-walk profile is inherently per-period and is passed in as the
// sampled sequence.
struct SlipEvaluator {
    const Scenario& sc;
    const std::vector<Vec2>& sampled;

    Vec2 deviation_at(double t, int period_index) const {
        const double lim = sc.delta_mu_max;
        if (const auto* c = std::get_if<ConstantSlip>(&sc.slip_profile)) {
            return Vec2{clip(c->d_mu_r, -lim, lim), clip(c->d_mu_l, -lim, lim)};
        }
        if (const auto* s = std::get_if<SinusoidSlip>(&sc.slip_profile)) {
            const double w = 2.0 * std::numbers::pi / s->period;
            const double v = s->amplitude * std::sin(w * t);
            return Vec2{clip(v, -lim, lim), clip(-v, -lim, lim)};
        }
        return sampled[static_cast<size_t>(period_index)];
    }
};

Vec2 controller_output(const ControllerSpec& controller, const TrackingError& e_sampled,
                       const Vec2& du_prev) {
    if (std::holds_alternative<OpenLoop>(controller)) {
        return Vec2{0.0, 0.0};
    }
    const Mat& k = std::get<StaticGain>(controller).K;
    const Mat xi = to_vector(LiftedState{e_sampled, du_prev});
    const Mat du = -(k * xi);
    return Vec2{du(0, 0), du(1, 0)};
}

double error_distance(const TrackingError& a, const TrackingError& b) {
    const double dx = a.e_x - b.e_x;
    const double dy = a.e_y - b.e_y;
    const double dth = a.e_theta - b.e_theta;
    return std::sqrt(dx * dx + dy * dy + dth * dth);
}

}  // namespace

void validate_scenario(const Scenario& sc) {
    coupling_matrix(sc.geometry);  // geometry invariants
    if (!std::isfinite(sc.segment.v_desired)) {
        throw std::invalid_argument("scenario: v_desired must be finite");
    }
    if (!(sc.delta_mu_max >= 0.0) || sc.delta_mu_max >= 1.0) {
        throw std::invalid_argument(
            "scenario: delta_mu_max must lie in [0, 1) so that mu = 1 + d stays positive");
    }
    if (sc.horizon_steps < 1) {
        throw std::invalid_argument("scenario: horizon_steps must be >= 1");
    }
    if (sc.sim_substeps < 1) {
        throw std::invalid_argument("scenario: sim_substeps must be >= 1");
    }
    if (const auto* c = std::get_if<ConstantDelay>(&sc.delay_profile)) {
        if (c->tau < sc.bounds.tau_min || c->tau > sc.bounds.tau_max) {
            throw std::invalid_argument("scenario: constant delay outside the bounds");
        }
    }
    if (const auto* t = std::get_if<TriangleWaveDelay>(&sc.delay_profile)) {
        if (!(t->period > 0.0)) {
            throw std::invalid_argument("scenario: triangle wave period must be > 0");
        }
    }
    if (const auto* s = std::get_if<SinusoidSlip>(&sc.slip_profile)) {
        if (!(s->period > 0.0)) {
            throw std::invalid_argument("scenario: sinusoid period must be > 0");
        }
    }
    if (const auto* w = std::get_if<RandomWalkSlip>(&sc.slip_profile)) {
        if (!(w->step_size >= 0.0)) {
            throw std::invalid_argument("scenario: random walk step size must be >= 0");
        }
    }
    if (const auto* g = std::get_if<StaticGain>(&sc.controller)) {
        if (g->K.rows() != 2 || g->K.cols() != 5) {
            throw std::invalid_argument("scenario: controller gain must be 2x5");
        }
    }
}

InputSequences sequence_generators(const Scenario& sc) {
    validate_scenario(sc);
    const int n = sc.horizon_steps;
    const double ts = sc.bounds.sample_time_Ts;
    const double dt = ts / sc.sim_substeps;
    const double lim = sc.delta_mu_max;

    std::mt19937_64 rng_delay(sc.seed);
    std::mt19937_64 rng_slip(sc.seed ^ 0x9E3779B97F4A7C15ULL);

    InputSequences seq;
    seq.delays.reserve(static_cast<size_t>(n) + 1);
    seq.slips.reserve(static_cast<size_t>(n) + 1);

    for (int k = 0; k <= n; ++k) {
        const double t_k = k * ts;
        double tau = sc.bounds.tau_min;
        if (const auto* c = std::get_if<ConstantDelay>(&sc.delay_profile)) {
            tau = c->tau;
        } else if (std::holds_alternative<UniformRandomDelay>(sc.delay_profile)) {
            tau = sc.bounds.tau_min +
                  (sc.bounds.tau_max - sc.bounds.tau_min) * uniform01(rng_delay);
        } else if (const auto* w = std::get_if<TriangleWaveDelay>(&sc.delay_profile)) {
            const double phase = std::fmod(t_k, w->period) / w->period;
            const double tri = phase < 0.5 ? 2.0 * phase : 2.0 * (1.0 - phase);
            tau = sc.bounds.tau_min + (sc.bounds.tau_max - sc.bounds.tau_min) * tri;
        }
        seq.delays.push_back(quantize_delay(tau, sc.bounds, dt));
    }

    Vec2 walk{0.0, 0.0};
    for (int k = 0; k <= n; ++k) {
        const double t_k = k * ts;
        if (const auto* w = std::get_if<RandomWalkSlip>(&sc.slip_profile)) {
            if (k > 0) {
                walk[0] = clip(walk[0] + w->step_size * (2.0 * uniform01(rng_slip) - 1.0),
                               -lim, lim);
                walk[1] = clip(walk[1] + w->step_size * (2.0 * uniform01(rng_slip) - 1.0),
                               -lim, lim);
            }
            seq.slips.push_back(walk);
        } else {
            seq.slips.push_back(SlipEvaluator{sc, seq.slips}.deviation_at(t_k, k));
        }
    }
    return seq;
}

SimTrace run_scenario(const Scenario& sc) {
    validate_scenario(sc);
    const int n = sc.horizon_steps;
    const double ts = sc.bounds.sample_time_Ts;
    const double dt = ts / sc.sim_substeps;

    const InputSequences seq = sequence_generators(sc);
    const SlipEvaluator plant_slip{sc, seq.slips};

    const LinearErrorModel model = build_linear_model(sc.segment, sc.geometry);
    const LiftedSystem sys{model, sc.bounds};
    const NormBoundedModel nb = build_embedding(sys);
    const ControlInput u_nominal{sc.segment.v_desired, 0.0};

    // Initial world pose realizing the initial error: the segment-frame
    // desired pose at t = 0 is the origin, so the error is the pose in L.
    Pose q = from_segment_frame(
        Pose{sc.initial_error.e_x, sc.initial_error.e_y, sc.initial_error.e_theta},
        sc.segment);
    LiftedState xi_lin{sc.initial_error, Vec2{0.0, 0.0}};
    LiftedState xi_nb = xi_lin;
    Vec2 du_prev{0.0, 0.0};

    SimTrace trace;
    const size_t rows = static_cast<size_t>(n) + 1;
    trace.t.reserve(rows);
    trace.tau.reserve(rows);
    trace.d.reserve(rows);
    trace.du.reserve(rows);
    trace.e_nonlinear.reserve(rows);
    trace.e_linear.reserve(rows);
    trace.e_norm_bounded.reserve(rows);
    trace.div_linear.reserve(rows);
    trace.div_norm_bounded.reserve(rows);

    for (int k = 0; k <= n; ++k) {
        const double t_k = k * ts;
        const double tau_k = seq.delays[static_cast<size_t>(k)];
        const Vec2 d_k = seq.slips[static_cast<size_t>(k)];

        const TrackingError e_nl = tracking_error(q, sc.segment, t_k);
        const Vec2 du_k = controller_output(sc.controller, e_nl, du_prev);

        trace.t.push_back(t_k);
        trace.tau.push_back(tau_k);
        trace.d.push_back(d_k);
        trace.du.push_back(du_k);
        trace.e_nonlinear.push_back(e_nl);
        trace.e_linear.push_back(xi_lin.e);
        trace.e_norm_bounded.push_back(xi_nb.e);
        trace.div_linear.push_back(error_distance(e_nl, xi_lin.e));
        trace.div_norm_bounded.push_back(error_distance(e_nl, xi_nb.e));

        if (k == n) break;

        // Nonlinear plant: the fresh command becomes active at t_k + tau_k;
        // slip varies continuously inside the period for time-based profiles.
        ControlSchedule schedule;
        const ControlInput u_old{u_nominal.v + du_prev[0], u_nominal.omega + du_prev[1]};
        const ControlInput u_new{u_nominal.v + du_k[0], u_nominal.omega + du_k[1]};
        if (tau_k == 0.0) {
            schedule = ControlSchedule::constant(u_new);
        } else if (tau_k >= ts) {
            schedule = ControlSchedule::constant(u_old);
        } else {
            schedule.switch_times = {tau_k};
            schedule.values = {u_old, u_new};
        }
        const SlipSignal slip_fn = [&](double local_t) {
            const Vec2 dev = plant_slip.deviation_at(t_k + local_t, k);
            return SlipState{1.0 + dev[0], 1.0 + dev[1]};
        };
        q = integrate_pose(q, schedule, slip_fn, sc.geometry, ts, dt).back();

        // Discrete models: same tau, slip sample, and control increment.
        const double h_k = hold_interval(sc.bounds, tau_k);
        const SlipDeviation d_dev{d_k[0], d_k[1]};
        xi_lin = lifted_step(sys, xi_lin, du_k, d_dev, h_k);
        xi_nb = uncertain_step(nb, xi_nb, du_k, d_dev, delta_for_hold(nb, h_k));

        du_prev = du_k;
    }
    return trace;
}

Mat default_gain(const LiftedSystem& sys) {
    if (sys.model.v_desired == 0.0) {
        throw std::invalid_argument(
            "default_gain: the lateral error is uncontrollable at v_desired = 0; "
            "no stabilizing gain exists");
    }
    const double h_nom =
        sys.bounds.sample_time_Ts - (sys.bounds.tau_min + sys.bounds.tau_max) / 2.0;
    const LiftedMatrices lm = lifted_matrices(sys, h_nom);
    const Mat& a = lm.A_tilde;
    const Mat& b = lm.B_tilde;
    const Mat at = a.transposed();
    const Mat bt = b.transposed();
    const Mat q_weight = Mat::identity(5);
    const Mat r_weight = Mat::identity(2);

    Mat p = Mat::identity(5);
    const int max_iter = 10000;
    for (int iter = 0; iter < max_iter; ++iter) {
        const Mat s = r_weight + bt * p * b;
        const Mat k = inverse2(s) * (bt * p * a);
        Mat p_next = q_weight + at * p * (a - b * k);
        // Keep the iterate symmetric against roundoff drift.
        p_next = (p_next + p_next.transposed()) * 0.5;
        const double delta = (p_next - p).max_abs();
        p = p_next;
        if (delta < 1e-10) {
            return inverse2(r_weight + bt * p * b) * (bt * p * a);
        }
    }
    throw std::runtime_error("default_gain: Riccati iteration did not converge");
}

}  // namespace skidncs
