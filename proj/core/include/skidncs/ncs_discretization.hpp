#pragma once

#include "skidncs/error_linearization.hpp"
#include "skidncs/matrix.hpp"

namespace skidncs {

/// Delay range of the networked loop relative to the sampling period.
/// Restricted to 0 <= tau_min <= tau_max <= Ts, so a control update
/// computed from the sample at t_k reaches the actuator within the same
/// period and the input changes at most once per period. The constructor
/// enforces the restriction.
struct DelayBounds {
    DelayBounds(double tau_min, double tau_max, double sample_time_Ts);

    double tau_min;         // s
    double tau_max;         // s
    double sample_time_Ts;  // s

    double hold_min() const { return sample_time_Ts - tau_max; }
    double hold_max() const { return sample_time_Ts - tau_min; }
};

/// Discrete state of the delayed loop: the tracking error stacked with the
/// previous control increment, dimension 3 + 2 = 5.
struct LiftedState {
    TrackingError e;
    Vec2 du_prev{0.0, 0.0};
};

Mat to_vector(const LiftedState& xi);           // 5x1
LiftedState lifted_state_from(const Mat& xi);   // from 5x1

/// The delay-parametric discrete-time family over the hold interval
/// h = Ts - tau in [hold_min, hold_max].
struct LiftedSystem {
    LinearErrorModel model;
    DelayBounds bounds;
};

/// Total loop delay: sensor-to-controller + controller-to-actuator +
/// computation. Each component must be >= 0.
double combine_delays(double tau_sc, double tau_ca, double tau_c);

/// Time the fresh control acts within the period: h = Ts - tau_k.
/// tau_k must lie within the bounds.
double hold_interval(const DelayBounds& bounds, double tau_k);

/// Integral of the state transition over [0, h] applied to an input
/// matrix: (h*I + h^2/2 * A) * input. Exact because A*A = 0.
Mat zoh_integral(const LinearErrorModel& model, double h, const Mat& input_matrix);

struct LiftedMatrices {
    Mat A_tilde;    // 5x5, bottom two rows zero
    Mat B_tilde;    // 5x2, bottom block I2
    Mat B_tilde_D;  // 5x2, bottom block zero
};

/// One-period transition matrices at hold interval h:
///
///   A~(h) = [ e^{A Ts}   int_h^Ts e^{As} ds B ]     B~(h) = [ int_0^h e^{As} ds B ]
///           [    0               0          ]              [          I          ]
///
///   B~_D  = [ int_0^Ts e^{As} ds B_D ; 0 ]   (independent of h)
///
/// Throws if h lies outside [hold_min, hold_max].
LiftedMatrices lifted_matrices(const LiftedSystem& sys, double h);

/// xi_{k+1} = A~(h) xi_k + B~(h) du_k + B~_D d_k. The du_prev block of the
/// result equals du_k exactly.
LiftedState lifted_step(const LiftedSystem& sys, const LiftedState& xi, const Vec2& du_k,
                        const SlipDeviation& d_k, double h);

}  // namespace skidncs
