#include "skidncs/ncs_discretization.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace skidncs {

DelayBounds::DelayBounds(double tau_min_in, double tau_max_in, double sample_time)
    : tau_min(tau_min_in), tau_max(tau_max_in), sample_time_Ts(sample_time) {
    if (!std::isfinite(tau_min) || !std::isfinite(tau_max) || !std::isfinite(sample_time_Ts)) {
        throw std::invalid_argument("DelayBounds: values must be finite");
    }
    if (!(sample_time_Ts > 0.0)) {
        throw std::invalid_argument("DelayBounds: sample time must be > 0");
    }
    if (!(0.0 <= tau_min && tau_min <= tau_max && tau_max <= sample_time_Ts)) {
        throw std::invalid_argument(
            "DelayBounds: need 0 <= tau_min <= tau_max <= Ts (single-period delays)");
    }
}

Mat to_vector(const LiftedState& xi) {
    return Mat::column({xi.e.e_x, xi.e.e_y, xi.e.e_theta, xi.du_prev[0], xi.du_prev[1]});
}

LiftedState lifted_state_from(const Mat& xi) {
    if (xi.rows() != 5 || xi.cols() != 1) {
        throw std::invalid_argument("lifted_state_from: expected a 5x1 vector");
    }
    return LiftedState{TrackingError{xi(0, 0), xi(1, 0), xi(2, 0)},
                       Vec2{xi(3, 0), xi(4, 0)}};
}

double combine_delays(double tau_sc, double tau_ca, double tau_c) {
    if (!(tau_sc >= 0.0) || !(tau_ca >= 0.0) || !(tau_c >= 0.0)) {
        throw std::invalid_argument("combine_delays: delay components must be >= 0");
    }
    return tau_sc + tau_ca + tau_c;
}

double hold_interval(const DelayBounds& bounds, double tau_k) {
    // Tolerance absorbs the sub-ulp overshoot of grid-quantized delays.
    const double tol = 1e-9 * bounds.sample_time_Ts;
    if (tau_k < bounds.tau_min - tol || tau_k > bounds.tau_max + tol) {
        throw std::invalid_argument("hold_interval: tau_k = " + std::to_string(tau_k) +
                                    " outside [tau_min, tau_max]");
    }
    return bounds.sample_time_Ts - tau_k;
}

Mat zoh_integral(const LinearErrorModel& model, double h, const Mat& input_matrix) {
    if (!(h >= 0.0)) {
        throw std::invalid_argument("zoh_integral: h must be >= 0");
    }
    const Mat scaled = Mat::identity(3) * h + model.A * (h * h / 2.0);
    return scaled * input_matrix;
}

namespace {

// Integral of e^{As} over [h0, h1] applied to an input matrix; exact for
// the nilpotent A.
Mat zoh_integral_over(const LinearErrorModel& model, double h0, double h1,
                      const Mat& input_matrix) {
    const Mat scaled =
        Mat::identity(3) * (h1 - h0) + model.A * ((h1 * h1 - h0 * h0) / 2.0);
    return scaled * input_matrix;
}

}  // namespace

LiftedMatrices lifted_matrices(const LiftedSystem& sys, double h) {
    const DelayBounds& b = sys.bounds;
    const double slack = 1e-12 * b.sample_time_Ts;
    if (h < b.hold_min() - slack || h > b.hold_max() + slack) {
        throw std::invalid_argument("lifted_matrices: h = " + std::to_string(h) +
                                    " outside the admissible hold interval");
    }
    const double ts = b.sample_time_Ts;

    LiftedMatrices lm;
    lm.A_tilde = Mat(5, 5);
    lm.A_tilde.set_block(0, 0, expm_nilpotent(sys.model.A, ts, 2));
    lm.A_tilde.set_block(0, 3, zoh_integral_over(sys.model, h, ts, sys.model.B));

    lm.B_tilde = Mat(5, 2);
    lm.B_tilde.set_block(0, 0, zoh_integral(sys.model, h, sys.model.B));
    lm.B_tilde.set_block(3, 0, Mat::identity(2));

    lm.B_tilde_D = Mat(5, 2);
    lm.B_tilde_D.set_block(0, 0, zoh_integral(sys.model, ts, sys.model.B_D));
    return lm;
}

LiftedState lifted_step(const LiftedSystem& sys, const LiftedState& xi, const Vec2& du_k,
                        const SlipDeviation& d_k, double h) {
    const LiftedMatrices lm = lifted_matrices(sys, h);
    const Mat du = Mat::column({du_k[0], du_k[1]});
    const Mat d = Mat::column({d_k.d_mu_r, d_k.d_mu_l});
    const Mat next = lm.A_tilde * to_vector(xi) + lm.B_tilde * du + lm.B_tilde_D * d;
    return lifted_state_from(next);
}

}  // namespace skidncs
