#pragma once

#include "skidncs/matrix.hpp"
#include "skidncs/robot_model.hpp"
#include "skidncs/trajectory_frame.hpp"

namespace skidncs {

/// LTI model of the tracking-error dynamics around the nominal condition
/// (zero error, command at the feedforward speed, unit slip):
///
///   edot = A e + B du + B_D d
///
/// A has a single nonzero entry A(1,2) = v_desired, so A*A = 0 and all
/// matrix exponentials of A are affine in time. B is constant; B_D scales
/// with v_desired and the track distance.
struct LinearErrorModel {
    Mat A;    // 3x3
    Mat B;    // 3x2
    Mat B_D;  // 3x2
    double v_desired = 0.0;
    double track_distance_D = 0.0;
};

/// Closed-form linearization of the error dynamics.
LinearErrorModel build_linear_model(const TrajectorySegment& seg,
                                    const RobotGeometry& geom);

struct NumericJacobians {
    Mat A_num;    // d(edot)/d(e)
    Mat B_num;    // d(edot)/d(u_hat)
    Mat B_D_num;  // d(edot)/d(mu)
};

/// Central finite differences of error_derivative at the nominal condition.
/// Verification oracle for build_linear_model.
NumericJacobians numeric_jacobians(const TrajectorySegment& seg,
                                   const RobotGeometry& geom, double step);

/// edot = A e + B du + B_D d.
Vec3 linear_error_derivative(const LinearErrorModel& model, const TrackingError& e,
                             const Vec2& du, const SlipDeviation& d);

}  // namespace skidncs
