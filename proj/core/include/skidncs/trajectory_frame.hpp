#pragma once

#include "skidncs/matrix.hpp"
#include "skidncs/robot_model.hpp"

namespace skidncs {

/// Straight trajectory segment: a frame anchored at the segment start with
/// its x-axis along the segment, plus the feedforward speed along it. The
/// desired rotational speed is identically zero.
struct TrajectorySegment {
    Pose origin;             // (x0, y0, theta0) of the segment frame
    double v_desired = 0.0;  // m/s
};

/// Tracking error: robot pose in the segment frame minus the desired pose.
struct TrackingError {
    double e_x = 0.0;      // m
    double e_y = 0.0;      // m
    double e_theta = 0.0;  // rad
};

/// 3x3 roto-translation rotation part for the world -> segment change of
/// frame: planar rotation by -theta0 on (x, y), identity on the heading.
Mat segment_rotation(double theta0);

/// World pose expressed in the segment frame.
Pose to_segment_frame(const Pose& q, const TrajectorySegment& seg);

/// Inverse transform: segment-frame pose back to the world frame.
Pose from_segment_frame(const Pose& q_l, const TrajectorySegment& seg);

/// Desired pose in the segment frame at time t: (v_desired * t, 0, 0).
Pose desired_pose(const TrajectorySegment& seg, double t);

TrackingError tracking_error(const Pose& q, const TrajectorySegment& seg, double t);

/// Continuous-time tracking-error dynamics. The absolute heading is
/// reconstructed as theta0 + e_theta, which is exact because the frame
/// rotation is by the constant theta0. Depends on the error only through
/// e_theta.
Vec3 error_derivative(const TrackingError& e, const ControlInput& u_hat,
                      const SlipState& slip, const TrajectorySegment& seg,
                      const RobotGeometry& geom);

}  // namespace skidncs
