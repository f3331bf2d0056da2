#include "skidncs/trajectory_frame.hpp"

#include <cmath>
#include <stdexcept>

namespace skidncs {

Mat segment_rotation(double theta0) {
    const double c = std::cos(theta0);
    const double s = std::sin(theta0);
    return Mat::from_rows({{c, s, 0.0}, {-s, c, 0.0}, {0.0, 0.0, 1.0}});
}

Pose to_segment_frame(const Pose& q, const TrajectorySegment& seg) {
    const double c = std::cos(seg.origin.theta);
    const double s = std::sin(seg.origin.theta);
    const double dx = q.x - seg.origin.x;
    const double dy = q.y - seg.origin.y;
    return Pose{c * dx + s * dy, -s * dx + c * dy, q.theta - seg.origin.theta};
}

Pose from_segment_frame(const Pose& q_l, const TrajectorySegment& seg) {
    const double c = std::cos(seg.origin.theta);
    const double s = std::sin(seg.origin.theta);
    return Pose{seg.origin.x + c * q_l.x - s * q_l.y,
                seg.origin.y + s * q_l.x + c * q_l.y,
                seg.origin.theta + q_l.theta};
}

Pose desired_pose(const TrajectorySegment& seg, double t) {
    if (!(t >= 0.0)) {
        throw std::invalid_argument("desired_pose: t must be >= 0");
    }
    return Pose{seg.v_desired * t, 0.0, 0.0};
}

TrackingError tracking_error(const Pose& q, const TrajectorySegment& seg, double t) {
    const Pose q_l = to_segment_frame(q, seg);
    const Pose q_d = desired_pose(seg, t);
    return TrackingError{q_l.x - q_d.x, q_l.y - q_d.y, q_l.theta - q_d.theta};
}

Vec3 error_derivative(const TrackingError& e, const ControlInput& u_hat,
                      const SlipState& slip, const TrajectorySegment& seg,
                      const RobotGeometry& geom) {
    const double theta = seg.origin.theta + e.e_theta;
    const ControlInput u = effective_velocity(u_hat, slip, geom);

    // q_l rate: rotate the world-frame pose rate into the segment frame.
    const double ct = std::cos(theta);
    const double st = std::sin(theta);
    const double c0 = std::cos(seg.origin.theta);
    const double s0 = std::sin(seg.origin.theta);
    const double xdot = ct * u.v;
    const double ydot = st * u.v;
    return Vec3{c0 * xdot + s0 * ydot - seg.v_desired, -s0 * xdot + c0 * ydot, u.omega};
}

}  // namespace skidncs
