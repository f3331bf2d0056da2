#pragma once

#include <array>
#include <functional>
#include <vector>

#include "skidncs/matrix.hpp"

namespace skidncs {

using Vec2 = std::array<double, 2>;
using Vec3 = std::array<double, 3>;

/// Planar configuration (x, y, heading) of the robot in some frame.
/// The heading is kept unwrapped so trajectories stay differentiable.
struct Pose {
    double x = 0.0;      // m
    double y = 0.0;      // m
    double theta = 0.0;  // rad
};

/// Commanded forward and rotational speed.
struct ControlInput {
    double v = 0.0;      // m/s
    double omega = 0.0;  // rad/s
};

/// Angular speeds of the right and left track motors.
struct MotorSpeeds {
    double rho_r = 0.0;  // rad/s
    double rho_l = 0.0;  // rad/s
};

/// Drive geometry: gear radius R coupling motors to the tracks, and the
/// lateral distance D between the tracks. Both must be positive for the
/// coupling matrix to be invertible.
struct RobotGeometry {
    double gear_radius_R = 0.0;     // m
    double track_distance_D = 0.0;  // m
};

/// Per-track slip coefficients. Nominal (no slip) is 1; values must be
/// strictly positive. Whether values above 1 are physical is left to the
/// caller; the model accepts any mu > 0.
struct SlipState {
    double mu_r = 1.0;
    double mu_l = 1.0;
};

/// Deviation of the slip coefficients from nominal: d = mu - 1.
struct SlipDeviation {
    double d_mu_r = 0.0;
    double d_mu_l = 0.0;
};

/// 3x2 matrix mapping (v, omega) to the pose rate at heading theta:
/// [[cos theta, 0], [sin theta, 0], [0, 1]].
Mat heading_matrix(double theta);

/// 2x2 coupling J = [[R/2, R/2], [R/D, -R/D]] from motor speeds to
/// (v, omega). det(J) = -R^2/D, nonzero for any valid geometry.
Mat coupling_matrix(const RobotGeometry& geom);

/// Motor speeds that realize the command assuming unit slip:
/// rho_hat = J^-1 * u_hat.
MotorSpeeds nominal_motor_speeds(const ControlInput& u_hat, const RobotGeometry& geom);

/// Velocity actually achieved once slip acts on the nominal motor speeds:
/// u = J * H * J^-1 * u_hat with H = diag(mu_r, mu_l).
/// Evaluated as u_hat + J*((H - I)*J^-1*u_hat) so that unit slip returns
/// the command bit-for-bit.
ControlInput effective_velocity(const ControlInput& u_hat, const SlipState& slip,
                                const RobotGeometry& geom);

/// Pose rate (xdot, ydot, thetadot) = G(theta) * J * H * J^-1 * u_hat.
/// Independent of x and y.
Vec3 pose_derivative(const Pose& q, const ControlInput& u_hat, const SlipState& slip,
                     const RobotGeometry& geom);

/// Piecewise-constant command signal over [0, t_span): values[i] is active
/// on [switch_times[i-1], switch_times[i]), with switch_times ascending.
struct ControlSchedule {
    std::vector<double> switch_times;
    std::vector<ControlInput> values;  // size = switch_times.size() + 1

    /// Constant command over the whole span.
    static ControlSchedule constant(const ControlInput& u) { return {{}, {u}}; }

    const ControlInput& at(double t) const;
};

/// Slip as a signal of time, sampled at integrator stage times.
using SlipSignal = std::function<SlipState(double)>;

struct PoseTrajectory {
    std::vector<double> t;
    std::vector<Pose> q;

    const Pose& back() const { return q.back(); }
};

/// Classical 4th-order fixed-step integration of the pose kinematics.
/// Every control switch time must land on the dt grid (actuation instants
/// are hit exactly); a trailing partial step covers t_span when it is not
/// a multiple of dt.
PoseTrajectory integrate_pose(const Pose& q0, const ControlSchedule& u_hat,
                              const SlipSignal& slip, const RobotGeometry& geom,
                              double t_span, double dt);

}  // namespace skidncs
