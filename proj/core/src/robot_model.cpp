#include "skidncs/robot_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace skidncs {

namespace {

void check_geometry(const RobotGeometry& geom) {
    if (!(geom.gear_radius_R > 0.0) || !std::isfinite(geom.gear_radius_R) ||
        !(geom.track_distance_D > 0.0) || !std::isfinite(geom.track_distance_D)) {
        throw std::invalid_argument("robot geometry: R and D must be finite and > 0");
    }
}

void check_slip(const SlipState& slip) {
    if (!(slip.mu_r > 0.0) || !std::isfinite(slip.mu_r) || !(slip.mu_l > 0.0) ||
        !std::isfinite(slip.mu_l)) {
        throw std::invalid_argument("slip coefficients must be finite and > 0");
    }
}

}  // namespace

Mat heading_matrix(double theta) {
    if (!std::isfinite(theta)) {
        throw std::invalid_argument("heading_matrix: theta must be finite");
    }
    return Mat::from_rows({{std::cos(theta), 0.0}, {std::sin(theta), 0.0}, {0.0, 1.0}});
}

Mat coupling_matrix(const RobotGeometry& geom) {
    check_geometry(geom);
    const double R = geom.gear_radius_R;
    const double D = geom.track_distance_D;
    return Mat::from_rows({{R / 2.0, R / 2.0}, {R / D, -R / D}});
}

MotorSpeeds nominal_motor_speeds(const ControlInput& u_hat, const RobotGeometry& geom) {
    const Mat j_inv = inverse2(coupling_matrix(geom));
    return MotorSpeeds{j_inv(0, 0) * u_hat.v + j_inv(0, 1) * u_hat.omega,
                       j_inv(1, 0) * u_hat.v + j_inv(1, 1) * u_hat.omega};
}

ControlInput effective_velocity(const ControlInput& u_hat, const SlipState& slip,
                                const RobotGeometry& geom) {
    check_slip(slip);
    const Mat j = coupling_matrix(geom);
    const MotorSpeeds rho = nominal_motor_speeds(u_hat, geom);

    // u = u_hat + J*(H - I)*rho_hat; identical unit slip leaves the command
    // untouched because the correction term is exactly zero.
    const double dr = (slip.mu_r - 1.0) * rho.rho_r;
    const double dl = (slip.mu_l - 1.0) * rho.rho_l;
    return ControlInput{u_hat.v + j(0, 0) * dr + j(0, 1) * dl,
                        u_hat.omega + j(1, 0) * dr + j(1, 1) * dl};
}

Vec3 pose_derivative(const Pose& q, const ControlInput& u_hat, const SlipState& slip,
                     const RobotGeometry& geom) {
    const ControlInput u = effective_velocity(u_hat, slip, geom);
    const double ct = std::cos(q.theta);
    const double st = std::sin(q.theta);
    return Vec3{ct * u.v, st * u.v, u.omega};
}

const ControlInput& ControlSchedule::at(double t) const {
    size_t i = 0;
    while (i < switch_times.size() && t >= switch_times[i]) ++i;
    return values[i];
}

namespace {

Pose rk4_step(const Pose& q, double t, double dt, const ControlInput& u,
              const SlipSignal& slip, const RobotGeometry& geom) {
    const auto f = [&](const Pose& p, double ti) {
        return pose_derivative(p, u, slip(ti), geom);
    };
    const Vec3 k1 = f(q, t);
    const Vec3 k2 = f(Pose{q.x + 0.5 * dt * k1[0], q.y + 0.5 * dt * k1[1],
                           q.theta + 0.5 * dt * k1[2]},
                      t + 0.5 * dt);
    const Vec3 k3 = f(Pose{q.x + 0.5 * dt * k2[0], q.y + 0.5 * dt * k2[1],
                           q.theta + 0.5 * dt * k2[2]},
                      t + 0.5 * dt);
    const Vec3 k4 = f(Pose{q.x + dt * k3[0], q.y + dt * k3[1], q.theta + dt * k3[2]},
                      t + dt);
    const double w = dt / 6.0;
    return Pose{q.x + w * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
                q.y + w * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
                q.theta + w * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])};
}

}  // namespace

PoseTrajectory integrate_pose(const Pose& q0, const ControlSchedule& u_hat,
                              const SlipSignal& slip, const RobotGeometry& geom,
                              double t_span, double dt) {
    if (!(dt > 0.0) || !(t_span >= 0.0)) {
        throw std::invalid_argument("integrate_pose: need dt > 0 and t_span >= 0");
    }
    if (u_hat.values.size() != u_hat.switch_times.size() + 1) {
        throw std::invalid_argument("integrate_pose: malformed control schedule");
    }
    for (double s : u_hat.switch_times) {
        const double steps = s / dt;
        if (std::abs(steps - std::round(steps)) > 1e-9) {
            throw std::invalid_argument(
                "integrate_pose: control switch at t=" + std::to_string(s) +
                " does not land on the dt grid");
        }
    }

    const int n_full = static_cast<int>(std::floor(t_span / dt + 1e-12));
    const double remainder = t_span - n_full * dt;

    PoseTrajectory traj;
    traj.t.reserve(static_cast<size_t>(n_full) + 2);
    traj.q.reserve(static_cast<size_t>(n_full) + 2);
    traj.t.push_back(0.0);
    traj.q.push_back(q0);

    Pose q = q0;
    for (int i = 0; i < n_full; ++i) {
        const double t = i * dt;
        // Control held constant across the substep; switches only occur on
        // grid boundaries, so sampling just past t picks the active value.
        const ControlInput& u = u_hat.at(t + 0.5 * dt);
        q = rk4_step(q, t, dt, u, slip, geom);
        traj.t.push_back((i + 1) * dt);
        traj.q.push_back(q);
    }
    if (remainder > 1e-12 * std::max(1.0, t_span)) {
        const double t = n_full * dt;
        const ControlInput& u = u_hat.at(t + 0.5 * remainder);
        q = rk4_step(q, t, remainder, u, slip, geom);
        traj.t.push_back(t_span);
        traj.q.push_back(q);
    }
    return traj;
}

}  // namespace skidncs
