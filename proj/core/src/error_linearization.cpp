#include "skidncs/error_linearization.hpp"

#include <stdexcept>

namespace skidncs {

LinearErrorModel build_linear_model(const TrajectorySegment& seg,
                                    const RobotGeometry& geom) {
    coupling_matrix(geom);  // validates the geometry
    const double vd = seg.v_desired;
    const double D = geom.track_distance_D;

    LinearErrorModel m;
    m.A = Mat::from_rows({{0.0, 0.0, 0.0}, {0.0, 0.0, vd}, {0.0, 0.0, 0.0}});
    m.B = Mat::from_rows({{1.0, 0.0}, {0.0, 0.0}, {0.0, 1.0}});
    m.B_D = Mat::from_rows({{vd / 2.0, vd / 2.0}, {0.0, 0.0}, {vd / D, -vd / D}});
    m.v_desired = vd;
    m.track_distance_D = D;
    return m;
}

NumericJacobians numeric_jacobians(const TrajectorySegment& seg,
                                   const RobotGeometry& geom, double step) {
    if (!(step > 0.0)) {
        throw std::invalid_argument("numeric_jacobians: step must be > 0");
    }
    const ControlInput u_nom{seg.v_desired, 0.0};
    const SlipState mu_nom{1.0, 1.0};

    const auto f = [&](const TrackingError& e, const ControlInput& u,
                       const SlipState& mu) {
        return error_derivative(e, u, mu, seg, geom);
    };

    const auto err_of = [](int idx, double v) {
        TrackingError e{};
        (idx == 0 ? e.e_x : idx == 1 ? e.e_y : e.e_theta) = v;
        return e;
    };
    const auto input_of = [&](int idx, double v) {
        ControlInput u = u_nom;
        (idx == 0 ? u.v : u.omega) += v;
        return u;
    };
    const auto slip_of = [](int idx, double v) {
        SlipState mu{1.0, 1.0};
        (idx == 0 ? mu.mu_r : mu.mu_l) += v;
        return mu;
    };

    NumericJacobians j;
    j.A_num = Mat(3, 3);
    j.B_num = Mat(3, 2);
    j.B_D_num = Mat(3, 2);

    for (int c = 0; c < 3; ++c) {
        const Vec3 fp = f(err_of(c, step), u_nom, mu_nom);
        const Vec3 fm = f(err_of(c, -step), u_nom, mu_nom);
        for (int r = 0; r < 3; ++r) j.A_num(r, c) = (fp[r] - fm[r]) / (2.0 * step);
    }
    for (int c = 0; c < 2; ++c) {
        const Vec3 fp = f(TrackingError{}, input_of(c, step), mu_nom);
        const Vec3 fm = f(TrackingError{}, input_of(c, -step), mu_nom);
        for (int r = 0; r < 3; ++r) j.B_num(r, c) = (fp[r] - fm[r]) / (2.0 * step);
    }
    for (int c = 0; c < 2; ++c) {
        const Vec3 fp = f(TrackingError{}, u_nom, slip_of(c, step));
        const Vec3 fm = f(TrackingError{}, u_nom, slip_of(c, -step));
        for (int r = 0; r < 3; ++r) j.B_D_num(r, c) = (fp[r] - fm[r]) / (2.0 * step);
    }
    return j;
}

Vec3 linear_error_derivative(const LinearErrorModel& model, const TrackingError& e,
                             const Vec2& du, const SlipDeviation& d) {
    const Mat ev = Mat::column({e.e_x, e.e_y, e.e_theta});
    const Mat duv = Mat::column({du[0], du[1]});
    const Mat dv = Mat::column({d.d_mu_r, d.d_mu_l});
    const Mat out = model.A * ev + model.B * duv + model.B_D * dv;
    return Vec3{out(0, 0), out(1, 0), out(2, 0)};
}

}  // namespace skidncs
