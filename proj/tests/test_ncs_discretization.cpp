#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "skidncs/ncs_discretization.hpp"

using namespace skidncs;

namespace {

const RobotGeometry kGeom{0.1, 0.5};

LinearErrorModel default_model(double vd = 1.0) {
    return build_linear_model(TrajectorySegment{Pose{}, vd}, kGeom);
}

// Truncated Taylor series for e^{A s}; independent of the nilpotent
// shortcut used by the implementation.
Mat taylor_expm(const Mat& a, double t, int terms = 20) {
    Mat result = Mat::identity(a.rows());
    Mat term = Mat::identity(a.rows());
    double factorial = 1.0;
    for (int k = 1; k < terms; ++k) {
        term = term * a * t;
        factorial *= k;
        result = result + term * (1.0 / factorial);
    }
    return result;
}

// Composite Simpson quadrature of int_0^h e^{A s} ds * input.
Mat simpson_zoh(const Mat& a, double h, const Mat& input, int panels = 10000) {
    const double dh = h / panels;
    Mat acc(a.rows(), a.cols());
    for (int i = 0; i < panels; ++i) {
        const double s0 = i * dh;
        const Mat f0 = taylor_expm(a, s0);
        const Mat fm = taylor_expm(a, s0 + 0.5 * dh);
        const Mat f1 = taylor_expm(a, s0 + dh);
        acc = acc + (f0 + fm * 4.0 + f1) * (dh / 6.0);
    }
    return acc * input;
}

// Two-stage propagation over one period: the previous input acts on
// [0, tau], the fresh one on [tau, Ts], the disturbance throughout.
Mat two_stage_oracle(const LinearErrorModel& m, double ts, double tau, const Mat& e_k,
                     const Mat& du_prev, const Mat& du_k, const Mat& d_k) {
    const auto phi = [&](double t) { return taylor_expm(m.A, t); };
    const auto gamma = [&](double t) {
        // int_0^t e^{A s} ds = t I + t^2/2 A for this nilpotent A
        return Mat::identity(3) * t + m.A * (t * t / 2.0);
    };
    const Mat e_mid = phi(tau) * e_k + gamma(tau) * (m.B * du_prev + m.B_D * d_k);
    const double h = ts - tau;
    return phi(h) * e_mid + gamma(h) * (m.B * du_k + m.B_D * d_k);
}

// Dense RK4 integration of edot = A e + B du(t) + B_D d with the input
// switching at t = tau. The switch lands on the dt grid, so the input is
// genuinely constant within each step (held to the left limit at tau).
Mat dense_integration(const LinearErrorModel& m, double ts, double tau, const Mat& e0,
                      const Mat& du_prev, const Mat& du_k, const Mat& d, double dt) {
    Mat e = e0;
    const auto steps = static_cast<long long>(std::llround(ts / dt));
    for (long long i = 0; i < steps; ++i) {
        const Mat& du = (i + 0.5) * dt < tau ? du_prev : du_k;
        const Mat forcing = m.B * du + m.B_D * d;
        const auto f = [&](const Mat& x) { return m.A * x + forcing; };
        const Mat k1 = f(e);
        const Mat k2 = f(e + k1 * (dt / 2.0));
        const Mat k3 = f(e + k2 * (dt / 2.0));
        const Mat k4 = f(e + k3 * dt);
        e = e + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
    }
    return e;
}

}  // namespace

TEST_CASE("DelayBounds enforces the single-period restriction") {
    CHECK_NOTHROW(DelayBounds(0.02, 0.06, 0.1));
    CHECK_NOTHROW(DelayBounds(0.0, 0.1, 0.1));
    CHECK_THROWS_AS(DelayBounds(-0.01, 0.06, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(DelayBounds(0.06, 0.02, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(DelayBounds(0.02, 0.2, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(DelayBounds(0.0, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("combine_delays") {
    CHECK(combine_delays(0.0, 0.0, 0.0) == 0.0);
    CHECK(combine_delays(0.01, 0.02, 0.005) == doctest::Approx(0.035).epsilon(1e-15));
    CHECK_THROWS_AS(combine_delays(-0.01, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("hold_interval") {
    const DelayBounds b(0.02, 0.06, 0.1);
    CHECK(hold_interval(b, 0.06) == doctest::Approx(0.04).epsilon(1e-14));
    CHECK(hold_interval(b, 0.04) == doctest::Approx(0.06).epsilon(1e-14));
    CHECK_THROWS_AS(hold_interval(b, -0.01), std::invalid_argument);
    CHECK_THROWS_AS(hold_interval(b, 0.07), std::invalid_argument);
}

TEST_CASE("zoh_integral: closed form against quadrature") {
    const LinearErrorModel m = default_model();

    CHECK(zoh_integral(m, 0.0, m.B).max_abs() == 0.0);

    const Mat g1 = zoh_integral(m, 0.06, m.B);
    CHECK((g1 - Mat::from_rows({{0.06, 0}, {0, 0.0018}, {0, 0.06}})).max_abs() < 1e-15);
    CHECK((g1 - simpson_zoh(m.A, 0.06, m.B)).max_abs() < 1e-12);

    const Mat g2 = zoh_integral(m, 0.1, m.B_D);
    CHECK((g2 - Mat::from_rows({{0.05, 0.05}, {0.01, -0.01}, {0.2, -0.2}})).max_abs() <
          1e-15);
    CHECK((g2 - simpson_zoh(m.A, 0.1, m.B_D)).max_abs() < 1e-12);

    CHECK_THROWS_AS(zoh_integral(m, -0.1, m.B), std::invalid_argument);
}

TEST_CASE("lifted_matrices: structure and values") {
    const LiftedSystem sys{default_model(), DelayBounds(0.02, 0.06, 0.1)};

    SUBCASE("values at h = 0.06") {
        const LiftedMatrices lm = lifted_matrices(sys, 0.06);
        // top-right of A~: (Ts - h) B + (Ts^2 - h^2)/2 AB
        const Mat tail = lm.A_tilde.block(0, 3, 3, 2);
        CHECK((tail - Mat::from_rows({{0.04, 0}, {0, 0.0032}, {0, 0.04}})).max_abs() <
              1e-15);
        // top-left is e^{A Ts}
        CHECK((lm.A_tilde.block(0, 0, 3, 3) -
               Mat::from_rows({{1, 0, 0}, {0, 1, 0.1}, {0, 0, 1}}))
                  .max_abs() < 1e-15);
    }

    SUBCASE("zero delay covers the whole period") {
        const LiftedSystem full{default_model(), DelayBounds(0.0, 0.06, 0.1)};
        const LiftedMatrices lm = lifted_matrices(full, 0.1);
        CHECK(lm.A_tilde.block(0, 3, 3, 2).max_abs() == 0.0);
        CHECK((lm.B_tilde.block(0, 0, 3, 2) - zoh_integral(full.model, 0.1, full.model.B))
                  .max_abs() == 0.0);
    }

    SUBCASE("structural zeros and identity block") {
        for (double h : {0.04, 0.05, 0.06}) {
            const LiftedMatrices lm = lifted_matrices(sys, h);
            CHECK(lm.A_tilde.block(3, 0, 2, 5).max_abs() == 0.0);
            CHECK((lm.B_tilde.block(3, 0, 2, 2) - Mat::identity(2)).max_abs() == 0.0);
            CHECK(lm.B_tilde_D.block(3, 0, 2, 2).max_abs() == 0.0);
        }
    }

    SUBCASE("interval additivity of the two input integrals") {
        std::mt19937_64 rng(31);
        std::uniform_real_distribution<double> hdist(0.04, 0.06);
        const Mat total = zoh_integral(sys.model, 0.1, sys.model.B);
        for (int i = 0; i < 100; ++i) {
            const LiftedMatrices lm = lifted_matrices(sys, hdist(rng));
            const Mat sum =
                lm.B_tilde.block(0, 0, 3, 2) + lm.A_tilde.block(0, 3, 3, 2);
            CHECK((sum - total).max_abs() < 1e-14);
        }
    }

    SUBCASE("h outside the admissible interval") {
        CHECK_THROWS_AS(lifted_matrices(sys, 0.03), std::invalid_argument);
        CHECK_THROWS_AS(lifted_matrices(sys, 0.09), std::invalid_argument);
    }
}

TEST_CASE("no-delay endpoint reproduces the classical ZOH discretization") {
    const LiftedSystem sys{default_model(), DelayBounds(0.0, 0.05, 0.1)};
    const LiftedMatrices lm = lifted_matrices(sys, 0.1);
    CHECK((lm.A_tilde.block(0, 0, 3, 3) - taylor_expm(sys.model.A, 0.1)).max_abs() <
          1e-15);
    CHECK((lm.B_tilde.block(0, 0, 3, 2) - simpson_zoh(sys.model.A, 0.1, sys.model.B))
              .max_abs() < 1e-12);
}

TEST_CASE("lifted_step: zero state, identity bottom block") {
    const LiftedSystem sys{default_model(), DelayBounds(0.02, 0.06, 0.1)};
    const LiftedState zero =
        lifted_step(sys, LiftedState{}, Vec2{0, 0}, SlipDeviation{}, 0.05);
    CHECK(zero.e.e_x == 0.0);
    CHECK(zero.e.e_y == 0.0);
    CHECK(zero.e.e_theta == 0.0);
    CHECK(zero.du_prev[0] == 0.0);
    CHECK(zero.du_prev[1] == 0.0);

    std::mt19937_64 rng(32);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        const LiftedState xi{TrackingError{val(rng), val(rng), val(rng)},
                             Vec2{val(rng), val(rng)}};
        const Vec2 du{val(rng), val(rng)};
        const LiftedState next = lifted_step(
            sys, xi, du, SlipDeviation{0.1 * val(rng), 0.1 * val(rng)}, 0.05);
        CHECK(next.du_prev[0] == du[0]);
        CHECK(next.du_prev[1] == du[1]);
    }
}

TEST_CASE("lifted_step equals the two-stage composition") {
    const LiftedSystem sys{default_model(), DelayBounds(0.02, 0.06, 0.1)};
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    std::uniform_real_distribution<double> tdist(0.02, 0.06);
    for (int i = 0; i < 100; ++i) {
        const Mat e_k = Mat::column({val(rng), val(rng), val(rng)});
        const Mat du_prev = Mat::column({val(rng), val(rng)});
        const Mat du_k = Mat::column({val(rng), val(rng)});
        const Mat d_k = Mat::column({0.2 * val(rng), 0.2 * val(rng)});
        const double tau = tdist(rng);

        const Mat expected = two_stage_oracle(sys.model, 0.1, tau, e_k, du_prev, du_k, d_k);
        const LiftedState next = lifted_step(
            sys,
            LiftedState{TrackingError{e_k(0, 0), e_k(1, 0), e_k(2, 0)},
                        Vec2{du_prev(0, 0), du_prev(1, 0)}},
            Vec2{du_k(0, 0), du_k(1, 0)}, SlipDeviation{d_k(0, 0), d_k(1, 0)},
            0.1 - tau);
        CHECK(std::abs(next.e.e_x - expected(0, 0)) < 1e-13);
        CHECK(std::abs(next.e.e_y - expected(1, 0)) < 1e-13);
        CHECK(std::abs(next.e.e_theta - expected(2, 0)) < 1e-13);
    }
}

TEST_CASE("lifted_step matches dense integration of the switched linear system") {
    const LiftedSystem sys{default_model(), DelayBounds(0.02, 0.06, 0.1)};
    std::mt19937_64 rng(34);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    std::uniform_int_distribution<int> tau_steps(2000, 6000);  // tau on the 1e-5 grid
    for (int i = 0; i < 20; ++i) {
        const Mat e0 = Mat::column({val(rng), val(rng), val(rng)});
        const Mat du_prev = Mat::column({val(rng), val(rng)});
        const Mat du_k = Mat::column({val(rng), val(rng)});
        const Mat d = Mat::column({0.2 * val(rng), 0.2 * val(rng)});
        const double tau = tau_steps(rng) * 1e-5;

        const Mat dense = dense_integration(sys.model, 0.1, tau, e0, du_prev, du_k, d, 1e-5);
        const LiftedState next = lifted_step(
            sys,
            LiftedState{TrackingError{e0(0, 0), e0(1, 0), e0(2, 0)},
                        Vec2{du_prev(0, 0), du_prev(1, 0)}},
            Vec2{du_k(0, 0), du_k(1, 0)}, SlipDeviation{d(0, 0), d(1, 0)}, 0.1 - tau);
        CHECK(std::abs(next.e.e_x - dense(0, 0)) < 1e-8);
        CHECK(std::abs(next.e.e_y - dense(1, 0)) < 1e-8);
        CHECK(std::abs(next.e.e_theta - dense(2, 0)) < 1e-8);
    }
}

TEST_CASE("lifted state vector round trip") {
    const LiftedState xi{TrackingError{0.1, -0.2, 0.3}, Vec2{0.4, -0.5}};
    const LiftedState back = lifted_state_from(to_vector(xi));
    CHECK(back.e.e_x == xi.e.e_x);
    CHECK(back.e.e_y == xi.e.e_y);
    CHECK(back.e.e_theta == xi.e.e_theta);
    CHECK(back.du_prev[0] == xi.du_prev[0]);
    CHECK(back.du_prev[1] == xi.du_prev[1]);
    CHECK_THROWS_AS(lifted_state_from(Mat(4, 1)), std::invalid_argument);
}
