#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pacstl/rng.hpp"
#include "pacstl/sim.hpp"

using namespace pacstl;

namespace {

constexpr double kPi = std::numbers::pi;

Vector6d vec6(double a, double b, double c, double d, double e, double f) {
    Vector6d v;
    v << a, b, c, d, e, f;
    return v;
}

}  // namespace

TEST_CASE("duffing derivative by direct substitution") {
    const Eigen::Vector2d d0 = duffing_derivative(1.0, 0.0, 0.0);
    CHECK(d0.x() == doctest::Approx(0.0));
    CHECK(d0.y() == doctest::Approx(0.4).epsilon(1e-12));

    const Eigen::Vector2d d1 = duffing_derivative(-1.0, 1.0, 0.0);
    CHECK(d1.x() == doctest::Approx(1.0));
    CHECK(d1.y() == doctest::Approx(0.35).epsilon(1e-12));
}

TEST_CASE("RK4 integrates the exponential to near machine accuracy") {
    const auto deriv = [](const Eigen::VectorXd& x, double) { return x; };
    Eigen::VectorXd x0(1);
    x0 << 1.0;
    const Trajectory traj = integrate(deriv, x0, 0.0, 1.0, 0.01, 1.0);
    REQUIRE(traj.states.size() == 2);
    CHECK(std::abs(traj.states[1][0] - std::exp(1.0)) < 1e-6);
}

TEST_CASE("integrate validates its grid and reports divergence") {
    const auto deriv = [](const Eigen::VectorXd& x, double) { return x; };
    Eigen::VectorXd x0(1);
    x0 << 1.0;
    // dt_out not a whole number of internal steps.
    CHECK_THROWS_AS(integrate(deriv, x0, 0.0, 1.0, 0.3, 0.5), std::invalid_argument);
    // duration not a whole number of output steps.
    CHECK_THROWS_AS(integrate(deriv, x0, 0.0, 1.0, 0.1, 0.4), std::invalid_argument);

    // x' = x^2 from x0=2 blows up at t=0.5.
    const auto quad = [](const Eigen::VectorXd& x, double) {
        return Eigen::VectorXd(x.array().square().matrix());
    };
    Eigen::VectorXd big(1);
    big << 2.0;
    CHECK_THROWS_AS(integrate(quad, big, 0.0, 1.0, 0.01, 1.0), std::runtime_error);
}

TEST_CASE("duffing stepper agrees with integrate and self-converges") {
    const DuffingParams p;
    const auto deriv = [&](const Eigen::VectorXd& x, double t) {
        const Eigen::Vector2d d = duffing_derivative(x[0], x[1], t, p);
        return Eigen::VectorXd(d);
    };
    Eigen::VectorXd x0(2);
    x0 << 1.0, 0.0;

    const Stepper coarse = duffing_stepper(p, 0.05);
    Eigen::VectorXd x = x0;
    double t = 0.0;
    for (int k = 0; k < 200; ++k, t += 0.05) x = coarse(x, {}, {}, t, 0.05);
    const Trajectory ref = integrate(deriv, x0, 0.0, 10.0, 0.05, 10.0);
    CHECK((x - ref.states[1]).norm() < 1e-12);

    // Step halving: dt 0.05 versus 0.005 stays within 1e-3 out to t=10.
    const Trajectory fine = integrate(deriv, x0, 0.0, 10.0, 0.005, 10.0);
    CHECK((ref.states[1] - fine.states[1]).norm() < 1e-3);
}

TEST_CASE("vessel parameter tables") {
    const VesselParams s = VesselParams::make_small();
    CHECK(s.m == doctest::Approx(24.0).epsilon(1e-12));
    CHECK(s.rho == doctest::Approx(1000.0).epsilon(1e-12));
    CHECK(s.M(0, 0) == 26.4);
    CHECK(s.M(5, 5) == 2.398);
    CHECK(s.D(0, 0) == 6.0);
    CHECK(s.D(5, 5) == 0.545);
    CHECK(s.tau_surge_max == doctest::Approx(2.4).epsilon(1e-12));
    CHECK(s.tau_yaw_max == doctest::Approx(0.436).epsilon(1e-12));
    CHECK(s.Ix == doctest::Approx(24.0 * (0.3 * 0.3 + 0.08 * 0.08) / 12.0).epsilon(1e-12));
    CHECK(s.Iz == doctest::Approx(24.0 * (1.0 * 1.0 + 0.3 * 0.3) / 12.0).epsilon(1e-12));

    const VesselParams l = VesselParams::make_large();
    CHECK(l.m == doctest::Approx(120.0).epsilon(1e-12));
    CHECK(l.rho == doctest::Approx(120.0 / (2.6 * 0.4 * 0.02)).epsilon(1e-12));
    CHECK(l.M(0, 0) == 132.0);
    CHECK(l.D(5, 5) == 22.90);
    CHECK(l.tau_surge_max == doctest::Approx(12.0).epsilon(1e-12));
    CHECK(l.tau_yaw_max == doctest::Approx(18.32).epsilon(1e-12));

    CHECK_NOTHROW(s.validate());
    CHECK_NOTHROW(l.validate());
}

TEST_CASE("full state vector round trip and angle wrapping") {
    FullState st;
    st.eta = vec6(1.0, 2.0, 0.5, 0.1, -0.2, 3.0 * kPi);
    st.nu = vec6(0.3, -0.1, 0.0, 0.01, 0.02, -0.05);
    const Eigen::VectorXd v = st.to_vector();
    REQUIRE(v.size() == 12);
    const FullState back = FullState::from_vector(v);
    CHECK((back.eta - st.eta).norm() == 0.0);
    CHECK((back.nu - st.nu).norm() == 0.0);
    CHECK_THROWS(FullState::from_vector(Eigen::VectorXd::Zero(11)));

    const FullState norm = st.normalized();
    CHECK(norm.eta[5] == doctest::Approx(kPi).epsilon(1e-12));
    CHECK(norm.eta[0] == st.eta[0]);
    CHECK((norm.nu - st.nu).norm() == 0.0);
}

TEST_CASE("surge acceleration from rest is tau over effective mass") {
    const VesselParams l = VesselParams::make_large();
    FullState st;  // all zero
    const Vector6d tau = vec6(0.7, 0, 0, 0, 0, 0);
    const Eigen::VectorXd xdot = vessel_derivative(st, tau, Vector6d::Zero(), l);
    REQUIRE(xdot.size() == 12);
    CHECK(xdot[6] == doctest::Approx(0.7 / 132.0).epsilon(1e-12));
    for (int i = 0; i < 6; ++i) CHECK(xdot[i] == 0.0);          // at rest, no pose rate
    for (int i = 7; i < 12; ++i) CHECK(std::abs(xdot[i]) < 1e-15);
}

TEST_CASE("pose kinematics rotate body velocity into the world frame") {
    const VesselParams s = VesselParams::make_small();
    FullState st;
    st.eta = vec6(0, 0, 0, 0, 0, kPi / 2.0);
    st.nu = vec6(1.0, 0, 0, 0, 0, 0);
    const Eigen::VectorXd xdot = vessel_derivative(st, Vector6d::Zero(), Vector6d::Zero(), s);
    CHECK(xdot[0] == doctest::Approx(0.0).scale(1.0));
    CHECK(xdot[1] == doctest::Approx(1.0).epsilon(1e-12));

    // Euler rates equal body rates at level attitude.
    st.nu = vec6(0, 0, 0, 0.1, -0.2, 0.3);
    const Eigen::VectorXd rates = vessel_derivative(st, Vector6d::Zero(), Vector6d::Zero(), s);
    CHECK(rates[3] == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(rates[4] == doctest::Approx(-0.2).epsilon(1e-12));
    CHECK(rates[5] == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("coriolis terms do no work") {
    // nu . M nudot = -nu . D nu when tau = b = 0, because nu . C nu = 0.
    const VesselParams l = VesselParams::make_large();
    CounterRng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        RngStream rs(rng, static_cast<std::uint64_t>(trial));
        FullState st;
        st.eta = vec6(rs.uniform(-2, 2), rs.uniform(-2, 2), 0, rs.uniform(-0.2, 0.2),
                      rs.uniform(-0.2, 0.2), rs.uniform(-kPi, kPi));
        for (int i = 0; i < 6; ++i) st.nu[i] = rs.uniform(-0.5, 0.5);
        const Eigen::VectorXd xdot =
            vessel_derivative(st, Vector6d::Zero(), Vector6d::Zero(), l);
        const Vector6d nudot = xdot.segment<6>(6);
        const double power = st.nu.dot(l.M * nudot) + st.nu.dot(l.D * st.nu);
        CHECK(std::abs(power) < 1e-9);
    }
}

TEST_CASE("energy never increases without forcing") {
    const VesselParams s = VesselParams::make_small();
    const Stepper step = vessel_stepper(s, 0.05);
    FullState st;
    st.nu = vec6(0.3, 0.1, 0.05, 0.0, 0.0, 0.2);
    Eigen::VectorXd x = st.to_vector();
    double prev = 0.5 * st.nu.dot(s.M * st.nu);
    for (int k = 0; k < 200; ++k) {
        x = step(x, Eigen::VectorXd::Zero(6), Eigen::VectorXd::Zero(6), k * 0.05, 0.05);
        REQUIRE(x.allFinite());
        const Vector6d nu = x.segment<6>(6);
        const double e = 0.5 * nu.dot(s.M * nu);
        CHECK(e <= prev + 1e-8);
        prev = e;
    }
}

TEST_CASE("steep pitch raises an error in the derivative and NaN in the stepper") {
    const VesselParams s = VesselParams::make_small();
    FullState st;
    st.eta[4] = 85.0 * kPi / 180.0;
    CHECK_THROWS_AS(vessel_derivative(st, Vector6d::Zero(), Vector6d::Zero(), s),
                    std::runtime_error);

    const Stepper step = vessel_stepper(s, 0.05);
    const Eigen::VectorXd out =
        step(st.to_vector(), Eigen::VectorXd::Zero(6), Eigen::VectorXd::Zero(6), 0.0, 0.05);
    CHECK_FALSE(out.allFinite());
}

TEST_CASE("reduced state carries world-frame velocity and ground speed") {
    FullState st;
    st.eta = vec6(1.0, 2.0, 0, 0, 0, kPi / 2.0);
    st.nu = vec6(0.3, 0.1, 0, 0, 0, 0);
    const Eigen::VectorXd r = reduced_state(st);
    REQUIRE(r.size() == 6);
    CHECK(r[0] == 1.0);
    CHECK(r[1] == 2.0);
    CHECK(r[2] == doctest::Approx(kPi / 2.0));
    CHECK(r[3] == doctest::Approx(-0.1).epsilon(1e-12));
    CHECK(r[4] == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(r[5] == doctest::Approx(std::hypot(0.3, 0.1)).epsilon(1e-12));

    // Headings pass through unwrapped so interval boxes spanning pi stay intact.
    st.eta[5] = kPi + 0.05;
    CHECK(reduced_state(st)[2] == kPi + 0.05);
}

TEST_CASE("LOS command is pure surge when already on course") {
    const VesselParams s = VesselParams::make_small();
    LosGuidance nav(s, 0.3);
    nav.set_waypoints({Eigen::Vector2d(10.0, 0.0)}, Eigen::Vector2d::Zero());
    FullState st;  // at origin, heading +x, at rest
    const Vector6d tau = nav.command(st);
    CHECK(tau[5] == 0.0);
    // Full feedforward plus error term saturates at the surge clamp.
    CHECK(tau[0] == doctest::Approx(s.tau_surge_max).epsilon(1e-12));
    for (int i = 1; i < 5; ++i) CHECK(tau[i] == 0.0);
}

TEST_CASE("LOS yaw saturates when the waypoint is astern") {
    const VesselParams s = VesselParams::make_small();
    LosGuidance nav(s, 0.3);
    nav.set_waypoints({Eigen::Vector2d(-10.0, 0.0)}, Eigen::Vector2d::Zero());
    FullState st;
    const Vector6d tau = nav.command(st);
    CHECK(std::abs(tau[5]) == doctest::Approx(s.tau_yaw_max).epsilon(1e-12));
}

TEST_CASE("LOS advances waypoints inside the acceptance radius and then stops") {
    const VesselParams s = VesselParams::make_small();
    LosGuidance nav(s, 0.3);
    nav.set_waypoints({Eigen::Vector2d(10.0, 0.0), Eigen::Vector2d(20.0, 0.0)},
                      Eigen::Vector2d::Zero());
    FullState st;
    st.eta[0] = 9.8;  // within 0.5 of the first waypoint
    nav.command(st);
    CHECK(nav.active_waypoint() == 1);
    CHECK_FALSE(nav.finished());

    st.eta[0] = 19.9;
    nav.command(st);
    CHECK(nav.finished());
    const Vector6d tau = nav.command(st);
    CHECK(tau.norm() == 0.0);
}

TEST_CASE("LOS closed loop pulls the cross-track error to zero") {
    const VesselParams s = VesselParams::make_small();
    const Stepper step = vessel_stepper(s, 0.05);
    LosGuidance nav(s, 0.3);
    nav.set_waypoints({Eigen::Vector2d(60.0, 0.0)}, Eigen::Vector2d::Zero());
    FullState st;
    st.eta[1] = 1.0;  // one meter off the track
    Eigen::VectorXd x = st.to_vector();
    for (int k = 0; k < 400; ++k) {
        const FullState cur = FullState::from_vector(x);
        const Vector6d tau = nav.command(cur);
        x = step(x, tau, Eigen::VectorXd::Zero(6), k * 0.05, 0.05);
        REQUIRE(x.allFinite());
    }
    const FullState fin = FullState::from_vector(x);
    CHECK(std::abs(fin.eta[1]) < 0.2);            // back on the line
    CHECK(fin.nu[0] == doctest::Approx(0.3).epsilon(0.2));  // near cruise speed
    CHECK(fin.eta[0] > 3.0);                      // made real forward progress
}
