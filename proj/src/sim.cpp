#include "pacstl/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "pacstl/bounds.hpp"

namespace pacstl {

namespace {

// Whole number of substeps of h covering dt, or -1 if dt is not a multiple.
int substep_count(double dt, double h, const char* who) {
    if (!(h > 0.0) || !(dt > 0.0))
        throw std::invalid_argument(std::string(who) + ": step sizes must be positive");
    const long long n = std::llround(dt / h);
    if (n < 1 || std::abs(dt - static_cast<double>(n) * h) > 1e-6 * h)
        throw std::invalid_argument(std::string(who) + ": " + std::to_string(dt) +
                                    " is not a whole multiple of " + std::to_string(h));
    return static_cast<int>(n);
}

template <typename F>
Eigen::VectorXd rk4_step(const F& f, const Eigen::VectorXd& x, double t, double h) {
    const Eigen::VectorXd k1 = f(x, t);
    const Eigen::VectorXd k2 = f(x + (0.5 * h) * k1, t + 0.5 * h);
    const Eigen::VectorXd k3 = f(x + (0.5 * h) * k2, t + 0.5 * h);
    const Eigen::VectorXd k4 = f(x + h * k3, t + h);
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Eigen::Matrix3d skew(const Eigen::Vector3d& a) {
    Eigen::Matrix3d s;
    s << 0.0, -a.z(), a.y(),
         a.z(), 0.0, -a.x(),
         -a.y(), a.x(), 0.0;
    return s;
}

Eigen::Matrix3d body_to_world(double phi, double theta, double psi) {
    return (Eigen::AngleAxisd(psi, Eigen::Vector3d::UnitZ()) *
            Eigen::AngleAxisd(theta, Eigen::Vector3d::UnitY()) *
            Eigen::AngleAxisd(phi, Eigen::Vector3d::UnitX()))
        .toRotationMatrix();
}

Vector6d diag6(double a, double b, double c, double d, double e, double f) {
    Vector6d v;
    v << a, b, c, d, e, f;
    return v;
}

}  // namespace

Eigen::Vector2d duffing_derivative(double x, double y, double t, const DuffingParams& p) {
    return {y, -p.alpha * y + x - x * x * x + p.gamma * std::cos(p.omega * t)};
}

Stepper duffing_stepper(const DuffingParams& p, double dt_internal) {
    return [p, dt_internal](const Eigen::VectorXd& x, const Eigen::VectorXd&,
                            const Eigen::VectorXd&, double t, double dt) -> Eigen::VectorXd {
        if (x.size() != 2)
            throw std::invalid_argument("duffing_stepper: state must be (x, y)");
        const int sub = substep_count(dt, dt_internal, "duffing_stepper");
        const auto f = [&p](const Eigen::VectorXd& s, double ts) -> Eigen::VectorXd {
            return duffing_derivative(s[0], s[1], ts, p);
        };
        Eigen::VectorXd s = x;
        for (int k = 0; k < sub; ++k) s = rk4_step(f, s, t + k * dt_internal, dt_internal);
        return s;
    };
}

VesselParams VesselParams::make_small() {
    VesselParams p;
    p.name = "small";
    p.L = 1.0;
    p.B = 0.3;
    p.T_draft = 0.08;
    p.M = diag6(26.4, 28.8, 48.0, 0.212, 2.214, 2.398).asDiagonal();
    p.M_A_lin = Eigen::Vector3d(2.4, 4.8, 2.4).asDiagonal();
    p.M_A_rot = Eigen::Vector3d(1.92, 2.013, 2.18).asDiagonal();
    p.D = diag6(6.0, 6.0, 6.0, 0.0482, 0.5032, 0.545).asDiagonal();
    p.m = p.M(0, 0) - p.M_A_lin(0, 0);
    p.rho = p.m / (p.L * p.B * p.T_draft);
    p.Ix = p.m * (p.B * p.B + p.T_draft * p.T_draft) / 12.0;
    p.Iy = p.m * (p.L * p.L + p.T_draft * p.T_draft) / 12.0;
    p.Iz = p.m * (p.L * p.L + p.B * p.B) / 12.0;
    p.tau_surge_max = p.D(0, 0) * 0.4;
    p.tau_yaw_max = p.D(5, 5) * 0.8;
    p.validate();
    return p;
}

VesselParams VesselParams::make_large() {
    VesselParams p;
    p.name = "large";
    p.L = 2.6;
    p.B = 0.4;
    p.T_draft = 0.02;
    p.M = diag6(132.0, 144.0, 240.0, 1.9, 99.1, 100.76).asDiagonal();
    p.M_A_lin = Eigen::Vector3d(12.0, 24.0, 120.0).asDiagonal();
    p.M_A_rot = Eigen::Vector3d(0.17, 9.01, 9.16).asDiagonal();
    p.D = diag6(30.0, 30.0, 30.0, 0.425, 22.525, 22.90).asDiagonal();
    p.m = p.M(0, 0) - p.M_A_lin(0, 0);
    p.rho = p.m / (p.L * p.B * p.T_draft);
    p.Ix = p.m * (p.B * p.B + p.T_draft * p.T_draft) / 12.0;
    p.Iy = p.m * (p.L * p.L + p.T_draft * p.T_draft) / 12.0;
    p.Iz = p.m * (p.L * p.L + p.B * p.B) / 12.0;
    p.tau_surge_max = p.D(0, 0) * 0.4;
    p.tau_yaw_max = p.D(5, 5) * 0.8;
    p.validate();
    return p;
}

void VesselParams::validate() const {
    if (!(L > 0.0) || !(B > 0.0) || !(T_draft > 0.0) || !(m > 0.0))
        throw std::invalid_argument("VesselParams: dimensions and mass must be positive");
    const Eigen::SelfAdjointEigenSolver<Matrix6d> es(M);
    if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0)
        throw std::invalid_argument("VesselParams: M must be positive definite");
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) {
            if (i == j) {
                if (D(i, i) < 0.0)
                    throw std::invalid_argument("VesselParams: damping must be non-negative");
            } else if (D(i, j) != 0.0) {
                throw std::invalid_argument("VesselParams: damping must be diagonal");
            }
        }
    }
}

FullState FullState::from_vector(const Eigen::VectorXd& x) {
    if (x.size() != 12)
        throw std::invalid_argument("FullState: expected 12 entries [eta; nu]");
    FullState s;
    s.eta = x.head<6>();
    s.nu = x.tail<6>();
    return s;
}

Eigen::VectorXd FullState::to_vector() const {
    Eigen::VectorXd x(12);
    x << eta, nu;
    return x;
}

FullState FullState::normalized() const {
    FullState s = *this;
    for (int i = 3; i < 6; ++i) s.eta[i] = normalize_radian_pi(s.eta[i]);
    return s;
}

Eigen::VectorXd vessel_derivative(const FullState& s, const Vector6d& tau,
                                  const Vector6d& b, const VesselParams& p) {
    const double phi = s.eta[3];
    const double theta = s.eta[4];
    if (std::abs(theta) > 80.0 * std::numbers::pi / 180.0)
        throw std::runtime_error("vessel_derivative: pitch beyond 80 degrees, Euler rates unusable");

    const double cphi = std::cos(phi), sphi = std::sin(phi);
    const double cth = std::cos(theta), tth = std::tan(theta);

    Eigen::Matrix3d T;
    T << 1.0, sphi * tth, cphi * tth,
         0.0, cphi, -sphi,
         0.0, sphi / cth, cphi / cth;

    const Eigen::Vector3d v = s.nu.head<3>();
    const Eigen::Vector3d w = s.nu.tail<3>();

    Vector6d eta_dot;
    eta_dot.head<3>() = body_to_world(phi, theta, s.eta[5]) * v;
    eta_dot.tail<3>() = T * w;

    // Rigid-body and added-mass Coriolis blocks; both satisfy nu' C nu = 0.
    const Eigen::Vector3d Iw(p.Ix * w.x(), p.Iy * w.y(), p.Iz * w.z());
    const Eigen::Matrix3d Sav = skew(p.M_A_lin * v);
    Matrix6d C = Matrix6d::Zero();
    C.topRightCorner<3, 3>() = -p.m * skew(w) - Sav;
    C.bottomLeftCorner<3, 3>() = -p.m * skew(v) - Sav;
    C.bottomRightCorner<3, 3>() = -skew(Iw) - skew(p.M_A_rot * w);

    const Vector6d rhs = tau - C * s.nu - p.D * s.nu + b;
    const Vector6d nu_dot = p.M.ldlt().solve(rhs);

    Eigen::VectorXd out(12);
    out << eta_dot, nu_dot;
    return out;
}

Eigen::VectorXd reduced_state(const FullState& s) {
    const Eigen::Vector3d vel_world = body_to_world(s.eta[3], s.eta[4], s.eta[5]) * s.nu.head<3>();
    Eigen::VectorXd r(kReducedDim);
    r[kIdxPx] = s.eta[0];
    r[kIdxPy] = s.eta[1];
    r[kIdxPsi] = s.eta[5];
    r[kIdxVx] = vel_world.x();
    r[kIdxVy] = vel_world.y();
    r[kIdxVel] = std::hypot(vel_world.x(), vel_world.y());
    return r;
}

Trajectory integrate(const std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)>& deriv,
                     const Eigen::VectorXd& x0, double t0, double duration,
                     double dt_internal, double dt_out) {
    const int sub = substep_count(dt_out, dt_internal, "integrate: dt_out");
    const int steps = substep_count(duration, dt_out, "integrate: duration");
    if (!x0.allFinite())
        throw std::invalid_argument("integrate: initial state is not finite");

    Trajectory traj;
    traj.dt = dt_out;
    traj.states.reserve(static_cast<std::size_t>(steps) + 1);
    traj.states.push_back(x0);

    Eigen::VectorXd x = x0;
    for (int s = 0; s < steps; ++s) {
        for (int k = 0; k < sub; ++k) {
            const double t = t0 + s * dt_out + k * dt_internal;
            x = rk4_step(deriv, x, t, dt_internal);
        }
        if (!x.allFinite())
            throw std::runtime_error("integrate: state diverged at t = " +
                                     std::to_string(t0 + (s + 1) * dt_out));
        traj.states.push_back(x);
    }
    return traj;
}

Stepper vessel_stepper(const VesselParams& p, double dt_internal) {
    p.validate();
    return [p, dt_internal](const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                            const Eigen::VectorXd& d, double t, double dt) -> Eigen::VectorXd {
        if (x.size() != 12)
            throw std::invalid_argument("vessel_stepper: state must be 12 entries [eta; nu]");
        if (u.size() != 6 || d.size() != 6)
            throw std::invalid_argument("vessel_stepper: tau and b must be 6-vectors");
        const int sub = substep_count(dt, dt_internal, "vessel_stepper");
        const Vector6d tau = u;
        const Vector6d b = d;
        const auto f = [&](const Eigen::VectorXd& xs, double ts) -> Eigen::VectorXd {
            (void)ts;
            return vessel_derivative(FullState::from_vector(xs), tau, b, p);
        };
        Eigen::VectorXd s = x;
        try {
            for (int k = 0; k < sub; ++k) s = rk4_step(f, s, t + k * dt_internal, dt_internal);
        } catch (const std::runtime_error&) {
            // Gimbal lock is divergence as far as trajectory sampling goes;
            // a NaN state makes the sampler reject and redraw.
            return Eigen::VectorXd::Constant(12, std::numeric_limits<double>::quiet_NaN());
        }
        if (!s.allFinite()) return Eigen::VectorXd::Constant(12, std::numeric_limits<double>::quiet_NaN());
        for (int i = 3; i < 6; ++i) s[i] = normalize_radian_pi(s[i]);
        return s;
    };
}

LosGuidance::LosGuidance(const VesselParams& params, double v_des, const LosGains& gains)
    : gains_(gains), v_des_(v_des) {
    if (gains_.lookahead <= 0.0) gains_.lookahead = 2.0 * params.L;
    if (gains_.k_r <= 0.0) gains_.k_r = 3.0 * params.D(5, 5);
    if (gains_.k_u <= 0.0) gains_.k_u = 3.0 * params.D(0, 0);
    if (gains_.tau_surge_max <= 0.0) gains_.tau_surge_max = params.tau_surge_max;
    if (gains_.tau_yaw_max <= 0.0) gains_.tau_yaw_max = params.tau_yaw_max;
    if (!(gains_.tau_surge_max > 0.0) || !(gains_.tau_yaw_max > 0.0))
        throw std::invalid_argument("LosGuidance: actuator limits must be positive");
    d_surge_ = params.D(0, 0);
    d_yaw_ = params.D(5, 5);
}

void LosGuidance::set_waypoints(std::vector<Eigen::Vector2d> waypoints,
                                const Eigen::Vector2d& anchor) {
    waypoints_ = std::move(waypoints);
    anchor_ = anchor;
    active_ = 0;
}

Vector6d LosGuidance::command(const FullState& s) {
    Vector6d tau = Vector6d::Zero();
    const Eigen::Vector2d pos(s.eta[0], s.eta[1]);
    while (active_ < waypoints_.size() &&
           (pos - waypoints_[active_]).norm() < gains_.accept_radius) {
        anchor_ = waypoints_[active_];
        ++active_;
    }
    if (active_ >= waypoints_.size()) return tau;

    const Eigen::Vector2d wpt = waypoints_[active_];
    const Eigen::Vector2d seg = wpt - anchor_;
    double chi = 0.0;
    double cross_track = 0.0;
    if (seg.norm() < 1e-9) {
        const Eigen::Vector2d rel = wpt - pos;
        chi = std::atan2(rel.y(), rel.x());
    } else {
        chi = std::atan2(seg.y(), seg.x());
        const Eigen::Vector2d rel = pos - anchor_;
        cross_track = -std::sin(chi) * rel.x() + std::cos(chi) * rel.y();
    }

    const double psi_d = chi + std::atan2(-cross_track, gains_.lookahead);
    const double r_des = std::clamp(gains_.k_psi * normalize_radian_pi(psi_d - s.eta[5]),
                                    -gains_.r_max, gains_.r_max);

    // Feedforward holds the steady state (tau = D x at equilibrium), feedback
    // closes the gap with ~1 s time constants given k = 3 D.
    tau[0] = std::clamp(d_surge_ * v_des_ + gains_.k_u * (v_des_ - s.nu[0]),
                        -gains_.tau_surge_max, gains_.tau_surge_max);
    tau[5] = std::clamp(d_yaw_ * r_des + gains_.k_r * (r_des - s.nu[5]),
                        -gains_.tau_yaw_max, gains_.tau_yaw_max);
    return tau;
}

}  // namespace pacstl
