#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

#include "pacstl/scenario.hpp"

namespace pacstl {

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;

// Forced Duffing oscillator, the 2-state chaotic benchmark system.
struct DuffingParams {
    double alpha = 0.05;
    double gamma = 0.4;
    double omega = 1.3;
};

// (x_dot, y_dot) = (y, -alpha*y + x - x^3 + gamma*cos(omega*t)).
Eigen::Vector2d duffing_derivative(double x, double y, double t,
                                   const DuffingParams& p = {});

// Stepper over [t, t+dt] with internal RK4 substeps of dt_internal.
// Control and disturbance inputs are ignored (the forcing is built in).
Stepper duffing_stepper(const DuffingParams& p = {}, double dt_internal = 0.05);

// Physical constants of one vessel. M is the effective inertia (rigid body
// plus added mass) and is used directly in nu_dot = M^-1 (tau - C nu - D nu + b);
// m and I_x..I_z only enter the rigid-body Coriolis blocks. rho is back-solved
// from the effective surge mass so that m = rho * L * B * T_draft holds.
struct VesselParams {
    std::string name;
    double L = 0.0;
    double B = 0.0;
    double T_draft = 0.0;
    double rho = 0.0;
    double m = 0.0;
    double Ix = 0.0;
    double Iy = 0.0;
    double Iz = 0.0;
    Matrix6d M = Matrix6d::Zero();
    Eigen::Matrix3d M_A_lin = Eigen::Matrix3d::Zero();
    Eigen::Matrix3d M_A_rot = Eigen::Matrix3d::Zero();
    Matrix6d D = Matrix6d::Zero();

    // Actuator limits applied by the LOS controller (not plant constraints).
    double tau_surge_max = 0.0;
    double tau_yaw_max = 0.0;

    static VesselParams make_small();
    static VesselParams make_large();

    // M positive definite, D diagonal with non-negative entries, m > 0.
    void validate() const;
};

// 6-DOF pose eta = (x, y, z, phi, theta, psi) in the world frame and body
// velocities nu = (u, v, w, p, q, r).
struct FullState {
    Vector6d eta = Vector6d::Zero();
    Vector6d nu = Vector6d::Zero();

    static FullState from_vector(const Eigen::VectorXd& x);  // 12 entries [eta; nu]
    Eigen::VectorXd to_vector() const;

    // Angles wrapped to (-pi, pi]; positions and velocities untouched.
    FullState normalized() const;
};

// Stacked (eta_dot, nu_dot). eta_dot = J(eta) nu with the full Euler-angle
// transform; nu_dot = M^-1 (tau - (C_RB + C_A) nu - D nu + b).
// Throws when |theta| exceeds 80 degrees (Euler rates blow up at +-90).
Eigen::VectorXd vessel_derivative(const FullState& s, const Vector6d& tau,
                                  const Vector6d& b, const VesselParams& p);

// Planar summary [p_x, p_y, psi, v_x, v_y, vel] with world-frame velocity
// components and ground speed vel = hypot(v_x, v_y). This is the coordinate
// system that reachable tubes and the monitor atomics work in.
Eigen::VectorXd reduced_state(const FullState& s);

// Classical fixed-step RK4 from t0 over the given duration, sampled every
// dt_out into a Trajectory (x0 included). dt_out must be a whole number of
// internal steps and the duration a whole number of output steps.
// Throws on non-finite states (divergence).
Trajectory integrate(const std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)>& deriv,
                     const Eigen::VectorXd& x0, double t0, double duration,
                     double dt_internal, double dt_out);

// 12-state vessel stepper for trajectory sampling: x = [eta; nu], u = tau,
// d = b, zero-order hold over the step. Divergence (or a gimbal-lock throw)
// comes back as a NaN state so samplers can reject and redraw.
Stepper vessel_stepper(const VesselParams& p, double dt_internal = 0.05);

// Lookahead line-of-sight guidance gains. Zeros mean "derive from the vessel":
// lookahead = 2L, k_r = 3 * D(5,5), k_u = 3 * D(0,0), clamps from VesselParams.
struct LosGains {
    double lookahead = 0.0;
    double accept_radius = 0.5;
    double k_psi = 0.5;
    double k_r = 0.0;
    double k_u = 0.0;
    double r_max = 0.8;
    double tau_surge_max = 0.0;
    double tau_yaw_max = 0.0;
};

// Waypoint-following surge/yaw controller. The path is the segment from the
// previous waypoint (or the anchor point before the first switch) to the
// active waypoint; the desired heading looks ahead along the path to pull the
// cross-track error to zero. Output is a 6-vector force/moment command with
// only surge and yaw populated.
class LosGuidance {
public:
    LosGuidance(const VesselParams& params, double v_des, const LosGains& gains = {});

    // Replaces the route. The anchor is where the first path segment starts,
    // normally the vessel position at the time of the replan.
    void set_waypoints(std::vector<Eigen::Vector2d> waypoints, const Eigen::Vector2d& anchor);

    // Advances the active waypoint when within the acceptance radius, then
    // computes the clamped command. No waypoints (or route finished) => zero.
    Vector6d command(const FullState& s);

    std::size_t active_waypoint() const { return active_; }
    bool finished() const { return active_ >= waypoints_.size(); }
    const std::vector<Eigen::Vector2d>& waypoints() const { return waypoints_; }

private:
    LosGains gains_;
    double v_des_ = 0.0;
    double d_surge_ = 0.0;
    double d_yaw_ = 0.0;
    std::vector<Eigen::Vector2d> waypoints_;
    Eigen::Vector2d anchor_ = Eigen::Vector2d::Zero();
    std::size_t active_ = 0;
};

}  // namespace pacstl
