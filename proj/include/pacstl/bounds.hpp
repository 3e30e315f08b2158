#pragma once

#include <Eigen/Dense>
#include <utility>

#include "pacstl/interval.hpp"
#include "pacstl/sets.hpp"

namespace pacstl {

// Reduced-state coordinate layout shared by tubes, bounds, and the monitor:
// planar position, heading, planar velocity, speed.
inline constexpr int kIdxPx = 0;
inline constexpr int kIdxPy = 1;
inline constexpr int kIdxPsi = 2;
inline constexpr int kIdxVx = 3;
inline constexpr int kIdxVy = 4;
inline constexpr int kIdxVel = 5;
inline constexpr int kReducedDim = 6;

// Ego vessel pose and velocity as seen by the rule predicates.
struct EgoState {
    Eigen::Vector2d p = Eigen::Vector2d::Zero();
    double psi = 0.0;
    Eigen::Vector2d v = Eigen::Vector2d::Zero();
    double vel = 0.0;

    static EgoState from_velocity(const Eigen::Vector2d& p, double psi, const Eigen::Vector2d& v);
};

// Normalization constants of the rule predicates. Scaling is injected, never
// global: it shifts which time step ends up characteristic.
struct RuleParams {
    double v_max = 0.4;
    double a_max = 0.15;
    double r_max = 0.8;
    double t_h = 10.0;
};

// Wraps an angle into (-pi, pi]; pi maps to pi, -pi maps to pi.
double normalize_radian_pi(double angle);

// Half-plane normal and offset for the relative-position predicate:
// a = (sigma / v_max) [-sin(psi_e + gamma), cos(psi_e + gamma)], b = a . p_e.
std::pair<Eigen::Vector2d, double> position_halfplane_params(const EgoState& ego, double gamma_p,
                                                             int sigma, double v_max);

// Exact [min, max] of a . x - b over the set, via support functions.
Interval linear_bounds(const Eigen::VectorXd& a, double b, const ConvexSet& set);

// Encloses (|p - p_e| / t_h - |v - v_e|) / a_max over the set: the smallest
// distance pairs with the largest relative speed and vice versa.
Interval time_horizon_bounds(const EgoState& ego, const ConvexSet& set, const RuleParams& params);

// Exact bounds for the orientation predicate over a heading interval of width
// at most pi. The value at a single heading is the wrapped deviation from the
// relative bearing, signed by sigma and reflected beyond pi/2; over an
// interval the extrema sit at the endpoints or, when the heading arc crosses
// a deviation of +-pi/2, at that interior peak of +-pi/2.
Interval orientation_halfplane_bounds(const Interval& psi_int, double psi_e, double gamma_psi,
                                      int sigma, double r_max);

enum class AtomicKind { PositionHalfplane, TimeHorizon, OrientationHalfplane };

// One rule predicate: gamma and sigma apply to the half-plane kinds and are
// ignored for the time-horizon kind.
struct AtomicSpec {
    AtomicKind kind = AtomicKind::TimeHorizon;
    double gamma = 0.0;
    int sigma = 1;
};

// Interval of the predicate's robustness over all members of a reduced-state
// set.
Interval atomic_bounds(const AtomicSpec& atomic, const EgoState& ego, const ConvexSet& set,
                       const RuleParams& params);

// Scalar robustness of the predicate at a single reduced state; collapses to
// a point interval of atomic_bounds on degenerate sets.
double atomic_scalar(const AtomicSpec& atomic, const EgoState& ego, const Eigen::VectorXd& state,
                     const RuleParams& params);

}  // namespace pacstl
