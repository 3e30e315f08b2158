#include "pacstl/bounds.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pacstl {

namespace {

constexpr double kPi = std::numbers::pi;

void check_params(const RuleParams& p) {
    if (!(p.v_max > 0.0) || !(p.a_max > 0.0) || !(p.r_max > 0.0) || !(p.t_h > 0.0))
        throw std::invalid_argument("RuleParams: all parameters must be positive");
}

void check_reduced_dim(const ConvexSet& set, const char* where) {
    if (set_dim(set) != kReducedDim)
        throw std::invalid_argument(std::string(where) + ": expected a " +
                                    std::to_string(kReducedDim) + "-dimensional reduced-state set");
}

}  // namespace

EgoState EgoState::from_velocity(const Eigen::Vector2d& p, double psi, const Eigen::Vector2d& v) {
    EgoState e;
    e.p = p;
    e.psi = psi;
    e.v = v;
    e.vel = v.norm();
    return e;
}

double normalize_radian_pi(double angle) {
    if (!std::isfinite(angle)) throw std::invalid_argument("normalize_radian_pi: non-finite angle");
    double a = std::fmod(angle, 2.0 * kPi);
    if (a <= -kPi) a += 2.0 * kPi;
    if (a > kPi) a -= 2.0 * kPi;
    return a;
}

std::pair<Eigen::Vector2d, double> position_halfplane_params(const EgoState& ego, double gamma_p,
                                                             int sigma, double v_max) {
    if (sigma != 1 && sigma != -1)
        throw std::invalid_argument("position_halfplane_params: sigma must be +1 or -1");
    if (!(v_max > 0.0)) throw std::invalid_argument("position_halfplane_params: v_max <= 0");
    const double ang = ego.psi + gamma_p;
    const Eigen::Vector2d a =
        (static_cast<double>(sigma) / v_max) * Eigen::Vector2d(-std::sin(ang), std::cos(ang));
    return {a, a.dot(ego.p)};
}

Interval linear_bounds(const Eigen::VectorXd& a, double b, const ConvexSet& set) {
    if (a.size() != set_dim(set)) throw std::invalid_argument("linear_bounds: dimension mismatch");
    return Interval(-support(set, -a) - b, support(set, a) - b);
}

Interval time_horizon_bounds(const EgoState& ego, const ConvexSet& set, const RuleParams& params) {
    check_params(params);
    check_reduced_dim(set, "time_horizon_bounds");
    const Interval D = norm_range(project_plane(set, kIdxPx, kIdxPy), ego.p);
    const Interval S = norm_range(project_plane(set, kIdxVx, kIdxVy), ego.v);
    return Interval((D.lo / params.t_h - S.hi) / params.a_max,
                    (D.hi / params.t_h - S.lo) / params.a_max);
}

namespace {

// Signed, reflected deviation: the robustness numerator at a single heading.
double orientation_value(double psi, double gamma_rel, int sigma) {
    const double delta = normalize_radian_pi(psi - gamma_rel);
    const int sgn = delta < 0.0 ? -sigma : sigma;
    double mag = std::abs(delta);
    if (mag > kPi / 2.0) mag = kPi - mag;
    return sgn * mag;
}

}  // namespace

Interval orientation_halfplane_bounds(const Interval& psi_int, double psi_e, double gamma_psi,
                                      int sigma, double r_max) {
    if (sigma != 1 && sigma != -1)
        throw std::invalid_argument("orientation_halfplane_bounds: sigma must be +1 or -1");
    if (!(r_max > 0.0)) throw std::invalid_argument("orientation_halfplane_bounds: r_max <= 0");
    if (psi_int.width() > kPi)
        throw std::invalid_argument("orientation_halfplane_bounds: heading interval wider than pi");

    const double gamma_rel = normalize_radian_pi(psi_e + gamma_psi);
    double h_lo = std::min(orientation_value(psi_int.lo, gamma_rel, sigma),
                           orientation_value(psi_int.hi, gamma_rel, sigma));
    double h_hi = std::max(orientation_value(psi_int.lo, gamma_rel, sigma),
                           orientation_value(psi_int.hi, gamma_rel, sigma));

    // As a function of the heading, the value is a triangular wave whose only
    // interior extrema sit where the deviation crosses +-pi/2 (it runs
    // monotonically through the wrap at pi). Widen to the extremum whenever
    // the heading arc spans such a crossing; endpoints cover everything else.
    const double delta_lo = normalize_radian_pi(psi_int.lo - gamma_rel);
    const auto arc_crosses = [&](double target) {
        double ahead = std::fmod(target - delta_lo, 2.0 * kPi);
        if (ahead < 0.0) ahead += 2.0 * kPi;
        return ahead <= psi_int.width();
    };
    if (arc_crosses(kPi / 2.0)) {
        h_lo = std::min(h_lo, sigma * kPi / 2.0);
        h_hi = std::max(h_hi, sigma * kPi / 2.0);
    }
    if (arc_crosses(-kPi / 2.0)) {
        h_lo = std::min(h_lo, -sigma * kPi / 2.0);
        h_hi = std::max(h_hi, -sigma * kPi / 2.0);
    }
    return Interval(h_lo / r_max, h_hi / r_max);
}

Interval atomic_bounds(const AtomicSpec& atomic, const EgoState& ego, const ConvexSet& set,
                       const RuleParams& params) {
    check_params(params);
    check_reduced_dim(set, "atomic_bounds");
    switch (atomic.kind) {
        case AtomicKind::PositionHalfplane: {
            const auto [a2, b] = position_halfplane_params(ego, atomic.gamma, atomic.sigma,
                                                           params.v_max);
            Eigen::VectorXd a = Eigen::VectorXd::Zero(kReducedDim);
            a(kIdxPx) = a2(0);
            a(kIdxPy) = a2(1);
            return linear_bounds(a, b, set);
        }
        case AtomicKind::TimeHorizon:
            return time_horizon_bounds(ego, set, params);
        case AtomicKind::OrientationHalfplane:
            return orientation_halfplane_bounds(project_coord(set, kIdxPsi), ego.psi, atomic.gamma,
                                                atomic.sigma, params.r_max);
    }
    throw std::invalid_argument("atomic_bounds: unknown atomic kind");
}

double atomic_scalar(const AtomicSpec& atomic, const EgoState& ego, const Eigen::VectorXd& state,
                     const RuleParams& params) {
    check_params(params);
    if (state.size() != kReducedDim)
        throw std::invalid_argument("atomic_scalar: expected a reduced state");
    switch (atomic.kind) {
        case AtomicKind::PositionHalfplane: {
            const auto [a2, b] = position_halfplane_params(ego, atomic.gamma, atomic.sigma,
                                                           params.v_max);
            return a2(0) * state(kIdxPx) + a2(1) * state(kIdxPy) - b;
        }
        case AtomicKind::TimeHorizon: {
            const double dist = (state.segment<2>(kIdxPx) - ego.p).norm();
            const double speed = (state.segment<2>(kIdxVx) - ego.v).norm();
            return (dist / params.t_h - speed) / params.a_max;
        }
        case AtomicKind::OrientationHalfplane: {
            const Interval point(state(kIdxPsi), state(kIdxPsi));
            return orientation_halfplane_bounds(point, ego.psi, atomic.gamma, atomic.sigma,
                                                params.r_max)
                .lo;
        }
    }
    throw std::invalid_argument("atomic_scalar: unknown atomic kind");
}

}  // namespace pacstl
