#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include <json.hpp>

#include "pacstl/interval.hpp"
#include "pacstl/sets.hpp"

namespace pacstl {

// Sampled trajectory on a fixed grid; states[0] is the initial state, so a
// horizon of T steps stores T+1 states.
struct Trajectory {
    std::vector<Eigen::VectorXd> states;
    double dt = 0.0;
};

// Black-box one-step simulator: next state from (state, input, disturbance,
// absolute time, step size).
using Stepper = std::function<Eigen::VectorXd(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                              const Eigen::VectorXd& d, double t, double dt)>;

// Uniform sampling boxes and horizon for the scenario program. Inputs are
// drawn once per trajectory, disturbances are redrawn every resample_period
// steps.
struct SampleSpec {
    Eigen::VectorXd x0_lo, x0_hi;
    Eigen::VectorXd u_lo, u_hi;
    Eigen::VectorXd d_lo, d_hi;
    int resample_period = 2;
    int steps = 1;
    double dt = 0.5;
    int N = 1;  // training sample count
    int M = 1;  // holdout sample count
    std::uint64_t seed = 0;
};

// Deterministic given seed; non-finite simulator output rejects the sample and
// redraws it (warning once rejects exceed 1% of count).
std::vector<Trajectory> sample_trajectories(const Stepper& sim, const SampleSpec& spec, int count,
                                            std::uint64_t seed);

// Seed used for the holdout batch so it never overlaps the training streams.
std::uint64_t holdout_seed(std::uint64_t seed);

// Rectangle footprint applied to states carrying (p_x, p_y, psi) in their
// first three coordinates. Zero extents disable expansion.
struct CornerGeom {
    double half_len = 0.0;
    double half_wid = 0.0;

    bool enabled() const { return half_len != 0.0 || half_wid != 0.0; }
};

// Replaces each state by the four rectangle corners rotated by its heading;
// remaining coordinates are copied. Identity when both extents are zero.
std::vector<Eigen::VectorXd> expand_corners(const std::vector<Eigen::VectorXd>& points,
                                            double half_len, double half_wid);

Eigen::VectorXd centroid(const std::vector<Eigen::VectorXd>& points);

// Minimum-volume enclosing ellipsoid via Khachiyan ascent with away steps.
// Every input point ends up inside exactly (final rescale); volume is within
// the iteration certificate of optimal. Rank-deficient clouds are regularized
// with a 1e-9 jitter and a warning.
Ellipsoid fit_mvee(const std::vector<Eigen::VectorXd>& points, double tol = 1e-6);

// Scales template generator lengths: G = G0 diag(lambda) with the smallest
// lambda covering all points. Square invertible G0 admits the exact per-axis
// closed form; otherwise pseudoinverse coordinates seed a uniform feasibility
// scale-up. Zero scales are floored at 1e-9 with a warning.
Zonotope fit_zonotope_template(const std::vector<Eigen::VectorXd>& points, const Eigen::VectorXd& c,
                               const Eigen::MatrixXd& G0);

// Best-effort descent on log det(G G^T) over the full generator matrix, with
// point containment enforced through a growing quadratic penalty and a final
// uniform inflation. Returns the input when no feasible improvement is found;
// iters = 0 is the identity.
Zonotope refine_zonotope(const Zonotope& z, const std::vector<Eigen::VectorXd>& points, int iters);

struct ViolationCounts {
    int k_tube = 0;
    std::vector<int> k_t;
};

// Per-step and whole-tube holdout violation counts; membership is
// corner-expanded when the geometry is enabled (all four corners must lie
// inside).
ViolationCounts count_violations(const std::vector<ConvexSet>& sets,
                                 const std::vector<Trajectory>& test, const CornerGeom& geom);

// Largest epsilon whose binomial tail at k out of M still reaches beta:
// max { e : sum_{j<=k} C(M,j) e^j (1-e)^(M-j) >= beta }. Bisection in
// log-space to absolute tolerance 1e-12.
double binomial_tail_inversion(int k, int M, double beta);

// Set family fitted per time step.
struct TubeRep {
    enum class Kind { Ellipsoid, Zonotope };
    Kind kind = Kind::Ellipsoid;
    Eigen::MatrixXd G0;    // zonotope template, ignored for ellipsoids
    int refine_iters = 0;  // optional zonotope refinement passes
};

// Per-step reachable sets (steps 1..T) with the PAC accuracies earned on the
// holdout batch.
struct ReachTube {
    std::vector<ConvexSet> sets;
    double dt = 0.0;
    double eps_tube = 0.0;
    std::vector<double> eps_t;
    double beta = 0.0;
    Interval velocity_bucket;
    CornerGeom corners;
};

// Fits sets on the training batch and scores accuracies on the holdout batch.
// Throws if any training state escapes its fitted set.
ReachTube assemble_tube(const std::vector<Trajectory>& training,
                        const std::vector<Trajectory>& holdout, const TubeRep& rep,
                        const CornerGeom& geom, double beta,
                        const Interval& velocity_bucket = Interval());

// Samples N training and M holdout trajectories, then assembles the tube.
ReachTube build_tube(const Stepper& sim, const SampleSpec& spec, const TubeRep& rep,
                     const CornerGeom& geom, double beta,
                     const Interval& velocity_bucket = Interval());

nlohmann::json tube_to_json(const ReachTube& tube);
ReachTube tube_from_json(const nlohmann::json& j);

}  // namespace pacstl
