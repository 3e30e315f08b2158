#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pacstl/bounds.hpp"
#include "pacstl/istl.hpp"
#include "pacstl/scenario.hpp"
#include "pacstl/sim.hpp"

namespace pacstl {

// Give-way sector edge pair (lo, hi) in radians as tabulated. Bearings are
// clockwise-positive (deviation to starboard is positive), so the position
// sector angles enter the world-frame half-plane formula negated.
struct SectorPair {
    double lo = 0.0;
    double hi = 0.0;
};

enum class EncounterType { HeadOn, Crossing };
enum class ScenarioType { HeadOn, Crossing, InBetween };

ScenarioType scenario_type_from_string(const std::string& name);
std::string to_string(ScenarioType type);

// "small" or "large" (also accepts S / L shorthand).
VesselParams vessel_by_name(const std::string& name);

// Experiment constants: rule normalizers, sector tables, input boxes, initial
// conditions, guidance and evasion parameters. defaults() is the tabletop
// vessel setup every test and tool starts from.
struct MaritimeTables {
    RuleParams rules;

    SectorPair pos_head_on;
    SectorPair pos_crossing;
    SectorPair ori_head_on;
    SectorPair ori_crossing;

    double t_start = 1.0;  // encounter persistence window, seconds
    double t_end = 2.5;
    double dt = 0.5;       // tube step

    Vector6d tau_lo = Vector6d::Zero();  // other-vessel force box
    Vector6d tau_hi = Vector6d::Zero();
    Vector6d b_lo = Vector6d::Zero();    // disturbance box
    Vector6d b_hi = Vector6d::Zero();
    Vector6d tau_real = Vector6d::Zero();

    std::vector<Interval> buckets;  // surge velocity buckets U1..U4

    // Tube-training initial box (tube frame): x pinned to the origin, surge
    // drawn from the bucket, remaining velocities zero.
    Interval init_y;
    Interval init_z;
    Interval init_phi;
    Interval init_theta;
    Interval init_psi;

    // Scenario initial poses (x, y, psi; velocities start at rest) and goal.
    Eigen::Vector3d pose0_ego = Eigen::Vector3d::Zero();
    Eigen::Vector3d pose0_other_head_on = Eigen::Vector3d::Zero();
    Eigen::Vector3d pose0_other_crossing = Eigen::Vector3d::Zero();
    Eigen::Vector3d pose0_other_in_between = Eigen::Vector3d::Zero();
    Eigen::Vector2d p_goal = Eigen::Vector2d::Zero();

    double v_des = 0.3;
    double t_turn = 30.0;
    double t_parallel = 15.0;
    double psi_turn = 0.8;

    // Baseline ego box in the tube frame: per-step surge position window plus
    // shared bounds on the remaining coordinates.
    std::vector<Interval> ego_px;
    Interval ego_py;
    Interval ego_psi;
    Interval ego_vx;
    Interval ego_vy;

    static MaritimeTables defaults();
    Eigen::Vector3d other_pose0(ScenarioType type) const;
};

// One monitored give-way specification,
//   phi = not(encounter) and G_[t_start, t_end](encounter),
// where encounter conjoins both position sector edges, both relative-heading
// edges, and being inside the time horizon; atoms maps each atomic name in
// the formula to its predicate.
struct EncounterSpec {
    std::string label;
    SpecNode formula;
    std::vector<std::pair<std::string, AtomicSpec>> atoms;
    double t_start = 1.0;
    double t_end = 2.5;
};

EncounterSpec build_encounter_spec(EncounterType type, const MaritimeTables& tables);

// The formula with both window ends pulled forward by dt so that evaluation
// at signal index 0 (= one tube step from now) lines up with signals indexed
// by tube step.
SpecNode anchored_formula(const EncounterSpec& spec, double dt);

// 12-D vessel states down to the 6-D reduced layout tubes are fitted in.
Trajectory reduce_trajectory(const Trajectory& full);
std::vector<Trajectory> reduce_trajectories(const std::vector<Trajectory>& full);

// Initial/input boxes for tube training of one surge bucket.
SampleSpec tube_sample_spec(const Interval& bucket, const MaritimeTables& tables, int steps,
                            std::uint64_t seed);

// Samples the vessel with forces from the tau box and disturbances from the
// b box, reduces to 6-D, fits one set per step with hull-corner margins, and
// certifies on an independent holdout batch.
ReachTube build_maritime_tube(const VesselParams& vessel, const Interval& bucket,
                              const TubeRep& rep, const MaritimeTables& tables, int train,
                              int holdout, double beta, std::uint64_t seed);

// Interval signal of every atom across the tube steps for the given
// tube-frame ego predictions (one per tube step, aligned with tube.sets).
IntervalSignal atomic_signals(const EncounterSpec& spec, const std::vector<EgoState>& ego,
                              const ReachTube& tube, const RuleParams& rules);

// Point-interval counterpart against one sampled trajectory of the other
// vessel (reduced states; states[k+1] pairs with ego[k]).
IntervalSignal scalar_signals(const EncounterSpec& spec, const std::vector<EgoState>& ego,
                              const Trajectory& other_reduced, const RuleParams& rules);

// Constant speed-and-orientation prediction over the tube steps, starting one
// step after the given state.
std::vector<EgoState> predict_ego(const EgoState& now, double dt, int steps);

// World-frame reduced states into the frame the tube was fitted in: the other
// vessel's current position and heading become origin and zero bearing.
EgoState to_tube_frame(const Eigen::VectorXd& ego_reduced, const Eigen::VectorXd& other_reduced);

struct MonitorVerdict {
    std::string label;
    PacRobustness rob;
    bool triggered = false;  // upper robustness bound above zero
};

struct MonitorResult {
    std::vector<MonitorVerdict> specs;
    int bucket = -1;
    bool bucket_clamped = false;
    bool triggered = false;
};

// One monitor tick: select the tube by the other vessel's surge, transform
// the ego into the tube frame, predict it forward, evaluate every spec and
// attach the PAC guarantee.
MonitorResult monitor_step(const Eigen::VectorXd& ego_reduced,
                           const Eigen::VectorXd& other_reduced,
                           const std::vector<EncounterSpec>& specs,
                           const std::vector<ReachTube>& tubes, GuaranteeMode mode,
                           const RuleParams& rules);

// Starboard evasion route from the trigger pose: out at psi - psi_turn for
// t_turn seconds worth of travel, then parallel to the old heading for
// t_parallel seconds worth.
std::pair<Eigen::Vector2d, Eigen::Vector2d> evasive_waypoints(const Eigen::Vector2d& p,
                                                              double psi,
                                                              const MaritimeTables& tables);

// Oriented-rectangle overlap test (separating axes) for hulls of half length
// hl and half width hw at the given planar poses.
bool hulls_overlap(const Eigen::Vector2d& pa, double psi_a, double hla, double hwa,
                   const Eigen::Vector2d& pb, double psi_b, double hlb, double hwb);

struct ScenarioConfig {
    ScenarioType type = ScenarioType::HeadOn;
    std::string ego = "small";
    std::string other = "large";
    double t_h = 10.0;
    double t_max = 60.0;
    double dt_internal = 0.05;
    double monitor_period = 5.0 / 3.0;
    double b_resample_period = 1.0;  // seconds between disturbance redraws
    std::uint64_t seed = 1;
    GuaranteeMode mode = GuaranteeMode::Tube;
    bool other_enabled = true;
    bool use_real_tau = false;  // tau_real instead of a sampled force
    MaritimeTables tables;

    ScenarioConfig() : tables(MaritimeTables::defaults()) {}
};

struct MonitorTick {
    double t = 0.0;
    int bucket = -1;
    Eigen::VectorXd ego;    // reduced, world frame
    Eigen::VectorXd other;  // empty when the other vessel is disabled
    std::vector<MonitorVerdict> specs;
};

struct ScenarioRun {
    double t_max = 0.0;
    double t_e = -1.0;  // first trigger of any spec; -1 means never
    std::string trigger_spec;
    Interval interval_at_trigger;
    double eps_at_trigger = 0.0;
    std::vector<std::string> spec_labels;
    std::vector<double> spec_t_e;  // per spec, -1 means never
    bool collision = false;
    double collision_time = -1.0;
    bool bucket_clamped = false;
    std::vector<MonitorTick> ticks;

    bool triggered() const { return t_e >= 0.0; }
    // Never-triggering runs count as triggering at the horizon, so means over
    // seeds stay well defined.
    double t_e_or_max() const { return triggered() ? t_e : t_max; }
};

// Closed-loop run: LOS-guided ego versus an other vessel under constant
// sampled force, monitored at the configured period; the first trigger plans
// the starboard evasion route, collisions are logged but not fatal.
ScenarioRun run_scenario(const ScenarioConfig& cfg, const std::vector<ReachTube>& tubes);

// Monitor log, one row per (tick, spec): time, spec, lo, hi, eps, t_low,
// t_up, trigger.
void write_run_csv(std::ostream& os, const ScenarioRun& run);

// Vessel tracks at monitor resolution: t, bucket, then the reduced ego and
// other states.
void write_track_csv(std::ostream& os, const ScenarioRun& run);
nlohmann::json run_summary_json(const ScenarioRun& run);

// Direct-sampling comparison on shared samples. For each ego track: interval
// robustness of every atom per step and of the spec from the tube, versus the
// empirical [min, max] over the training trajectories; epsilons are the PAC
// timepoint epsilon and the binomial inversion of holdout violations of the
// empirical spec interval.
struct BaselineAtomResult {
    std::string atom;
    int step = 0;
    Interval direct;
    Interval pac;
};

struct BaselineEgoResult {
    EgoState ego0;
    std::vector<BaselineAtomResult> atoms;
    Interval spec_direct;
    Interval spec_pac;
    double eps_direct = 0.0;
    double eps_pac = 0.0;
};

std::vector<std::vector<EgoState>> sample_baseline_egos(const MaritimeTables& tables, int count,
                                                        std::uint64_t seed);

std::vector<BaselineEgoResult> run_baseline(const EncounterSpec& spec,
                                            const std::vector<std::vector<EgoState>>& egos,
                                            const ReachTube& tube,
                                            const std::vector<Trajectory>& training,
                                            const std::vector<Trajectory>& holdout, double beta,
                                            const RuleParams& rules);

}  // namespace pacstl
