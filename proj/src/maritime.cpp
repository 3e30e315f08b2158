#include "pacstl/maritime.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <utility>

#include "pacstl/rng.hpp"

namespace pacstl {

namespace {

constexpr double kPi = std::numbers::pi;

double deg(double d) { return d * kPi / 180.0; }

Vector6d vec6(double a, double b, double c, double d, double e, double f) {
    Vector6d v;
    v << a, b, c, d, e, f;
    return v;
}

Vector6d draw_box6(RngStream& rs, const Vector6d& lo, const Vector6d& hi) {
    Vector6d v;
    for (int i = 0; i < 6; ++i) v[i] = rs.uniform(lo[i], hi[i]);
    return v;
}

// The conjunction that says "this vessel is an encounter of the given kind":
// inside both position sector edges, inside both relative-heading edges, and
// not beyond the reaction time horizon.
SpecNode encounter_node() {
    return And({Atomic("in_pos_lo"), Atomic("in_pos_hi"), Atomic("in_ori_lo"),
                Atomic("in_ori_hi"), Not(Atomic("beyond_horizon"))});
}

}  // namespace

ScenarioType scenario_type_from_string(const std::string& name) {
    if (name == "head-on" || name == "head_on") return ScenarioType::HeadOn;
    if (name == "crossing") return ScenarioType::Crossing;
    if (name == "in-between" || name == "in_between") return ScenarioType::InBetween;
    throw std::invalid_argument("unknown scenario type: " + name);
}

std::string to_string(ScenarioType type) {
    switch (type) {
        case ScenarioType::HeadOn: return "head-on";
        case ScenarioType::Crossing: return "crossing";
        case ScenarioType::InBetween: return "in-between";
    }
    throw std::logic_error("unreachable scenario type");
}

VesselParams vessel_by_name(const std::string& name) {
    if (name == "small" || name == "S") return VesselParams::make_small();
    if (name == "large" || name == "L") return VesselParams::make_large();
    throw std::invalid_argument("unknown vessel class: " + name + " (want small or large)");
}

MaritimeTables MaritimeTables::defaults() {
    MaritimeTables t;
    t.rules = RuleParams{};

    t.pos_head_on = {deg(10.0), deg(-10.0)};
    t.pos_crossing = {deg(-10.0), deg(-112.5)};
    t.ori_head_on = {deg(170.0), deg(-170.0)};
    t.ori_crossing = {deg(170.0), deg(10.0)};

    t.t_start = 1.0;
    t.t_end = 2.5;
    t.dt = 0.5;

    t.tau_lo = vec6(0.7, -0.1, 0.0, 0.0, 0.0, -0.1);
    t.tau_hi = vec6(1.2, 0.1, 0.0, 0.0, 0.0, 0.1);
    t.b_lo = vec6(-1.102, 0.00764, 0.0, 0.0, 0.0, -0.0941);
    t.b_hi = vec6(0.438, 0.230, 0.0, 0.0, 0.0, 0.0263);
    t.tau_real = vec6(0.5, 0.0, 0.0, 0.0, 0.0, 0.0);

    t.buckets = {Interval(-0.1, 0.1), Interval(0.1, 0.3), Interval(0.3, 0.5),
                 Interval(0.5, 0.7)};

    t.init_y = Interval(-0.1, 0.1);
    t.init_z = Interval(-0.092, 0.0111);
    t.init_phi = Interval(-0.092, 0.0);
    t.init_theta = Interval(-0.079, 0.0);
    t.init_psi = Interval(-0.1, 0.1);

    t.pose0_ego = {5.0, -1.0, kPi};
    t.pose0_other_head_on = {-2.5, 1.5, -kPi / 7.0};
    t.pose0_other_crossing = {-2.5, -1.0, kPi / 7.0};
    t.pose0_other_in_between = {-4.0, 0.0, 0.0};
    t.p_goal = {-4.0, 1.5};

    t.v_des = 0.3;
    t.t_turn = 30.0;
    t.t_parallel = 15.0;
    t.psi_turn = 0.8;

    t.ego_px = {Interval(4.7, 5.3), Interval(4.65, 5.25), Interval(4.6, 5.2),
                Interval(4.55, 5.15), Interval(4.5, 5.1)};
    t.ego_py = Interval(-0.3, 0.3);
    t.ego_psi = Interval(kPi - 0.1, kPi + 0.1);
    t.ego_vx = Interval(-0.15, -0.05);
    t.ego_vy = Interval(-0.05, 0.05);
    return t;
}

Eigen::Vector3d MaritimeTables::other_pose0(ScenarioType type) const {
    switch (type) {
        case ScenarioType::HeadOn: return pose0_other_head_on;
        case ScenarioType::Crossing: return pose0_other_crossing;
        case ScenarioType::InBetween: return pose0_other_in_between;
    }
    throw std::logic_error("unreachable scenario type");
}

EncounterSpec build_encounter_spec(EncounterType type, const MaritimeTables& tables) {
    const SectorPair pos =
        type == EncounterType::HeadOn ? tables.pos_head_on : tables.pos_crossing;
    const SectorPair ori =
        type == EncounterType::HeadOn ? tables.ori_head_on : tables.ori_crossing;

    EncounterSpec spec;
    spec.label = type == EncounterType::HeadOn ? "head_on" : "crossing";
    spec.t_start = tables.t_start;
    spec.t_end = tables.t_end;

    // The sector tables use clockwise-positive bearings while the world frame
    // is counterclockwise, so the position angles go in negated. The heading
    // sector pair encodes its own orientation and passes through as is.
    spec.atoms = {
        {"in_pos_lo", AtomicSpec{AtomicKind::PositionHalfplane, -pos.lo, +1}},
        {"in_pos_hi", AtomicSpec{AtomicKind::PositionHalfplane, -pos.hi, -1}},
        {"in_ori_lo", AtomicSpec{AtomicKind::OrientationHalfplane, ori.lo, +1}},
        {"in_ori_hi", AtomicSpec{AtomicKind::OrientationHalfplane, ori.hi, -1}},
        {"beyond_horizon", AtomicSpec{AtomicKind::TimeHorizon, 0.0, +1}},
    };

    spec.formula = And({Not(encounter_node()),
                        Globally(tables.t_start, tables.t_end, encounter_node())});
    return spec;
}

SpecNode anchored_formula(const EncounterSpec& spec, double dt) {
    if (spec.t_start - dt < -1e-9)
        throw std::invalid_argument("anchored_formula: window opens before the first tube step");
    const double lo = std::max(spec.t_start - dt, 0.0);
    return And({Not(encounter_node()), Globally(lo, spec.t_end - dt, encounter_node())});
}

Trajectory reduce_trajectory(const Trajectory& full) {
    Trajectory out;
    out.dt = full.dt;
    out.states.reserve(full.states.size());
    for (const auto& x : full.states)
        out.states.push_back(reduced_state(FullState::from_vector(x)));
    return out;
}

std::vector<Trajectory> reduce_trajectories(const std::vector<Trajectory>& full) {
    std::vector<Trajectory> out;
    out.reserve(full.size());
    for (const auto& traj : full) out.push_back(reduce_trajectory(traj));
    return out;
}

SampleSpec tube_sample_spec(const Interval& bucket, const MaritimeTables& tables, int steps,
                            std::uint64_t seed) {
    SampleSpec s;
    s.steps = steps;
    s.dt = tables.dt;
    s.resample_period = 2;
    s.seed = seed;
    s.x0_lo = Eigen::VectorXd(12);
    s.x0_hi = Eigen::VectorXd(12);
    s.x0_lo << 0.0, tables.init_y.lo, tables.init_z.lo, tables.init_phi.lo,
        tables.init_theta.lo, tables.init_psi.lo, bucket.lo, 0.0, 0.0, 0.0, 0.0, 0.0;
    s.x0_hi << 0.0, tables.init_y.hi, tables.init_z.hi, tables.init_phi.hi,
        tables.init_theta.hi, tables.init_psi.hi, bucket.hi, 0.0, 0.0, 0.0, 0.0, 0.0;
    s.u_lo = tables.tau_lo;
    s.u_hi = tables.tau_hi;
    s.d_lo = tables.b_lo;
    s.d_hi = tables.b_hi;
    return s;
}

ReachTube build_maritime_tube(const VesselParams& vessel, const Interval& bucket,
                              const TubeRep& rep, const MaritimeTables& tables, int train,
                              int holdout, double beta, std::uint64_t seed) {
    const int steps = static_cast<int>(std::llround(tables.t_end / tables.dt));
    const SampleSpec spec = tube_sample_spec(bucket, tables, steps, seed);
    const Stepper sim = vessel_stepper(vessel);
    const auto training = reduce_trajectories(sample_trajectories(sim, spec, train, seed));
    const auto testing =
        reduce_trajectories(sample_trajectories(sim, spec, holdout, holdout_seed(seed)));
    const CornerGeom geom{vessel.L / 2.0, vessel.B / 2.0};
    return assemble_tube(training, testing, rep, geom, beta, bucket);
}

IntervalSignal atomic_signals(const EncounterSpec& spec, const std::vector<EgoState>& ego,
                              const ReachTube& tube, const RuleParams& rules) {
    if (ego.size() != tube.sets.size())
        throw std::invalid_argument("atomic_signals: need one ego prediction per tube step");
    IntervalSignal sig;
    sig.dt = tube.dt;
    for (const auto& [name, atom] : spec.atoms) {
        auto& trace = sig.atoms[name];
        trace.reserve(ego.size());
        for (std::size_t k = 0; k < ego.size(); ++k)
            trace.push_back(atomic_bounds(atom, ego[k], tube.sets[k], rules));
    }
    return sig;
}

IntervalSignal scalar_signals(const EncounterSpec& spec, const std::vector<EgoState>& ego,
                              const Trajectory& other_reduced, const RuleParams& rules) {
    if (other_reduced.states.size() < ego.size() + 1)
        throw std::invalid_argument("scalar_signals: trajectory shorter than the ego horizon");
    IntervalSignal sig;
    sig.dt = other_reduced.dt;
    for (const auto& [name, atom] : spec.atoms) {
        auto& trace = sig.atoms[name];
        trace.reserve(ego.size());
        for (std::size_t k = 0; k < ego.size(); ++k) {
            const double r = atomic_scalar(atom, ego[k], other_reduced.states[k + 1], rules);
            trace.emplace_back(r, r);
        }
    }
    return sig;
}

std::vector<EgoState> predict_ego(const EgoState& now, double dt, int steps) {
    std::vector<EgoState> out;
    out.reserve(static_cast<std::size_t>(steps));
    for (int k = 1; k <= steps; ++k)
        out.push_back(EgoState::from_velocity(now.p + (k * dt) * now.v, now.psi, now.v));
    return out;
}

EgoState to_tube_frame(const Eigen::VectorXd& ego_reduced, const Eigen::VectorXd& other_reduced) {
    if (ego_reduced.size() != kReducedDim || other_reduced.size() != kReducedDim)
        throw std::invalid_argument("to_tube_frame: expected reduced states");
    const double psi_o = other_reduced[kIdxPsi];
    const double c = std::cos(psi_o), s = std::sin(psi_o);
    Eigen::Matrix2d Rt;  // rotation by -psi_o
    Rt << c, s, -s, c;
    const Eigen::Vector2d p = Rt * (ego_reduced.head<2>() - other_reduced.head<2>());
    const Eigen::Vector2d v =
        Rt * Eigen::Vector2d(ego_reduced[kIdxVx], ego_reduced[kIdxVy]);
    return EgoState::from_velocity(p, normalize_radian_pi(ego_reduced[kIdxPsi] - psi_o), v);
}

MonitorResult monitor_step(const Eigen::VectorXd& ego_reduced,
                           const Eigen::VectorXd& other_reduced,
                           const std::vector<EncounterSpec>& specs,
                           const std::vector<ReachTube>& tubes, GuaranteeMode mode,
                           const RuleParams& rules) {
    if (tubes.empty())
        throw std::invalid_argument("monitor_step: no reachable tubes configured");
    if (ego_reduced.size() != kReducedDim || other_reduced.size() != kReducedDim)
        throw std::invalid_argument("monitor_step: expected reduced states");

    // Surge of the other vessel: its speed projected onto its own heading.
    const double psi_o = other_reduced[kIdxPsi];
    const double u_o = other_reduced[kIdxVx] * std::cos(psi_o) +
                       other_reduced[kIdxVy] * std::sin(psi_o);

    MonitorResult res;
    double best_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < tubes.size(); ++i) {
        const Interval& bucket = tubes[i].velocity_bucket;
        if (bucket.contains(u_o)) {
            res.bucket = static_cast<int>(i);
            res.bucket_clamped = false;
            break;
        }
        const double gap = u_o < bucket.lo ? bucket.lo - u_o : u_o - bucket.hi;
        if (gap < best_gap) {
            best_gap = gap;
            res.bucket = static_cast<int>(i);
            res.bucket_clamped = true;
        }
    }

    const ReachTube& tube = tubes[static_cast<std::size_t>(res.bucket)];
    const EgoState ego0 = to_tube_frame(ego_reduced, other_reduced);
    const auto pred = predict_ego(ego0, tube.dt, static_cast<int>(tube.sets.size()));

    for (const auto& spec : specs) {
        const IntervalSignal sig = atomic_signals(spec, pred, tube, rules);
        const EvalResult r = eval(anchored_formula(spec, tube.dt), sig, 0);
        MonitorVerdict v;
        v.label = spec.label;
        v.rob = attach_guarantee(r, tube, mode);
        v.triggered = v.rob.interval.hi > 0.0;
        res.triggered = res.triggered || v.triggered;
        res.specs.push_back(std::move(v));
    }
    return res;
}

std::pair<Eigen::Vector2d, Eigen::Vector2d> evasive_waypoints(const Eigen::Vector2d& p,
                                                              double psi,
                                                              const MaritimeTables& tables) {
    const double turn = psi - tables.psi_turn;  // starboard of the trigger heading
    const Eigen::Vector2d wp1 =
        p + tables.v_des * tables.t_turn * Eigen::Vector2d(std::cos(turn), std::sin(turn));
    const Eigen::Vector2d wp2 =
        wp1 + tables.v_des * tables.t_parallel * Eigen::Vector2d(std::cos(psi), std::sin(psi));
    return {wp1, wp2};
}

bool hulls_overlap(const Eigen::Vector2d& pa, double psi_a, double hla, double hwa,
                   const Eigen::Vector2d& pb, double psi_b, double hlb, double hwb) {
    const auto axes_of = [](double psi) {
        return std::array<Eigen::Vector2d, 2>{
            Eigen::Vector2d(std::cos(psi), std::sin(psi)),
            Eigen::Vector2d(-std::sin(psi), std::cos(psi))};
    };
    const auto a_axes = axes_of(psi_a);
    const auto b_axes = axes_of(psi_b);
    const Eigen::Vector2d d = pb - pa;
    const auto radius = [](const std::array<Eigen::Vector2d, 2>& ax, double hl, double hw,
                           const Eigen::Vector2d& n) {
        return hl * std::abs(ax[0].dot(n)) + hw * std::abs(ax[1].dot(n));
    };
    for (const auto& axis_set : {a_axes, b_axes})
        for (const auto& n : axis_set)
            if (std::abs(d.dot(n)) >
                radius(a_axes, hla, hwa, n) + radius(b_axes, hlb, hwb, n))
                return false;
    return true;
}

ScenarioRun run_scenario(const ScenarioConfig& cfg, const std::vector<ReachTube>& tubes) {
    const MaritimeTables& t = cfg.tables;
    RuleParams rules = t.rules;
    rules.t_h = cfg.t_h;

    if (cfg.other_enabled && tubes.empty())
        throw std::invalid_argument("run_scenario: the other vessel needs reachable tubes");
    if (!(cfg.dt_internal > 0.0) || !(cfg.t_max > 0.0) || !(cfg.monitor_period > 0.0))
        throw std::invalid_argument("run_scenario: non-positive timing configuration");

    const VesselParams ego_params = vessel_by_name(cfg.ego);
    const VesselParams other_params = vessel_by_name(cfg.other);
    const Stepper ego_step = vessel_stepper(ego_params, cfg.dt_internal);
    const Stepper other_step = vessel_stepper(other_params, cfg.dt_internal);

    const std::vector<EncounterSpec> specs = {
        build_encounter_spec(EncounterType::HeadOn, t),
        build_encounter_spec(EncounterType::Crossing, t)};

    FullState ego;
    ego.eta[0] = t.pose0_ego[0];
    ego.eta[1] = t.pose0_ego[1];
    ego.eta[5] = normalize_radian_pi(t.pose0_ego[2]);

    FullState other;
    const Eigen::Vector3d op = t.other_pose0(cfg.type);
    other.eta[0] = op[0];
    other.eta[1] = op[1];
    other.eta[5] = normalize_radian_pi(op[2]);

    LosGuidance los(ego_params, t.v_des);
    los.set_waypoints({t.p_goal}, ego.eta.head<2>());

    const CounterRng rng(cfg.seed);
    RngStream draws(rng, 0);
    const Vector6d tau_other =
        cfg.use_real_tau ? t.tau_real : draw_box6(draws, t.tau_lo, t.tau_hi);
    Vector6d b_other = Vector6d::Zero();

    const long long steps_total = std::llround(cfg.t_max / cfg.dt_internal);
    const long long b_every =
        std::max<long long>(1, std::llround(cfg.b_resample_period / cfg.dt_internal));

    ScenarioRun run;
    run.t_max = cfg.t_max;
    for (const auto& spec : specs) {
        run.spec_labels.push_back(spec.label);
        run.spec_t_e.push_back(-1.0);
    }

    double next_monitor = 0.0;
    bool evading = false;

    for (long long k = 0;; ++k) {
        const double now = k * cfg.dt_internal;

        if (cfg.other_enabled && now + 1e-9 >= next_monitor) {
            next_monitor += cfg.monitor_period;
            const Eigen::VectorXd ego_red = reduced_state(ego);
            const Eigen::VectorXd other_red = reduced_state(other);
            MonitorResult m = monitor_step(ego_red, other_red, specs, tubes, cfg.mode, rules);
            run.bucket_clamped = run.bucket_clamped || m.bucket_clamped;

            for (std::size_t s = 0; s < m.specs.size(); ++s)
                if (m.specs[s].triggered && run.spec_t_e[s] < 0.0) run.spec_t_e[s] = now;
            if (m.triggered && !run.triggered()) {
                run.t_e = now;
                for (const auto& v : m.specs)
                    if (v.triggered) {
                        run.trigger_spec = v.label;
                        run.interval_at_trigger = v.rob.interval;
                        run.eps_at_trigger = v.rob.eps;
                        break;
                    }
            }
            if (m.triggered && !evading) {
                evading = true;
                const auto [wp1, wp2] =
                    evasive_waypoints(ego_red.head<2>(), ego_red[kIdxPsi], t);
                los.set_waypoints({wp1, wp2, t.p_goal}, ego_red.head<2>());
            }

            MonitorTick tick;
            tick.t = now;
            tick.bucket = m.bucket;
            tick.ego = ego_red;
            tick.other = other_red;
            tick.specs = std::move(m.specs);
            run.ticks.push_back(std::move(tick));
        }

        if (k >= steps_total) break;

        if (cfg.other_enabled && !run.collision &&
            hulls_overlap(ego.eta.head<2>(), ego.eta[5], ego_params.L / 2.0,
                          ego_params.B / 2.0, other.eta.head<2>(), other.eta[5],
                          other_params.L / 2.0, other_params.B / 2.0)) {
            run.collision = true;
            run.collision_time = now;
        }

        const Vector6d tau_ego = los.command(ego);
        if (cfg.other_enabled && k % b_every == 0) b_other = draw_box6(draws, t.b_lo, t.b_hi);

        const Eigen::VectorXd ego_next =
            ego_step(ego.to_vector(), tau_ego, Vector6d::Zero(), now, cfg.dt_internal);
        if (!ego_next.allFinite())
            throw std::runtime_error("run_scenario: ego dynamics diverged at t = " +
                                     std::to_string(now));
        ego = FullState::from_vector(ego_next);

        if (cfg.other_enabled) {
            const Eigen::VectorXd other_next =
                other_step(other.to_vector(), tau_other, b_other, now, cfg.dt_internal);
            if (!other_next.allFinite())
                throw std::runtime_error("run_scenario: other dynamics diverged at t = " +
                                         std::to_string(now));
            other = FullState::from_vector(other_next);
        }
    }
    return run;
}

void write_run_csv(std::ostream& os, const ScenarioRun& run) {
    os << std::setprecision(12);
    os << "time,spec,lo,hi,eps,t_low,t_up,trigger\n";
    for (const auto& tick : run.ticks)
        for (const auto& v : tick.specs)
            os << tick.t << ',' << v.label << ',' << v.rob.interval.lo << ','
               << v.rob.interval.hi << ',' << v.rob.eps << ',' << v.rob.t_low << ','
               << v.rob.t_up << ',' << (v.triggered ? 1 : 0) << '\n';
}

void write_track_csv(std::ostream& os, const ScenarioRun& run) {
    os << std::setprecision(12);
    os << "t,bucket";
    const std::array<const char*, 6> cols = {"px", "py", "psi", "vx", "vy", "vel"};
    for (const char* c : cols) os << ",ego_" << c;
    for (const char* c : cols) os << ",other_" << c;
    os << '\n';
    for (const auto& tick : run.ticks) {
        os << tick.t << ',' << tick.bucket;
        for (int i = 0; i < 6; ++i) os << ',' << tick.ego[i];
        if (tick.other.size() == 6)
            for (int i = 0; i < 6; ++i) os << ',' << tick.other[i];
        else
            os << ",,,,,,";
        os << '\n';
    }
}

nlohmann::json run_summary_json(const ScenarioRun& run) {
    nlohmann::json j;
    j["t_max"] = run.t_max;
    j["triggered"] = run.triggered();
    j["t_e"] = run.t_e;
    j["t_e_or_max"] = run.t_e_or_max();
    j["trigger_spec"] = run.trigger_spec;
    j["interval_at_trigger"] = {run.interval_at_trigger.lo, run.interval_at_trigger.hi};
    j["eps_at_trigger"] = run.eps_at_trigger;
    nlohmann::json specs = nlohmann::json::array();
    for (std::size_t s = 0; s < run.spec_labels.size(); ++s)
        specs.push_back({{"label", run.spec_labels[s]}, {"t_e", run.spec_t_e[s]}});
    j["specs"] = specs;
    j["collision"] = run.collision;
    j["collision_time"] = run.collision_time;
    j["bucket_clamped"] = run.bucket_clamped;
    j["monitor_ticks"] = run.ticks.size();
    return j;
}

std::vector<std::vector<EgoState>> sample_baseline_egos(const MaritimeTables& tables, int count,
                                                        std::uint64_t seed) {
    if (tables.ego_px.empty())
        throw std::invalid_argument("sample_baseline_egos: no per-step surge position boxes");
    const CounterRng rng(seed);
    std::vector<std::vector<EgoState>> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        RngStream rs(rng, static_cast<std::uint64_t>(i));
        const double px0 = rs.uniform(tables.ego_px[0].lo, tables.ego_px[0].hi);
        const double py = rs.uniform(tables.ego_py.lo, tables.ego_py.hi);
        const double psi = normalize_radian_pi(rs.uniform(tables.ego_psi.lo, tables.ego_psi.hi));
        const Eigen::Vector2d v(rs.uniform(tables.ego_vx.lo, tables.ego_vx.hi),
                                rs.uniform(tables.ego_vy.lo, tables.ego_vy.hi));
        std::vector<EgoState> track;
        track.reserve(tables.ego_px.size());
        for (std::size_t k = 0; k < tables.ego_px.size(); ++k) {
            const Eigen::Vector2d p(px0 + v.x() * (tables.dt * static_cast<double>(k)),
                                    py + v.y() * (tables.dt * static_cast<double>(k)));
            track.push_back(EgoState::from_velocity(p, psi, v));
        }
        out.push_back(std::move(track));
    }
    return out;
}

std::vector<BaselineEgoResult> run_baseline(const EncounterSpec& spec,
                                            const std::vector<std::vector<EgoState>>& egos,
                                            const ReachTube& tube,
                                            const std::vector<Trajectory>& training,
                                            const std::vector<Trajectory>& holdout, double beta,
                                            const RuleParams& rules) {
    if (training.empty() || holdout.empty())
        throw std::invalid_argument("run_baseline: need training and holdout trajectories");
    const SpecNode formula = anchored_formula(spec, tube.dt);
    const std::size_t steps = tube.sets.size();

    std::vector<BaselineEgoResult> out;
    out.reserve(egos.size());
    for (const auto& track : egos) {
        if (track.size() != steps)
            throw std::invalid_argument("run_baseline: ego track does not match the tube");
        BaselineEgoResult r;
        r.ego0 = track.front();

        const IntervalSignal pac_sig = atomic_signals(spec, track, tube, rules);
        const EvalResult pac_eval = eval(formula, pac_sig, 0);
        r.spec_pac = pac_eval.interval;
        r.eps_pac = attach_guarantee(pac_eval, tube, GuaranteeMode::Timepoint).eps;

        for (const auto& [name, atom] : spec.atoms) {
            (void)atom;
            for (std::size_t k = 0; k < steps; ++k) {
                BaselineAtomResult a;
                a.atom = name;
                a.step = static_cast<int>(k);
                a.pac = pac_sig.atoms.at(name)[k];
                r.atoms.push_back(std::move(a));
            }
        }

        // Empirical [min, max] of every atom and of the formula over the same
        // training trajectories the tube was fitted on.
        bool first = true;
        std::vector<Interval> atom_acc(r.atoms.size());
        Interval spec_acc;
        for (const auto& traj : training) {
            const IntervalSignal sig = scalar_signals(spec, track, traj, rules);
            const double rob = eval(formula, sig, 0).interval.lo;
            std::size_t idx = 0;
            for (const auto& [name, atom] : spec.atoms) {
                (void)atom;
                const auto& trace = sig.atoms.at(name);
                for (std::size_t k = 0; k < steps; ++k, ++idx) {
                    const Interval pt(trace[k].lo, trace[k].lo);
                    atom_acc[idx] = first ? pt : ihull(atom_acc[idx], pt);
                }
            }
            const Interval pt(rob, rob);
            spec_acc = first ? pt : ihull(spec_acc, pt);
            first = false;
        }
        for (std::size_t i = 0; i < r.atoms.size(); ++i) r.atoms[i].direct = atom_acc[i];
        r.spec_direct = spec_acc;

        int violations = 0;
        for (const auto& traj : holdout) {
            const double rob =
                eval(formula, scalar_signals(spec, track, traj, rules), 0).interval.lo;
            if (rob < spec_acc.lo || rob > spec_acc.hi) ++violations;
        }
        r.eps_direct = binomial_tail_inversion(violations, static_cast<int>(holdout.size()), beta);
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace pacstl
