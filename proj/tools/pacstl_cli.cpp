#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pacstl/config.hpp"
#include "pacstl/maritime.hpp"
#include "pacstl/rng.hpp"
#include "pacstl/scenario.hpp"
#include "pacstl/sets.hpp"
#include "pacstl/sim.hpp"

namespace fs = std::filesystem;
using namespace pacstl;

namespace {

// Exit codes: 0 ok, 2 configuration problem, 3 numerical failure.
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct CommonFlags {
    std::string config_path;
    std::string out_dir = "out";
    std::string seed;
    std::string rep;
    std::string mode;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "key = value configuration file");
    cmd->add_option("--out", flags.out_dir, "output directory (created if missing)");
    cmd->add_option("--seed", flags.seed, "override the seed");
    cmd->add_option("--rep", flags.rep, "set representation: ellipsoid or zonotope")
        ->check(CLI::IsMember({"ellipsoid", "zonotope"}));
    cmd->add_option("--mode", flags.mode, "guarantee mode: tube or timepoint")
        ->check(CLI::IsMember({"tube", "timepoint"}));
}

Config load_config(const CommonFlags& flags) {
    Config cfg =
        flags.config_path.empty() ? Config() : Config::from_file(flags.config_path);
    if (!flags.seed.empty()) cfg.set("seed", flags.seed);
    if (!flags.rep.empty()) cfg.set("rep", flags.rep);
    if (!flags.mode.empty()) cfg.set("mode", flags.mode);
    return cfg;
}

fs::path ensure_out(const std::string& out_dir) {
    fs::path p(out_dir);
    fs::create_directories(p);
    return p;
}

void write_snapshot(const Config& cfg, const fs::path& out, const std::string& command) {
    std::ofstream os(out / (command + "_config.txt"));
    cfg.write_snapshot(os);
}

TubeRep make_rep(const std::string& name, int dim, int refine_iters) {
    TubeRep rep;
    if (name == "ellipsoid") {
        rep.kind = TubeRep::Kind::Ellipsoid;
    } else if (name == "zonotope") {
        rep.kind = TubeRep::Kind::Zonotope;
        rep.G0 = Eigen::MatrixXd::Identity(dim, dim);
        rep.refine_iters = refine_iters;
    } else {
        throw std::invalid_argument("rep must be ellipsoid or zonotope, got '" + name + "'");
    }
    return rep;
}

GuaranteeMode make_mode(const std::string& name) {
    if (name == "tube") return GuaranteeMode::Tube;
    if (name == "timepoint") return GuaranteeMode::Timepoint;
    throw std::invalid_argument("mode must be tube or timepoint, got '" + name + "'");
}

void write_planar_boundary_csv(const fs::path& path, const ConvexSet& set) {
    std::ofstream os(path);
    os << "x,y\n";
    const PlanarSet shadow = project_plane(set, 0, 1);
    if (std::holds_alternative<PlanarEllipse>(shadow)) {
        const auto& e = std::get<PlanarEllipse>(shadow);
        const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(e.shape);
        const Eigen::Matrix2d sqrt_inv =
            es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
            es.eigenvectors().transpose();
        for (int i = 0; i <= 256; ++i) {
            const double t = 2.0 * std::numbers::pi * i / 256.0;
            const Eigen::Vector2d p =
                e.center + sqrt_inv * Eigen::Vector2d(std::cos(t), std::sin(t));
            os << p.x() << ',' << p.y() << '\n';
        }
    } else {
        const auto& poly = std::get<PlanarPolygon>(shadow);
        for (const auto& v : poly.verts) os << v.x() << ',' << v.y() << '\n';
        if (!poly.verts.empty()) os << poly.verts[0].x() << ',' << poly.verts[0].y() << '\n';
    }
}

int cmd_duffing(const CommonFlags& flags) {
    Config cfg = load_config(flags);
    const int n_train = cfg.get_int("n_train", 1500);
    const int n_holdout = cfg.get_int("n_holdout", 1500);
    const double beta = cfg.get_double("beta", 1e-9);
    const std::uint64_t seed = cfg.get_u64("seed", 1);
    const double horizon = cfg.get_double("horizon", 100.0);
    const double dt_internal = cfg.get_double("dt_internal", 0.05);
    const int refine_iters = cfg.get_int("refine_iters", 3000);
    cfg.require_all_used();
    const fs::path out = ensure_out(flags.out_dir);
    write_snapshot(cfg, out, "duffing");

    SampleSpec spec;
    spec.steps = 1;
    spec.dt = horizon;
    spec.x0_lo = Eigen::Vector2d(0.95, -0.05);
    spec.x0_hi = Eigen::Vector2d(1.05, 0.05);
    spec.seed = seed;

    const Stepper sim = duffing_stepper({}, dt_internal);
    const auto training = sample_trajectories(sim, spec, n_train, seed);
    const auto holdout = sample_trajectories(sim, spec, n_holdout, holdout_seed(seed));

    {
        std::ofstream os(out / "duffing_cloud.csv");
        os << "x,y\n";
        for (const auto& traj : training)
            os << traj.states.back()[0] << ',' << traj.states.back()[1] << '\n';
    }

    const double s2 = std::sqrt(2.0);
    Eigen::MatrixXd g0_four(2, 4);
    g0_four << 0.0, 1.0, s2, s2,
               1.0, 0.0, s2, -s2;

    TubeRep ellipsoid_rep;
    ellipsoid_rep.kind = TubeRep::Kind::Ellipsoid;
    TubeRep zono_four;
    zono_four.kind = TubeRep::Kind::Zonotope;
    zono_four.G0 = g0_four;
    zono_four.refine_iters = refine_iters;
    TubeRep zono_id;
    zono_id.kind = TubeRep::Kind::Zonotope;
    zono_id.G0 = Eigen::MatrixXd::Identity(2, 2);
    zono_id.refine_iters = refine_iters;

    nlohmann::json report;
    const struct {
        const char* name;
        const TubeRep* rep;
    } cases[] = {{"ellipsoid", &ellipsoid_rep},
                 {"zonotope_four_gen", &zono_four},
                 {"zonotope_identity", &zono_id}};
    for (const auto& c : cases) {
        const ReachTube tube = assemble_tube(training, holdout, *c.rep, CornerGeom{}, beta, {});
        const double vol = volume(tube.sets[0]);
        report[c.name] = {{"eps", tube.eps_tube}, {"volume", vol}};
        std::cout << c.name << ": eps = " << tube.eps_tube << ", volume = " << vol << '\n';
        write_planar_boundary_csv(out / (std::string("duffing_") + c.name + ".csv"),
                                  tube.sets[0]);
        std::ofstream os(out / (std::string("duffing_") + c.name + ".json"));
        os << tube_to_json(tube).dump(2) << '\n';
    }
    std::ofstream os(out / "duffing_report.json");
    os << report.dump(2) << '\n';
    return 0;
}

std::string tube_filename(const std::string& vessel, int bucket_index, const std::string& rep) {
    return "tube_" + vessel + "_U" + std::to_string(bucket_index + 1) + "_" + rep + ".json";
}

int cmd_fit_tube(const CommonFlags& flags) {
    Config cfg = load_config(flags);
    const std::string vessel_name = cfg.get_string("vessel", "large");
    const std::string bucket_sel = cfg.get_string("bucket", "all");
    const std::string rep_name = cfg.get_string("rep", "ellipsoid");
    const int refine_iters = cfg.get_int("refine_iters", 0);
    const int n_train = cfg.get_int("n_train", 1500);
    const int n_holdout = cfg.get_int("n_holdout", 1500);
    const double beta = cfg.get_double("beta", 1e-9);
    const std::uint64_t seed = cfg.get_u64("seed", 1);
    cfg.require_all_used();
    const fs::path out = ensure_out(flags.out_dir);
    write_snapshot(cfg, out, "fit_tube");

    const MaritimeTables tables = MaritimeTables::defaults();
    const VesselParams vessel = vessel_by_name(vessel_name);
    std::cout << "vessel " << vessel.name << ": back-solved density rho = " << vessel.rho
              << " kg/m^3 (m = " << vessel.m << " kg)\n";

    std::vector<int> buckets;
    if (bucket_sel == "all") {
        for (int i = 0; i < static_cast<int>(tables.buckets.size()); ++i) buckets.push_back(i);
    } else {
        const int b = std::stoi(bucket_sel);
        if (b < 1 || b > static_cast<int>(tables.buckets.size()))
            throw std::invalid_argument("bucket must be 1.." +
                                        std::to_string(tables.buckets.size()) + " or all");
        buckets.push_back(b - 1);
    }

    const TubeRep rep = make_rep(rep_name, kReducedDim, refine_iters);
    for (const int b : buckets) {
        const ReachTube tube =
            build_maritime_tube(vessel, tables.buckets[b], rep, tables, n_train, n_holdout,
                                beta, seed + static_cast<std::uint64_t>(b));
        const std::string name = tube_filename(vessel_name, b, rep_name);
        std::ofstream os(out / name);
        os << tube_to_json(tube).dump(2) << '\n';
        std::cout << "U" << b + 1 << " [" << tables.buckets[b].lo << ", "
                  << tables.buckets[b].hi << "]: eps_tube = " << tube.eps_tube << ", eps_t =";
        for (const double e : tube.eps_t) std::cout << ' ' << e;
        std::cout << " -> " << name << '\n';
    }
    return 0;
}

std::vector<ReachTube> load_tube_bank(const fs::path& dir, const std::string& vessel,
                                      const std::string& rep, std::size_t bucket_count) {
    std::vector<ReachTube> tubes;
    std::string tried;
    for (std::size_t b = 0; b < bucket_count; ++b) {
        const fs::path p = dir / tube_filename(vessel, static_cast<int>(b), rep);
        if (!fs::exists(p)) {
            tried += (tried.empty() ? "" : ", ") + p.string();
            continue;
        }
        std::ifstream in(p);
        nlohmann::json j;
        in >> j;
        tubes.push_back(tube_from_json(j));
    }
    if (tubes.empty())
        throw std::invalid_argument("no reachable tubes for vessel '" + vessel +
                                    "'; looked for " + tried);
    return tubes;
}

int cmd_run_scenario(const CommonFlags& flags) {
    Config cfg = load_config(flags);
    ScenarioConfig sc;
    sc.type = scenario_type_from_string(cfg.get_string("scenario", "head-on"));
    sc.ego = cfg.get_string("ego", "small");
    sc.other = cfg.get_string("other", "large");
    sc.t_h = cfg.get_double("t_h", 10.0);
    sc.t_max = cfg.get_double("t_max", 60.0);
    sc.dt_internal = cfg.get_double("dt_internal", 0.05);
    sc.monitor_period = cfg.get_double("monitor_period", 5.0 / 3.0);
    sc.mode = make_mode(cfg.get_string("mode", "tube"));
    sc.use_real_tau = cfg.get_bool("use_real_tau", false);
    sc.other_enabled = cfg.get_bool("other_enabled", true);
    const int runs = cfg.get_int("runs", 10);
    const std::uint64_t seed = cfg.get_u64("seed", 1);
    const std::string rep_name = cfg.get_string("rep", "ellipsoid");
    const std::string tube_dir = cfg.get_string("tube_dir", flags.out_dir);
    cfg.require_all_used();
    const fs::path out = ensure_out(flags.out_dir);
    write_snapshot(cfg, out, "run_scenario");

    std::vector<ReachTube> tubes;
    if (sc.other_enabled)
        tubes = load_tube_bank(tube_dir, sc.other, rep_name, sc.tables.buckets.size());

    const std::string tag = to_string(sc.type) + "_" + sc.ego + "-" + sc.other + "_th" +
                            std::to_string(static_cast<int>(sc.t_h));
    nlohmann::json agg;
    agg["runs"] = nlohmann::json::array();
    double sum_te = 0.0, sum_lo = 0.0, sum_hi = 0.0;
    int triggered = 0;
    for (int r = 0; r < runs; ++r) {
        sc.seed = seed + static_cast<std::uint64_t>(r);
        const ScenarioRun run = run_scenario(sc, tubes);
        {
            std::ofstream os(out / ("scenario_" + tag + "_seed" + std::to_string(sc.seed) +
                                    ".csv"));
            write_run_csv(os, run);
            std::ofstream ts(out / ("track_" + tag + "_seed" + std::to_string(sc.seed) +
                                    ".csv"));
            write_track_csv(ts, run);
        }
        const nlohmann::json summary = run_summary_json(run);
        agg["runs"].push_back(summary);
        sum_te += run.t_e_or_max();
        if (run.triggered()) {
            ++triggered;
            sum_lo += run.interval_at_trigger.lo;
            sum_hi += run.interval_at_trigger.hi;
        }
    }
    if (runs > 0) {
        agg["mean_t_e"] = sum_te / runs;
        agg["triggered_runs"] = triggered;
        if (triggered > 0)
            agg["mean_interval_at_trigger"] = {sum_lo / triggered, sum_hi / triggered};
        std::cout << tag << ": mean t_e = " << sum_te / runs << " s over " << runs
                  << " runs (" << triggered << " triggered)\n";
    } else {
        std::cout << tag << ": no runs requested\n";
    }
    std::ofstream os(out / ("scenario_" + tag + "_summary.json"));
    os << agg.dump(2) << '\n';
    return 0;
}

int cmd_baseline(const CommonFlags& flags) {
    Config cfg = load_config(flags);
    const std::string other_name = cfg.get_string("other", "large");
    const int bucket = cfg.get_int("bucket", 1);
    const std::string rep_name = cfg.get_string("rep", "ellipsoid");
    const int n_train = cfg.get_int("n_train", 1500);
    const int n_holdout = cfg.get_int("n_holdout", 1500);
    const double beta = cfg.get_double("beta", 1e-9);
    const std::uint64_t seed = cfg.get_u64("seed", 1);
    const int ego_count = cfg.get_int("ego_count", 10);
    const double t_h = cfg.get_double("t_h", 10.0);
    cfg.require_all_used();
    const fs::path out = ensure_out(flags.out_dir);
    write_snapshot(cfg, out, "baseline");

    const MaritimeTables tables = MaritimeTables::defaults();
    if (bucket < 1 || bucket > static_cast<int>(tables.buckets.size()))
        throw std::invalid_argument("bucket must be 1.." +
                                    std::to_string(tables.buckets.size()));
    const VesselParams vessel = vessel_by_name(other_name);
    RuleParams rules = tables.rules;
    rules.t_h = t_h;

    const int steps = static_cast<int>(std::llround(tables.t_end / tables.dt));
    const SampleSpec sample = tube_sample_spec(tables.buckets[bucket - 1], tables, steps, seed);
    const Stepper sim = vessel_stepper(vessel);
    const auto training = reduce_trajectories(sample_trajectories(sim, sample, n_train, seed));
    const auto holdout =
        reduce_trajectories(sample_trajectories(sim, sample, n_holdout, holdout_seed(seed)));
    const CornerGeom geom{vessel.L / 2.0, vessel.B / 2.0};
    const TubeRep rep = make_rep(rep_name, kReducedDim, 0);
    const ReachTube tube =
        assemble_tube(training, holdout, rep, geom, beta, tables.buckets[bucket - 1]);

    const auto egos =
        sample_baseline_egos(tables, ego_count, CounterRng::mix(seed ^ 0x45474f53ull));
    const EncounterSpec spec = build_encounter_spec(EncounterType::HeadOn, tables);
    const auto results = run_baseline(spec, egos, tube, training, holdout, beta, rules);

    nlohmann::json report = nlohmann::json::array();
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& r = results[i];
        nlohmann::json j;
        j["ego"] = i;
        j["spec_direct"] = {r.spec_direct.lo, r.spec_direct.hi};
        j["spec_pac"] = {r.spec_pac.lo, r.spec_pac.hi};
        j["eps_direct"] = r.eps_direct;
        j["eps_pac"] = r.eps_pac;
        nlohmann::json atoms = nlohmann::json::array();
        for (const auto& a : r.atoms)
            atoms.push_back({{"atom", a.atom},
                             {"step", a.step},
                             {"direct", {a.direct.lo, a.direct.hi}},
                             {"pac", {a.pac.lo, a.pac.hi}}});
        j["atoms"] = atoms;
        report.push_back(j);
        std::cout << "ego " << i << ": direct [" << r.spec_direct.lo << ", "
                  << r.spec_direct.hi << "] eps " << r.eps_direct << " | pac ["
                  << r.spec_pac.lo << ", " << r.spec_pac.hi << "] eps " << r.eps_pac
                  << " (gap " << r.eps_pac - r.eps_direct << ")\n";
    }
    std::ofstream os(out / "baseline_report.json");
    os << report.dump(2) << '\n';
    return 0;
}

int cmd_eval(const CommonFlags& flags) {
    Config cfg = load_config(flags);
    const std::string tube_path = cfg.get_string("tube", "");
    const std::string trace_path = cfg.get_string("trace", "");
    const std::string spec_name = cfg.get_string("spec", "head_on");
    const double t_h = cfg.get_double("t_h", 10.0);
    const GuaranteeMode mode = make_mode(cfg.get_string("mode", "tube"));
    cfg.require_all_used();
    if (tube_path.empty() || trace_path.empty())
        throw std::invalid_argument("eval needs tube = <file> and trace = <file>");
    const fs::path out = ensure_out(flags.out_dir);
    write_snapshot(cfg, out, "eval");

    std::ifstream tin(tube_path);
    if (!tin) throw std::invalid_argument("cannot open tube file " + tube_path);
    nlohmann::json tj;
    tin >> tj;
    const ReachTube tube = tube_from_json(tj);

    // Trace rows: px,py,psi,vx,vy in the tube frame, one per tube step.
    std::vector<EgoState> ego;
    std::ifstream trin(trace_path);
    if (!trin) throw std::invalid_argument("cannot open trace file " + trace_path);
    std::string line;
    while (std::getline(trin, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::vector<double> vals;
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            try {
                vals.push_back(std::stod(cell));
            } catch (const std::exception&) {
                vals.clear();
                break;
            }
        }
        if (vals.empty()) continue;  // header line
        if (vals.size() != 5)
            throw std::invalid_argument("trace rows need px,py,psi,vx,vy");
        ego.push_back(EgoState::from_velocity({vals[0], vals[1]}, vals[2],
                                              {vals[3], vals[4]}));
    }

    MaritimeTables tables = MaritimeTables::defaults();
    tables.rules.t_h = t_h;
    const EncounterSpec spec = build_encounter_spec(
        spec_name == "crossing" ? EncounterType::Crossing : EncounterType::HeadOn, tables);
    const IntervalSignal sig = atomic_signals(spec, ego, tube, tables.rules);
    const EvalResult r = eval(anchored_formula(spec, tube.dt), sig, 0);
    const PacRobustness rob = attach_guarantee(r, tube, mode);

    nlohmann::json j;
    j["spec"] = spec.label;
    j["interval"] = {rob.interval.lo, rob.interval.hi};
    j["t_low"] = rob.t_low;
    j["t_up"] = rob.t_up;
    j["eps"] = rob.eps;
    j["beta"] = rob.beta;
    j["mode"] = mode == GuaranteeMode::Tube ? "tube" : "timepoint";
    j["verdict"] = to_string(verdict(rob.interval));
    std::cout << j.dump(2) << '\n';
    std::ofstream os(out / "eval_result.json");
    os << j.dump(2) << '\n';
    return 0;
}

bool validate_csv(const fs::path& path, std::string& why) {
    std::ifstream in(path);
    if (!in) {
        why = "cannot open";
        return false;
    }
    std::string header;
    if (!std::getline(in, header)) {
        why = "empty file";
        return false;
    }
    std::size_t cols = 1;
    for (char c : header) cols += c == ',';
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::size_t n = 1;
        for (char c : line) n += c == ',';
        if (n != cols) {
            why = "line " + std::to_string(lineno) + " has " + std::to_string(n) +
                  " fields, header has " + std::to_string(cols);
            return false;
        }
    }
    return true;
}

bool validate_json(const fs::path& path, std::string& why) {
    std::ifstream in(path);
    if (!in) {
        why = "cannot open";
        return false;
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        why = e.what();
        return false;
    }
    if (j.is_object() && j.contains("sets")) {
        try {
            const ReachTube tube = tube_from_json(j);
            if (tube_to_json(tube) != j) {
                why = "tube does not round-trip";
                return false;
            }
        } catch (const std::exception& e) {
            why = e.what();
            return false;
        }
    }
    return true;
}

int cmd_validate(const std::vector<std::string>& files) {
    int bad = 0;
    for (const auto& f : files) {
        const fs::path p(f);
        std::string why;
        bool ok = false;
        if (p.extension() == ".csv")
            ok = validate_csv(p, why);
        else if (p.extension() == ".json")
            ok = validate_json(p, why);
        else
            why = "unknown file type";
        std::cout << (ok ? "ok      " : "invalid ") << f;
        if (!ok) std::cout << " (" << why << ")";
        std::cout << '\n';
        bad += !ok;
    }
    return bad == 0 ? 0 : kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"PAC-bounded reachable tubes with interval STL monitoring"};
    app.require_subcommand(1);

    CommonFlags duffing_flags, fit_flags, scenario_flags, baseline_flags, eval_flags;
    std::vector<std::string> validate_files;

    CLI::App* duffing = app.add_subcommand("duffing", "chaotic-oscillator set estimation");
    add_common(duffing, duffing_flags);
    CLI::App* fit = app.add_subcommand("fit-tube", "fit and certify vessel reachable tubes");
    add_common(fit, fit_flags);
    CLI::App* scenario = app.add_subcommand("run-scenario", "closed-loop monitored encounter");
    add_common(scenario, scenario_flags);
    CLI::App* baseline =
        app.add_subcommand("baseline", "direct sampling versus tube-based intervals");
    add_common(baseline, baseline_flags);
    CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a spec on a saved tube and trace");
    add_common(eval_cmd, eval_flags);
    CLI::App* validate = app.add_subcommand("validate", "check emitted files");
    validate->add_option("files", validate_files, "CSV or JSON files to check")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (duffing->parsed()) return cmd_duffing(duffing_flags);
        if (fit->parsed()) return cmd_fit_tube(fit_flags);
        if (scenario->parsed()) return cmd_run_scenario(scenario_flags);
        if (baseline->parsed()) return cmd_baseline(baseline_flags);
        if (eval_cmd->parsed()) return cmd_eval(eval_flags);
        if (validate->parsed()) return cmd_validate(validate_files);
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumeric;
    }
    return 0;
}
