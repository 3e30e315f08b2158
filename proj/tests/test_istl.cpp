#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "pacstl/istl.hpp"
#include "pacstl/scenario.hpp"

using namespace pacstl;

namespace {

IntervalSignal make_signal(std::vector<Interval> a, double dt = 0.5) {
    IntervalSignal sig;
    sig.dt = dt;
    sig.atoms["a"] = std::move(a);
    return sig;
}

// Plain scalar STL robustness over one named trace, used as the collapse
// oracle for point-interval signals.
double scalar_eval(const SpecNode& spec, const std::map<std::string, std::vector<double>>& sig,
                   double dt, int t) {
    switch (spec.kind) {
        case SpecKind::Atomic:
            return sig.at(spec.name).at(static_cast<std::size_t>(t));
        case SpecKind::Not:
            return -scalar_eval(spec.children[0], sig, dt, t);
        case SpecKind::And: {
            double v = 1e300;
            for (const auto& c : spec.children) v = std::min(v, scalar_eval(c, sig, dt, t));
            return v;
        }
        case SpecKind::Or: {
            double v = -1e300;
            for (const auto& c : spec.children) v = std::max(v, scalar_eval(c, sig, dt, t));
            return v;
        }
        case SpecKind::Globally: {
            const int a = static_cast<int>(std::llround(spec.t_lo / dt));
            const int b = static_cast<int>(std::llround(spec.t_hi / dt));
            double v = 1e300;
            for (int k = a; k <= b; ++k)
                v = std::min(v, scalar_eval(spec.children[0], sig, dt, t + k));
            return v;
        }
        case SpecKind::Eventually: {
            const int a = static_cast<int>(std::llround(spec.t_lo / dt));
            const int b = static_cast<int>(std::llround(spec.t_hi / dt));
            double v = -1e300;
            for (int k = a; k <= b; ++k)
                v = std::max(v, scalar_eval(spec.children[0], sig, dt, t + k));
            return v;
        }
        case SpecKind::Until: {
            const int a = static_cast<int>(std::llround(spec.t_lo / dt));
            const int b = static_cast<int>(std::llround(spec.t_hi / dt));
            double best = -1e300;
            for (int k = a; k <= b; ++k) {
                double run = 1e300;
                for (int j = 0; j <= k; ++j)
                    run = std::min(run, scalar_eval(spec.children[0], sig, dt, t + j));
                best = std::max(best, std::min(scalar_eval(spec.children[1], sig, dt, t + k), run));
            }
            return best;
        }
    }
    return 0.0;
}

// Random formula over atoms a/b with temporal windows snapped to dt.
SpecNode random_formula(std::mt19937_64& gen, int depth, double dt) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 0 : 6);
    std::uniform_int_distribution<int> wpick(0, 2);
    const auto window = [&](double& lo, double& hi) {
        lo = wpick(gen) * dt;
        hi = lo + wpick(gen) * dt;
    };
    switch (pick(gen)) {
        case 0:
            return Atomic(gen() % 2 ? "a" : "b");
        case 1:
            return Not(random_formula(gen, depth - 1, dt));
        case 2:
            return And({random_formula(gen, depth - 1, dt), random_formula(gen, depth - 1, dt)});
        case 3:
            return Or({random_formula(gen, depth - 1, dt), random_formula(gen, depth - 1, dt)});
        case 4: {
            double lo, hi;
            window(lo, hi);
            return Globally(lo, hi, random_formula(gen, depth - 1, dt));
        }
        case 5: {
            double lo, hi;
            window(lo, hi);
            return Eventually(lo, hi, random_formula(gen, depth - 1, dt));
        }
        default: {
            double lo, hi;
            window(lo, hi);
            return Until(lo, hi, random_formula(gen, depth - 1, dt),
                         random_formula(gen, depth - 1, dt));
        }
    }
}

}  // namespace

TEST_CASE("constructors reject malformed nodes") {
    CHECK_THROWS(Atomic(""));
    CHECK_THROWS(And({}));
    CHECK_THROWS(Or({}));
    CHECK_THROWS(Globally(-1.0, 2.0, Atomic("a")));
    CHECK_THROWS(Eventually(2.0, 1.0, Atomic("a")));
}

TEST_CASE("horizon counts window ends in steps") {
    CHECK(horizon(Atomic("a"), 0.5) == 0);
    CHECK(horizon(Globally(1.0, 2.5, Atomic("a")), 0.5) == 5);
    CHECK(horizon(And({Not(Atomic("a")), Globally(1.0, 2.5, Atomic("a"))}), 0.5) == 5);
    CHECK(horizon(Until(0.5, 1.5, Atomic("a"), Atomic("b")), 0.5) == 3);
    // Nested windows accumulate.
    CHECK(horizon(Eventually(0.0, 1.0, Globally(0.5, 1.0, Atomic("a"))), 0.5) == 4);
    // Windows must land on the grid.
    CHECK_THROWS(horizon(Globally(1.0, 2.3, Atomic("a")), 0.5));
}

TEST_CASE("negation swaps bounds and characteristic points") {
    auto sig = make_signal({Interval(-1.0, 2.0), Interval(0.0, 3.0)});
    const EvalResult r = eval(Not(Atomic("a")), sig, 0);
    CHECK(r.interval.lo == -2.0);
    CHECK(r.interval.hi == 1.0);

    // Involution: Not(Not(phi)) is phi, characteristic points included.
    const SpecNode phi = Globally(0.0, 0.5, Atomic("a"));
    const EvalResult once = eval(phi, sig, 0);
    const EvalResult twice = eval(Not(Not(phi)), sig, 0);
    CHECK(once.interval.lo == twice.interval.lo);
    CHECK(once.interval.hi == twice.interval.hi);
    CHECK(once.t_low == twice.t_low);
    CHECK(once.t_up == twice.t_up);
}

TEST_CASE("globally takes componentwise minima with per-bound argmin steps") {
    auto sig = make_signal({Interval(0.0, 1.0), Interval(-1.0, 2.0), Interval(0.5, 3.0)});
    const EvalResult r = eval(Globally(0.0, 1.0, Atomic("a")), sig, 0);
    CHECK(r.interval.lo == -1.0);
    CHECK(r.interval.hi == 1.0);
    CHECK(r.t_low == 1);
    CHECK(r.t_up == 0);

    // Characteristic-point consistency: the reported bounds are the signal
    // values at the reported steps.
    CHECK(r.interval.lo == sig.atoms["a"][static_cast<std::size_t>(r.t_low)].lo);
    CHECK(r.interval.hi == sig.atoms["a"][static_cast<std::size_t>(r.t_up)].hi);
}

TEST_CASE("eventually takes componentwise maxima") {
    auto sig = make_signal({Interval(0.0, 1.0), Interval(-1.0, 2.0), Interval(0.5, 3.0)});
    const EvalResult r = eval(Eventually(0.0, 1.0, Atomic("a")), sig, 0);
    CHECK(r.interval.lo == 0.5);
    CHECK(r.interval.hi == 3.0);
    CHECK(r.t_low == 2);
    CHECK(r.t_up == 2);
}

TEST_CASE("conjunction inherits the achieving child's characteristic point") {
    IntervalSignal sig;
    sig.dt = 0.5;
    sig.atoms["a"] = {Interval(0.0, 1.0), Interval(5.0, 6.0)};
    sig.atoms["b"] = {Interval(2.0, 9.0), Interval(-1.0, 3.0)};
    const SpecNode spec = And({Globally(0.0, 0.5, Atomic("a")), Globally(0.0, 0.5, Atomic("b"))});
    const EvalResult r = eval(spec, sig, 0);
    CHECK(r.interval.lo == -1.0);  // from b at step 1
    CHECK(r.interval.hi == 1.0);   // from a at step 0
    CHECK(r.t_low == 1);
    CHECK(r.t_up == 0);
}

TEST_CASE("ties resolve to the earliest step") {
    auto sig = make_signal({Interval(1.0, 1.0), Interval(1.0, 1.0), Interval(1.0, 1.0)});
    const EvalResult g = eval(Globally(0.0, 1.0, Atomic("a")), sig, 0);
    CHECK(g.t_low == 0);
    CHECK(g.t_up == 0);
    const EvalResult f = eval(Eventually(0.0, 1.0, Atomic("a")), sig, 0);
    CHECK(f.t_low == 0);
    CHECK(f.t_up == 0);
}

TEST_CASE("until matches the quantitative trace definition") {
    std::mt19937_64 gen(19);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const double dt = 0.5;
    for (int trial = 0; trial < 300; ++trial) {
        IntervalSignal sig;
        sig.dt = dt;
        std::map<std::string, std::vector<double>> lo_tr, hi_tr;
        const int len = 8;
        for (const char* name : {"a", "b"}) {
            std::vector<Interval> iv;
            for (int i = 0; i < len; ++i) {
                double x = u(gen), y = u(gen);
                if (x > y) std::swap(x, y);
                iv.push_back(Interval(x, y));
                lo_tr[name].push_back(x);
                hi_tr[name].push_back(y);
            }
            sig.atoms[name] = iv;
        }
        std::uniform_int_distribution<int> w(0, 3);
        const int a = w(gen);
        const int b = a + w(gen);
        if (b >= len) continue;
        const SpecNode spec = Until(a * dt, b * dt, Atomic("a"), Atomic("b"));
        const EvalResult r = eval(spec, sig, 0);
        // min/max only ever select input values, so equality is exact.
        CHECK(r.interval.lo == scalar_eval(spec, lo_tr, dt, 0));
        CHECK(r.interval.hi == scalar_eval(spec, hi_tr, dt, 0));
    }
}

TEST_CASE("point-interval signals collapse to scalar robustness") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    const double dt = 0.5;
    for (int trial = 0; trial < 100; ++trial) {
        const SpecNode spec = random_formula(gen, 3, dt);
        const int h = horizon(spec, dt);
        const int len = h + 3;
        IntervalSignal sig;
        sig.dt = dt;
        std::map<std::string, std::vector<double>> tr;
        for (const char* name : {"a", "b"}) {
            std::vector<Interval> iv;
            for (int i = 0; i < len; ++i) {
                const double v = u(gen);
                iv.push_back(Interval::point(v));
                tr[name].push_back(v);
            }
            sig.atoms[name] = iv;
        }
        for (int t = 0; t < 2; ++t) {
            const EvalResult r = eval(spec, sig, t);
            const double want = scalar_eval(spec, tr, dt, t);
            CHECK(r.interval.lo == want);
            CHECK(r.interval.hi == want);
        }
    }
}

TEST_CASE("widening an atomic never shrinks the result") {
    std::mt19937_64 gen(29);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    std::uniform_real_distribution<double> widen(0.0, 1.0);
    const double dt = 0.5;
    for (int trial = 0; trial < 100; ++trial) {
        const SpecNode spec = random_formula(gen, 3, dt);
        const int len = horizon(spec, dt) + 2;
        IntervalSignal narrow, wide;
        narrow.dt = wide.dt = dt;
        for (const char* name : {"a", "b"}) {
            std::vector<Interval> ni, wi;
            for (int i = 0; i < len; ++i) {
                double x = u(gen), y = u(gen);
                if (x > y) std::swap(x, y);
                ni.push_back(Interval(x, y));
                wi.push_back(Interval(x - widen(gen), y + widen(gen)));
            }
            narrow.atoms[name] = ni;
            wide.atoms[name] = wi;
        }
        const Interval rn = eval(spec, narrow, 0).interval;
        const Interval rw = eval(spec, wide, 0).interval;
        CHECK(rw.lo <= rn.lo + 1e-12);
        CHECK(rw.hi >= rn.hi - 1e-12);
    }
}

TEST_CASE("verdict three-valued mapping") {
    CHECK(verdict(Interval(0.1, 2.0)) == Verdict::Satisfied);
    CHECK(verdict(Interval(-2.0, -0.1)) == Verdict::Violated);
    CHECK(verdict(Interval(-1.0, 2.3)) == Verdict::Undefined);
    // Boundary zero is conservative.
    CHECK(verdict(Interval(0.0, 1.0)) == Verdict::Undefined);
    CHECK(verdict(Interval(-1.0, 0.0)) == Verdict::Undefined);
    CHECK(std::string(to_string(Verdict::Satisfied)) == "satisfied");
}

TEST_CASE("guarantee attachment per mode") {
    ReachTube tube;
    tube.dt = 0.5;
    tube.beta = 1e-9;
    tube.eps_tube = 0.06;
    tube.eps_t = {0.01, 0.02, 0.03, 0.04};
    EvalResult r;
    r.interval = Interval(-1.0, 2.0);
    r.t_low = 0;
    r.t_up = 3;

    const PacRobustness tube_mode = attach_guarantee(r, tube, GuaranteeMode::Tube);
    CHECK(tube_mode.eps == 0.06);
    CHECK(tube_mode.beta == 1e-9);

    const PacRobustness tp = attach_guarantee(r, tube, GuaranteeMode::Timepoint);
    CHECK(tp.eps == 0.04);  // max of eps_t[0] and eps_t[3]
    CHECK(tp.t_low == 0);
    CHECK(tp.t_up == 3);

    r.t_up = 7;
    CHECK_THROWS(attach_guarantee(r, tube, GuaranteeMode::Timepoint));
}

TEST_CASE("signal validation") {
    IntervalSignal sig;
    sig.dt = 0.5;
    CHECK_THROWS(sig.length());
    sig.atoms["a"] = {Interval(0, 1), Interval(0, 1)};
    sig.atoms["b"] = {Interval(0, 1)};
    CHECK_THROWS(sig.length());
    sig.atoms["b"].push_back(Interval(0, 1));
    CHECK(sig.length() == 2);

    CHECK_THROWS(eval(Atomic("missing"), sig, 0));
    // Not enough future signal for the window.
    CHECK_THROWS(eval(Globally(0.0, 2.0, Atomic("a")), sig, 0));
}

TEST_CASE("parser round trip and errors") {
    const std::string text = "(and (not encounter) (G 1.0 2.5 encounter))";
    const SpecNode spec = parse_spec(text);
    CHECK(spec.kind == SpecKind::And);
    CHECK(spec.children[0].kind == SpecKind::Not);
    CHECK(spec.children[1].kind == SpecKind::Globally);
    CHECK(spec.children[1].t_lo == 1.0);
    CHECK(spec.children[1].t_hi == 2.5);
    CHECK(spec.children[1].children[0].name == "encounter");

    // format -> parse -> format is a fixed point.
    const std::string canon = format_spec(spec);
    CHECK(format_spec(parse_spec(canon)) == canon);

    const std::string until = "(U 0 1.5 left_ok right_ok)";
    CHECK(format_spec(parse_spec(until)) == format_spec(parse_spec(format_spec(parse_spec(until)))));

    CHECK_THROWS(parse_spec(""));
    CHECK_THROWS(parse_spec("(and"));
    CHECK_THROWS(parse_spec("(G 1 2)"));          // missing child
    CHECK_THROWS(parse_spec("(G one 2 a)"));      // not a number
    CHECK_THROWS(parse_spec("(U 0 1 a)"));        // Until needs two children
    CHECK_THROWS(parse_spec("(frobnicate a b)")); // unknown operator
    CHECK_THROWS(parse_spec("a b"));              // trailing input
    CHECK_THROWS(parse_spec("G"));                // operator word as atom
}
