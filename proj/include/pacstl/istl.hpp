#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "pacstl/interval.hpp"

namespace pacstl {

struct ReachTube;

enum class SpecKind { Atomic, Not, And, Or, Globally, Eventually, Until };

// Formula tree with value semantics. Temporal windows are in seconds and are
// snapped to the signal grid at evaluation time; see horizon().
struct SpecNode {
    SpecKind kind = SpecKind::Atomic;
    std::string name;               // Atomic only
    double t_lo = 0.0;              // Globally / Eventually / Until
    double t_hi = 0.0;
    std::vector<SpecNode> children;
};

SpecNode Atomic(std::string name);
SpecNode Not(SpecNode child);
SpecNode And(std::vector<SpecNode> children);
SpecNode Or(std::vector<SpecNode> children);
SpecNode Globally(double t_lo, double t_hi, SpecNode child);
SpecNode Eventually(double t_lo, double t_hi, SpecNode child);
SpecNode Until(double t_lo, double t_hi, SpecNode left, SpecNode right);

// Named interval-valued traces on a shared time grid.
struct IntervalSignal {
    std::map<std::string, std::vector<Interval>> atoms;
    double dt = 0.0;

    // Common trace length; throws if the atomics disagree or the signal is
    // empty.
    std::size_t length() const;
};

// Number of future steps needed to decide the formula at a given time.
// Windows must be integer multiples of dt (to 1e-6 steps), otherwise throws.
int horizon(const SpecNode& spec, double dt);

// Robustness interval plus the signal steps responsible for each bound.
struct EvalResult {
    Interval interval;
    int t_low = 0;
    int t_up = 0;
};

EvalResult eval(const SpecNode& spec, const IntervalSignal& sig, int t);

enum class Verdict { Satisfied, Violated, Undefined };

// lo > 0 satisfied, hi < 0 violated, anything touching zero is undefined.
Verdict verdict(const Interval& iv);
const char* to_string(Verdict v);

enum class GuaranteeMode { Tube, Timepoint };

// Robustness interval with the probabilistic accuracy inherited from the
// reachable tube it was evaluated on.
struct PacRobustness {
    Interval interval;
    int t_low = 0;
    int t_up = 0;
    double eps = 0.0;
    double beta = 0.0;
    GuaranteeMode mode = GuaranteeMode::Tube;
};

// Tube mode uses the whole-tube accuracy; timepoint mode uses the worse of the
// two characteristic steps' per-step accuracies.
PacRobustness attach_guarantee(const EvalResult& r, const ReachTube& tube, GuaranteeMode mode);

// Prefix text form, e.g. (and (not encounter) (G 1.0 2.5 encounter)).
// Operators: and, or, not, G, F, U; anything else is an atomic name.
SpecNode parse_spec(const std::string& text);
std::string format_spec(const SpecNode& spec);

}  // namespace pacstl
