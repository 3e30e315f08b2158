#include "pacstl/istl.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "pacstl/scenario.hpp"

namespace pacstl {

namespace {

void require_window(double lo, double hi, const char* op) {
    if (!(lo >= 0.0) || !(hi >= lo))
        throw std::invalid_argument(std::string(op) + ": window must satisfy 0 <= lo <= hi");
}

}  // namespace

SpecNode Atomic(std::string name) {
    if (name.empty()) throw std::invalid_argument("Atomic: empty name");
    SpecNode n;
    n.kind = SpecKind::Atomic;
    n.name = std::move(name);
    return n;
}

SpecNode Not(SpecNode child) {
    SpecNode n;
    n.kind = SpecKind::Not;
    n.children.push_back(std::move(child));
    return n;
}

SpecNode And(std::vector<SpecNode> children) {
    if (children.empty()) throw std::invalid_argument("And: no children");
    SpecNode n;
    n.kind = SpecKind::And;
    n.children = std::move(children);
    return n;
}

SpecNode Or(std::vector<SpecNode> children) {
    if (children.empty()) throw std::invalid_argument("Or: no children");
    SpecNode n;
    n.kind = SpecKind::Or;
    n.children = std::move(children);
    return n;
}

SpecNode Globally(double t_lo, double t_hi, SpecNode child) {
    require_window(t_lo, t_hi, "Globally");
    SpecNode n;
    n.kind = SpecKind::Globally;
    n.t_lo = t_lo;
    n.t_hi = t_hi;
    n.children.push_back(std::move(child));
    return n;
}

SpecNode Eventually(double t_lo, double t_hi, SpecNode child) {
    require_window(t_lo, t_hi, "Eventually");
    SpecNode n;
    n.kind = SpecKind::Eventually;
    n.t_lo = t_lo;
    n.t_hi = t_hi;
    n.children.push_back(std::move(child));
    return n;
}

SpecNode Until(double t_lo, double t_hi, SpecNode left, SpecNode right) {
    require_window(t_lo, t_hi, "Until");
    SpecNode n;
    n.kind = SpecKind::Until;
    n.t_lo = t_lo;
    n.t_hi = t_hi;
    n.children.push_back(std::move(left));
    n.children.push_back(std::move(right));
    return n;
}

std::size_t IntervalSignal::length() const {
    if (atoms.empty()) throw std::invalid_argument("IntervalSignal: no atomics");
    const std::size_t len = atoms.begin()->second.size();
    for (const auto& [name, trace] : atoms)
        if (trace.size() != len)
            throw std::invalid_argument("IntervalSignal: atomic '" + name +
                                        "' has mismatched length");
    if (len == 0) throw std::invalid_argument("IntervalSignal: empty traces");
    return len;
}

namespace {

int window_steps(double seconds, double dt, const char* which) {
    const double ratio = seconds / dt;
    const long long k = std::llround(ratio);
    if (std::abs(ratio - static_cast<double>(k)) > 1e-6)
        throw std::invalid_argument(std::string(which) + " window bound " +
                                    std::to_string(seconds) +
                                    " is not an integer multiple of dt");
    return static_cast<int>(k);
}

}  // namespace

int horizon(const SpecNode& spec, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("horizon: dt must be positive");
    switch (spec.kind) {
        case SpecKind::Atomic:
            return 0;
        case SpecKind::Not:
            return horizon(spec.children[0], dt);
        case SpecKind::And:
        case SpecKind::Or: {
            int h = 0;
            for (const auto& c : spec.children) h = std::max(h, horizon(c, dt));
            return h;
        }
        case SpecKind::Globally:
        case SpecKind::Eventually:
            window_steps(spec.t_lo, dt, "temporal");
            return window_steps(spec.t_hi, dt, "temporal") + horizon(spec.children[0], dt);
        case SpecKind::Until: {
            window_steps(spec.t_lo, dt, "until");
            const int h = std::max(horizon(spec.children[0], dt), horizon(spec.children[1], dt));
            return window_steps(spec.t_hi, dt, "until") + h;
        }
    }
    throw std::logic_error("horizon: unhandled node kind");
}

namespace {

// One robustness bound together with the signal step it originated from. All
// comparisons below use strict inequalities so that ties resolve to the
// earliest step / first argument encountered.
struct Bound {
    double value = 0.0;
    int step = 0;
};

struct NodeEval {
    Bound lower;
    Bound upper;
};

NodeEval eval_node(const SpecNode& spec, const IntervalSignal& sig, int t) {
    switch (spec.kind) {
        case SpecKind::Atomic: {
            const auto it = sig.atoms.find(spec.name);
            if (it == sig.atoms.end())
                throw std::invalid_argument("eval: unknown atomic '" + spec.name + "'");
            const Interval& iv = it->second[static_cast<std::size_t>(t)];
            return {{iv.lo, t}, {iv.hi, t}};
        }
        case SpecKind::Not: {
            const NodeEval c = eval_node(spec.children[0], sig, t);
            return {{-c.upper.value, c.upper.step}, {-c.lower.value, c.lower.step}};
        }
        case SpecKind::And:
        case SpecKind::Or: {
            const bool is_and = spec.kind == SpecKind::And;
            NodeEval best = eval_node(spec.children[0], sig, t);
            for (std::size_t i = 1; i < spec.children.size(); ++i) {
                const NodeEval c = eval_node(spec.children[i], sig, t);
                if (is_and ? c.lower.value < best.lower.value
                           : c.lower.value > best.lower.value)
                    best.lower = c.lower;
                if (is_and ? c.upper.value < best.upper.value
                           : c.upper.value > best.upper.value)
                    best.upper = c.upper;
            }
            return best;
        }
        case SpecKind::Globally:
        case SpecKind::Eventually: {
            const bool is_glob = spec.kind == SpecKind::Globally;
            const int w_lo = window_steps(spec.t_lo, sig.dt, "temporal");
            const int w_hi = window_steps(spec.t_hi, sig.dt, "temporal");
            NodeEval best;
            bool first = true;
            for (int w = w_lo; w <= w_hi; ++w) {
                const NodeEval c = eval_node(spec.children[0], sig, t + w);
                if (first) {
                    best = c;
                    first = false;
                    continue;
                }
                if (is_glob ? c.lower.value < best.lower.value
                            : c.lower.value > best.lower.value)
                    best.lower = c.lower;
                if (is_glob ? c.upper.value < best.upper.value
                            : c.upper.value > best.upper.value)
                    best.upper = c.upper;
            }
            return best;
        }
        case SpecKind::Until: {
            const int w_lo = window_steps(spec.t_lo, sig.dt, "until");
            const int w_hi = window_steps(spec.t_hi, sig.dt, "until");
            // max over t' in [t+lo, t+hi] of min(right(t'), min_{t'' in [t,t']} left(t'')),
            // applied to each bound's trace independently. The running left
            // minimum starts at the evaluation time, not at the window start.
            std::vector<NodeEval> left(static_cast<std::size_t>(w_hi) + 1);
            for (int w = 0; w <= w_hi; ++w)
                left[static_cast<std::size_t>(w)] = eval_node(spec.children[0], sig, t + w);

            auto bound_trace = [&](auto pick) {
                Bound run = pick(left[0]);
                Bound best{-std::numeric_limits<double>::infinity(), t};
                bool have = false;
                for (int w = 0; w <= w_hi; ++w) {
                    const Bound lw = pick(left[static_cast<std::size_t>(w)]);
                    if (lw.value < run.value) run = lw;
                    if (w < w_lo) continue;
                    const Bound rw = pick(eval_node(spec.children[1], sig, t + w));
                    // On a value tie the running left minimum wins: its step is
                    // never later than t + w.
                    const Bound cand = rw.value < run.value ? rw : run;
                    if (!have || cand.value > best.value) {
                        best = cand;
                        have = true;
                    }
                }
                return best;
            };
            NodeEval out;
            out.lower = bound_trace([](const NodeEval& e) { return e.lower; });
            out.upper = bound_trace([](const NodeEval& e) { return e.upper; });
            return out;
        }
    }
    throw std::logic_error("eval: unhandled node kind");
}

}  // namespace

EvalResult eval(const SpecNode& spec, const IntervalSignal& sig, int t) {
    const std::size_t len = sig.length();
    const int h = horizon(spec, sig.dt);
    if (t < 0 || static_cast<std::size_t>(t) + static_cast<std::size_t>(h) >= len)
        throw std::invalid_argument("eval: horizon " + std::to_string(h) + " at step " +
                                    std::to_string(t) + " exceeds signal length " +
                                    std::to_string(len));
    const NodeEval r = eval_node(spec, sig, t);
    EvalResult out;
    out.interval = Interval(r.lower.value, r.upper.value);
    out.t_low = r.lower.step;
    out.t_up = r.upper.step;
    return out;
}

Verdict verdict(const Interval& iv) {
    if (iv.lo > 0.0) return Verdict::Satisfied;
    if (iv.hi < 0.0) return Verdict::Violated;
    return Verdict::Undefined;
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Satisfied: return "satisfied";
        case Verdict::Violated: return "violated";
        case Verdict::Undefined: return "undefined";
    }
    return "undefined";
}

PacRobustness attach_guarantee(const EvalResult& r, const ReachTube& tube, GuaranteeMode mode) {
    const auto steps = static_cast<int>(tube.eps_t.size());
    if (r.t_low < 0 || r.t_low >= steps || r.t_up < 0 || r.t_up >= steps)
        throw std::invalid_argument("attach_guarantee: characteristic step outside tube");
    PacRobustness out;
    out.interval = r.interval;
    out.t_low = r.t_low;
    out.t_up = r.t_up;
    out.beta = tube.beta;
    out.mode = mode;
    out.eps = mode == GuaranteeMode::Tube
                  ? tube.eps_tube
                  : std::max(tube.eps_t[static_cast<std::size_t>(r.t_low)],
                             tube.eps_t[static_cast<std::size_t>(r.t_up)]);
    return out;
}

namespace {

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (const char ch : text) {
        if (ch == '(' || ch == ')') {
            if (!cur.empty()) {
                tokens.push_back(cur);
                cur.clear();
            }
            tokens.emplace_back(1, ch);
        } else if (std::isspace(static_cast<unsigned char>(ch))) {
            if (!cur.empty()) {
                tokens.push_back(cur);
                cur.clear();
            }
        } else {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) tokens.push_back(cur);
    return tokens;
}

bool is_operator_word(const std::string& s) {
    return s == "and" || s == "or" || s == "not" || s == "G" || s == "F" || s == "U";
}

double parse_number(const std::vector<std::string>& tokens, std::size_t& pos) {
    if (pos >= tokens.size())
        throw std::invalid_argument("parse_spec: expected a number, got end of input");
    const std::string& tok = tokens[pos];
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
        throw std::invalid_argument("parse_spec: expected a number, got '" + tok + "'");
    ++pos;
    return value;
}

SpecNode parse_expr(const std::vector<std::string>& tokens, std::size_t& pos) {
    if (pos >= tokens.size())
        throw std::invalid_argument("parse_spec: unexpected end of input");
    const std::string tok = tokens[pos];
    if (tok == ")") throw std::invalid_argument("parse_spec: unexpected ')'");
    if (tok != "(") {
        // Bare atomic name. Operator words are reserved to catch arity slips.
        if (is_operator_word(tok))
            throw std::invalid_argument("parse_spec: operator '" + tok +
                                        "' must appear in parentheses");
        ++pos;
        return Atomic(tok);
    }
    ++pos;
    if (pos >= tokens.size())
        throw std::invalid_argument("parse_spec: dangling '('");
    const std::string op = tokens[pos++];
    SpecNode node;
    if (op == "and" || op == "or") {
        std::vector<SpecNode> children;
        while (pos < tokens.size() && tokens[pos] != ")")
            children.push_back(parse_expr(tokens, pos));
        node = op == "and" ? And(std::move(children)) : Or(std::move(children));
    } else if (op == "not") {
        node = Not(parse_expr(tokens, pos));
    } else if (op == "G" || op == "F") {
        const double lo = parse_number(tokens, pos);
        const double hi = parse_number(tokens, pos);
        SpecNode child = parse_expr(tokens, pos);
        node = op == "G" ? Globally(lo, hi, std::move(child))
                         : Eventually(lo, hi, std::move(child));
    } else if (op == "U") {
        const double lo = parse_number(tokens, pos);
        const double hi = parse_number(tokens, pos);
        SpecNode left = parse_expr(tokens, pos);
        SpecNode right = parse_expr(tokens, pos);
        node = Until(lo, hi, std::move(left), std::move(right));
    } else {
        throw std::invalid_argument("parse_spec: unknown operator '" + op + "'");
    }
    if (pos >= tokens.size() || tokens[pos] != ")")
        throw std::invalid_argument("parse_spec: missing ')' after '" + op + "'");
    ++pos;
    return node;
}

std::string format_number(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw std::logic_error("format_spec: number formatting failed");
    return std::string(buf, ptr);
}

}  // namespace

SpecNode parse_spec(const std::string& text) {
    const std::vector<std::string> tokens = tokenize(text);
    std::size_t pos = 0;
    SpecNode node = parse_expr(tokens, pos);
    if (pos != tokens.size())
        throw std::invalid_argument("parse_spec: trailing input after formula");
    return node;
}

std::string format_spec(const SpecNode& spec) {
    switch (spec.kind) {
        case SpecKind::Atomic:
            return spec.name;
        case SpecKind::Not:
            return "(not " + format_spec(spec.children[0]) + ")";
        case SpecKind::And:
        case SpecKind::Or: {
            std::string out = spec.kind == SpecKind::And ? "(and" : "(or";
            for (const auto& c : spec.children) out += " " + format_spec(c);
            return out + ")";
        }
        case SpecKind::Globally:
        case SpecKind::Eventually: {
            const std::string op = spec.kind == SpecKind::Globally ? "G" : "F";
            return "(" + op + " " + format_number(spec.t_lo) + " " + format_number(spec.t_hi) +
                   " " + format_spec(spec.children[0]) + ")";
        }
        case SpecKind::Until:
            return "(U " + format_number(spec.t_lo) + " " + format_number(spec.t_hi) + " " +
                   format_spec(spec.children[0]) + " " + format_spec(spec.children[1]) + ")";
    }
    throw std::logic_error("format_spec: unhandled node kind");
}

}  // namespace pacstl
