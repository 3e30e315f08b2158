#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pacstl {

// Closed real interval [lo, hi]. Construction enforces lo <= hi and finiteness;
// all interval combinators below preserve that invariant.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    Interval() = default;
    Interval(double lo_, double hi_) : lo(lo_), hi(hi_) {
        if (!std::isfinite(lo) || !std::isfinite(hi))
            throw std::invalid_argument("Interval: endpoints must be finite");
        if (lo > hi)
            throw std::invalid_argument("Interval: lo > hi");
    }

    static Interval point(double v) { return Interval(v, v); }

    double width() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
    bool contains(double v) const { return lo <= v && v <= hi; }
    bool contains(const Interval& other) const { return lo <= other.lo && other.hi <= hi; }
};

// Componentwise extensions used by the interval semantics: min/max act on each
// bound independently, negation mirrors and swaps the bounds.
inline Interval imin(const Interval& a, const Interval& b) {
    return Interval(std::min(a.lo, b.lo), std::min(a.hi, b.hi));
}

inline Interval imax(const Interval& a, const Interval& b) {
    return Interval(std::max(a.lo, b.lo), std::max(a.hi, b.hi));
}

inline Interval ineg(const Interval& a) { return Interval(-a.hi, -a.lo); }

inline Interval ihull(const Interval& a, const Interval& b) {
    return Interval(std::min(a.lo, b.lo), std::max(a.hi, b.hi));
}

}  // namespace pacstl
