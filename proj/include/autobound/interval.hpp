#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "autobound/errors.hpp"

namespace autobound {

// Endpoint rounding discipline.
//   fast:    round-to-nearest, no correction; reproduces pencil-and-paper digits.
//   outward: every elementary endpoint result is nudged one representable value
//            outward (lo down, hi up).  This absorbs the <= 1 ulp error of the
//            underlying double operation; libm calls (exp, log, pow) are assumed
//            faithful to <= 1 ulp as well.
enum class Rounding { fast, outward };

namespace detail {

inline double next_down(double x) {
    return std::isinf(x) ? x : std::nextafter(x, -std::numeric_limits<double>::infinity());
}

inline double next_up(double x) {
    return std::isinf(x) ? x : std::nextafter(x, std::numeric_limits<double>::infinity());
}

// Endpoint product with the 0 * inf -> 0 convention (the zero factor is an
// exact zero, so the product's contribution to a bound is zero, not NaN).
inline double ep_mul(double x, double y) {
    if ((x == 0.0 && std::isinf(y)) || (std::isinf(x) && y == 0.0)) return 0.0;
    return x * y;
}

}  // namespace detail

// Closed interval [lo, hi] of reals; endpoints may be +-infinity, never NaN.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    Interval() = default;

    // Degenerate (single-point) interval; implicit so scalars read naturally.
    Interval(double v) : lo(v), hi(v) {
        if (std::isnan(v)) throw error("interval endpoint is NaN");
    }

    Interval(double lo_, double hi_) : lo(lo_), hi(hi_) {
        if (std::isnan(lo) || std::isnan(hi)) throw error("interval endpoint is NaN");
        if (lo > hi)
            throw error("interval endpoints out of order: [" + std::to_string(lo) + ", " +
                        std::to_string(hi) + "]");
    }
};

inline bool degenerate(const Interval& a) { return a.lo == a.hi; }
inline bool bounded(const Interval& a) { return std::isfinite(a.lo) && std::isfinite(a.hi); }
inline bool contains(const Interval& a, double x) { return a.lo <= x && x <= a.hi; }
inline bool contains(const Interval& a, const Interval& b) { return a.lo <= b.lo && b.hi <= a.hi; }

inline double width(const Interval& a) { return a.hi - a.lo; }
inline double radius(const Interval& a) { return (a.hi - a.lo) / 2.0; }

inline double midpoint(const Interval& a) {
    // lo/2 + hi/2 avoids overflow on large finite endpoints.
    double m = a.lo / 2.0 + a.hi / 2.0;
    if (std::isnan(m)) throw error("midpoint of an unbounded interval");
    return m;
}

inline Interval outward(const Interval& a, Rounding r) {
    if (r == Rounding::fast) return a;
    Interval out;
    out.lo = detail::next_down(a.lo);
    out.hi = detail::next_up(a.hi);
    return out;
}

inline Interval neg(const Interval& a) {
    Interval out;  // negation is exact; no nudge in either mode
    out.lo = -a.hi;
    out.hi = -a.lo;
    return out;
}

inline Interval add(const Interval& a, const Interval& b, Rounding r = Rounding::fast) {
    double lo = a.lo + b.lo;
    double hi = a.hi + b.hi;
    if (std::isnan(lo) || std::isnan(hi))
        throw error("inf - inf in interval addition");
    return outward(Interval(lo, hi), r);
}

inline Interval sub(const Interval& a, const Interval& b, Rounding r = Rounding::fast) {
    return add(a, neg(b), r);
}

inline Interval mul(const Interval& a, const Interval& b, Rounding r = Rounding::fast) {
    double p1 = detail::ep_mul(a.lo, b.lo);
    double p2 = detail::ep_mul(a.lo, b.hi);
    double p3 = detail::ep_mul(a.hi, b.lo);
    double p4 = detail::ep_mul(a.hi, b.hi);
    Interval out;
    out.lo = std::min(std::min(p1, p2), std::min(p3, p4));
    out.hi = std::max(std::max(p1, p2), std::max(p3, p4));
    return outward(out, r);
}

// Quotient a / b for b bounded away from zero.  inf/inf endpoint pairs give
// NaN and are skipped: whenever one occurs, a finite/inf or inf/finite pair
// with the extreme quotient is also among the four candidates.
inline Interval div(const Interval& a, const Interval& b, Rounding r = Rounding::fast) {
    if (!(b.lo > 0.0 || b.hi < 0.0)) throw domain_error("interval division by zero-containing interval");
    double q[4] = {a.lo / b.lo, a.lo / b.hi, a.hi / b.lo, a.hi / b.hi};
    Interval out;
    out.lo = std::numeric_limits<double>::infinity();
    out.hi = -std::numeric_limits<double>::infinity();
    for (double v : q) {
        if (std::isnan(v)) continue;
        out.lo = std::min(out.lo, v);
        out.hi = std::max(out.hi, v);
    }
    return outward(out, r);
}

// Scalar multiple c * a (c exact).
inline Interval scale(const Interval& a, double c, Rounding r = Rounding::fast) {
    if (std::isnan(c)) throw error("interval scale by NaN");
    Interval out;
    if (c >= 0.0) {
        out.lo = detail::ep_mul(c, a.lo);
        out.hi = detail::ep_mul(c, a.hi);
    } else {
        out.lo = detail::ep_mul(c, a.hi);
        out.hi = detail::ep_mul(c, a.lo);
    }
    if (c == 0.0) return Interval(0.0);  // exact, even for unbounded a
    return outward(out, r);
}

// Exact-range integer power: even powers do not cross below zero
// ([-3,3]^2 = [0,9], whereas mul([-3,3],[-3,3]) = [-9,9]).
inline Interval ipow(const Interval& a, long p, Rounding r = Rounding::fast) {
    if (p < 0) throw error("ipow expects a nonnegative exponent");
    if (p == 0) return Interval(1.0);
    if (p == 1) return a;
    auto pw = [&](double x) { return std::pow(x, static_cast<double>(p)); };
    Interval out;
    if (p % 2 != 0) {
        out.lo = pw(a.lo);
        out.hi = pw(a.hi);
    } else if (a.lo >= 0.0) {
        out.lo = pw(a.lo);
        out.hi = pw(a.hi);
    } else if (a.hi <= 0.0) {
        out.lo = pw(a.hi);
        out.hi = pw(a.lo);
    } else {
        out.lo = 0.0;
        out.hi = std::max(pw(a.lo), pw(a.hi));
    }
    return outward(out, r);
}

inline Interval hull(const Interval& a, const Interval& b) {
    Interval out;
    out.lo = std::min(a.lo, b.lo);
    out.hi = std::max(a.hi, b.hi);
    return out;
}

// Both operands are guaranteed supersets of the same true set, so an empty
// intersection means one of them was wrong: an internal bug, never user error.
inline Interval intersect(const Interval& a, const Interval& b) {
    double lo = std::max(a.lo, b.lo);
    double hi = std::min(a.hi, b.hi);
    if (lo > hi)
        throw internal_error("empty interval intersection: [" + std::to_string(a.lo) + ", " +
                             std::to_string(a.hi) + "] vs [" + std::to_string(b.lo) + ", " +
                             std::to_string(b.hi) + "]");
    return Interval(lo, hi);
}

}  // namespace autobound
