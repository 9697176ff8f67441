#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "autobound/errors.hpp"
#include "autobound/expr.hpp"
#include "autobound/interval.hpp"
#include "autobound/poly1d.hpp"

namespace autobound {

// ---- Interval images of the atomic functions (monotone endpoint rules). ----

inline Interval iv_exp(const Interval& y, Rounding r = Rounding::fast) {
    Interval out;
    out.lo = std::exp(y.lo);
    out.hi = std::exp(y.hi);
    return outward(out, r);
}

inline Interval iv_log(const Interval& y, Rounding r = Rounding::fast) {
    if (!(y.lo > 0.0)) throw domain_error("log of non-positive interval");
    Interval out;
    out.lo = std::log(y.lo);
    out.hi = std::log(y.hi);
    return outward(out, r);
}

inline Interval iv_recip(const Interval& y, Rounding r = Rounding::fast) {
    return div(Interval(1.0), y, r);
}

inline double softplus_point(double y) {
    return std::max(y, 0.0) + std::log1p(std::exp(-std::abs(y)));
}

inline double sigmoid_point(double y) {
    return y >= 0.0 ? 1.0 / (1.0 + std::exp(-y)) : std::exp(y) / (1.0 + std::exp(y));
}

inline Interval iv_softplus(const Interval& y, Rounding r = Rounding::fast) {
    Interval out;
    out.lo = softplus_point(y.lo);
    out.hi = softplus_point(y.hi);
    return outward(out, r);
}

inline Interval iv_sigmoid(const Interval& y, Rounding r = Rounding::fast) {
    Interval out;
    out.lo = sigmoid_point(y.lo);
    out.hi = sigmoid_point(y.hi);
    return outward(out, r);
}

// y^p: integer exponents use the power rule (any sign of y; negative p needs
// y bounded away from 0), non-integer exponents need y > 0.
inline Interval iv_pow_real(const Interval& y, double p, Rounding r = Rounding::fast) {
    if (is_integer(p)) {
        long pi = static_cast<long>(p);
        if (pi >= 0) return ipow(y, pi, r);
        if (!(y.lo > 0.0 || y.hi < 0.0))
            throw domain_error("negative power of a zero-containing interval");
        return div(Interval(1.0), ipow(y, -pi, r), r);
    }
    if (!(y.lo > 0.0)) throw domain_error("non-integer power of a non-positive interval");
    Interval out;
    if (p > 0.0) {
        out.lo = std::pow(y.lo, p);
        out.hi = std::pow(y.hi, p);
    } else {
        out.lo = std::pow(y.hi, p);
        out.hi = std::pow(y.lo, p);
    }
    return outward(out, r);
}

// Interval image of any unary atomic over Y (exact up to endpoint rounding).
inline Interval atomic_image(const AtomicFn& fn, const Interval& y, Rounding r = Rounding::fast) {
    switch (fn.op) {
        case Op::Exp: return iv_exp(y, r);
        case Op::Log: return iv_log(y, r);
        case Op::Reciprocal: return iv_recip(y, r);
        case Op::PowConst: return iv_pow_real(y, fn.param, r);
        case Op::Softplus: return iv_softplus(y, r);
        case Op::AddConst: return add(y, Interval(fn.param), r);
        case Op::MulConst: return scale(y, fn.param, r);
        case Op::Negate: return neg(y);
        default: throw internal_error(std::string("atomic_image: ") + op_name(fn.op));
    }
}

namespace detail {

// softplus' = sigmoid(y) =: s, and every higher derivative is a polynomial in
// s: Q_1 = s, Q_{i+1}(s) = Q_i'(s) * (s - s^2).  Coefficients are exact
// integers (|.| < 2^53 for the orders used here).
inline std::vector<double> softplus_deriv_poly(std::size_t i) {
    std::vector<double> q{0.0, 1.0};  // Q_1 = s
    for (std::size_t n = 1; n < i; ++n) {
        std::vector<double> dq(q.size() > 1 ? q.size() - 1 : 1, 0.0);
        for (std::size_t j = 1; j < q.size(); ++j) dq[j - 1] = q[j] * static_cast<double>(j);
        std::vector<double> next(dq.size() + 2, 0.0);  // dq * (s - s^2)
        for (std::size_t j = 0; j < dq.size(); ++j) {
            next[j + 1] += dq[j];
            next[j + 2] -= dq[j];
        }
        q = std::move(next);
    }
    return q;
}

// Interval Horner evaluation of a scalar-coefficient polynomial.
inline Interval horner(const std::vector<double>& c, const Interval& s, Rounding r) {
    Interval acc(0.0);
    for (std::size_t j = c.size(); j-- > 0;) acc = add(mul(acc, s, r), Interval(c[j]), r);
    return acc;
}

// Falling factorial p(p-1)...(p-i+1) as an interval product.
inline Interval falling_factorial(double p, std::size_t i, Rounding r) {
    Interval out(1.0);
    for (std::size_t j = 0; j < i; ++j) out = mul(out, Interval(p - static_cast<double>(j)), r);
    return out;
}

// The constant coefficient handed to a nonlinear atomic must be scalar.  In
// outward mode elementary rounding leaves ulp-level width; the midpoint is
// taken as the reference point and the residue stays in B's constant
// coefficient, which the composition handles soundly.
inline double reference_point(const Interval& c) {
    double mid = midpoint(c);
    if (width(c) > 1e-9 * std::max(1.0, std::abs(mid)))
        throw domain_error("nonlinear atomic applied to a non-scalar constant coefficient");
    return mid;
}

}  // namespace detail

// Interval enclosure of f^(i)(Y) / i! from the closed-form i-th derivative of
// the catalog function.  A degenerate Y gives the Taylor coefficient at a
// point (degenerate in fast mode, a rounding-width interval in outward mode).
inline Interval taylor_coeff_range(const AtomicFn& fn, std::size_t i, const Interval& y,
                                   Rounding r = Rounding::fast) {
    if (i == 0) return atomic_image(fn, y, r);
    Interval fact(detail::factorial(static_cast<unsigned>(i)));
    switch (fn.op) {
        case Op::Exp: return div(iv_exp(y, r), fact, r);
        case Op::Log: {
            // f^(i)(y)/i! = (-1)^(i-1) / (i * y^i)
            if (!(y.lo > 0.0)) throw domain_error("log of non-positive interval");
            double sign = i % 2 == 1 ? 1.0 : -1.0;
            return div(Interval(sign), scale(ipow(y, static_cast<long>(i), r),
                                             static_cast<double>(i), r), r);
        }
        case Op::Reciprocal: {
            // f^(i)(y)/i! = (-1)^i / y^(i+1)
            if (!(y.lo > 0.0 || y.hi < 0.0))
                throw domain_error("reciprocal of a zero-containing interval");
            double sign = i % 2 == 0 ? 1.0 : -1.0;
            return div(Interval(sign), ipow(y, static_cast<long>(i) + 1, r), r);
        }
        case Op::PowConst: {
            // f^(i)(y)/i! = (p choose i) * y^(p-i) with the falling factorial
            Interval ff = detail::falling_factorial(fn.param, i, r);
            if (ff.lo == 0.0 && ff.hi == 0.0) return Interval(0.0);  // integer p < i
            return mul(div(ff, fact, r), iv_pow_real(y, fn.param - static_cast<double>(i), r),
                       r);
        }
        case Op::Softplus:
            return div(detail::horner(detail::softplus_deriv_poly(i), iv_sigmoid(y, r), r),
                       fact, r);
        case Op::AddConst: return i == 1 ? Interval(1.0) : Interval(0.0);
        case Op::MulConst: return i == 1 ? Interval(fn.param) : Interval(0.0);
        case Op::Negate: return i == 1 ? Interval(-1.0) : Interval(0.0);
        default:
            throw internal_error(std::string("taylor_coeff_range: ") + op_name(fn.op));
    }
}

// The endpoint-ratio rule is sound exactly when the remainder ratio
// R_{k-1}(y)/(y-y0)^k is monotone in y, which holds whenever f^(k+1) does not
// change sign on Y (the ratio is a k-th divided difference; its derivative
// has the sign of f^(k+1) somewhere in the hull).  Checked by interval
// evaluation of the closed-form derivative; a zero-crossing forces the
// derivative-range fallback.
inline bool ratio_monotone(const AtomicFn& fn, std::size_t k, const Interval& y,
                           Rounding r = Rounding::fast) {
    // NOTE: one interval evaluation can smear a sign-definite derivative
    // across zero (Horner on a wide input), so check slice by slice:
    // sign-definite on every slice <=> sign-definite on Y.
    const int slices = 16;
    bool all_nonneg = true, all_nonpos = true;
    for (int j = 0; j < slices; ++j) {
        double a = y.lo + (y.hi - y.lo) * j / slices;
        double b = j + 1 == slices ? y.hi : y.lo + (y.hi - y.lo) * (j + 1) / slices;
        Interval d = taylor_coeff_range(fn, k + 1, Interval(a, b), r);
        all_nonneg = all_nonneg && d.lo >= 0.0;
        all_nonpos = all_nonpos && d.hi <= 0.0;
        if (!all_nonneg && !all_nonpos) return false;
    }
    return all_nonneg || all_nonpos;
}

namespace detail {

// Remainder ratio (f(y) - T_{k-1}(y)) / (y - y0)^k at one endpoint y, as an
// interval.  Within tiny_radius of y0 the direct formula loses all precision
// to cancellation, so the rigorous Lagrange range over [y0, y] stands in.
inline Interval endpoint_ratio(const AtomicFn& fn, std::size_t k,
                               const std::vector<Interval>& coeff, double y0, double y,
                               Rounding r) {
    if (y == y0) return coeff[k];  // limit value f^(k)(y0)/k!
    double tiny_radius = 1e-6 * std::max(1.0, std::abs(y0));
    if (std::abs(y - y0) < tiny_radius) {
        Interval seg(std::min(y0, y), std::max(y0, y));
        return taylor_coeff_range(fn, k, seg, r);
    }
    Interval h = sub(Interval(y), Interval(y0), r);
    Interval t = coeff[0];
    for (std::size_t i = 1; i < k; ++i)
        t = add(t, mul(coeff[i], ipow(h, static_cast<long>(i), r), r), r);
    Interval num = sub(atomic_image(fn, Interval(y), r), t, r);
    return div(num, ipow(h, static_cast<long>(k), r), r);
}

}  // namespace detail

// Degree-k Taylor enclosure of a unary catalog function around y0, valid on
// Y.  Coefficients 0..k-1 are the Taylor coefficients at y0; coefficient k
// encloses the remainder ratio over Y — sharply (endpoint-ratio rule) when
// the ratio is provably monotone, by the Lagrange range f^(k)(Y)/k!
// otherwise.
inline TaylorEnclosure1D sharp_atomic_enclosure(const AtomicFn& fn, std::size_t k, double y0,
                                                const Interval& y,
                                                Rounding r = Rounding::fast) {
    if (k < 1) throw domain_error("enclosure degree must be at least 1");
    if (op_arity(fn.op) != 1 || fn.op == Op::Pack)
        throw domain_error(std::string("not a unary atomic: ") + op_name(fn.op));
    if (!contains(y, y0)) throw domain_error("reference point outside the trust interval");
    if (!bounded(y)) throw domain_error("trust interval must be bounded");

    std::vector<Interval> coeff;
    coeff.reserve(k + 1);
    for (std::size_t i = 0; i <= k; ++i)
        coeff.push_back(taylor_coeff_range(fn, i, Interval(y0), r));

    Interval ratio;
    if (ratio_monotone(fn, k, y, r)) {
        ratio = hull(detail::endpoint_ratio(fn, k, coeff, y0, y.lo, r),
                     detail::endpoint_ratio(fn, k, coeff, y0, y.hi, r));
    } else {
        ratio = taylor_coeff_range(fn, k, y, r);
    }

    TaylorEnclosure1D out;
    out.x0 = y0;
    out.trust = y;
    out.poly.coeffs = std::move(coeff);
    out.poly.coeffs[k] = ratio;
    return out;
}

}  // namespace autobound
