#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "autobound/errors.hpp"
#include "autobound/interval.hpp"

namespace autobound {

// Polynomial in z with interval coefficients: coeffs[i] multiplies z^i.
// A degenerate interval encodes a scalar coefficient.
struct IntervalPolynomial {
    std::vector<Interval> coeffs;

    IntervalPolynomial() = default;
    explicit IntervalPolynomial(std::vector<Interval> c) : coeffs(std::move(c)) {
        if (coeffs.empty()) throw domain_error("interval polynomial needs a coefficient");
    }

    std::size_t degree() const { return coeffs.size() - 1; }
    // Coefficient of z^i, zero beyond the stored degree.
    Interval at(std::size_t i) const { return i < coeffs.size() ? coeffs[i] : Interval(0.0); }
};

inline IntervalPolynomial poly_pad(IntervalPolynomial a, std::size_t degree) {
    while (a.degree() < degree) a.coeffs.push_back(Interval(0.0));
    return a;
}

// Direct interval evaluation sum_i P[i] * Z^i, powers by the power rule
// (Z^i as a single dependent factor, not repeated multiplication).
inline Interval range_bound(const IntervalPolynomial& p, const Interval& z,
                            Rounding r = Rounding::fast) {
    Interval acc = p.coeffs[0];
    for (std::size_t i = 1; i < p.coeffs.size(); ++i)
        acc = add(acc, mul(p.coeffs[i], ipow(z, static_cast<long>(i), r), r), r);
    return acc;
}

inline IntervalPolynomial poly_add(const IntervalPolynomial& a, const IntervalPolynomial& b,
                                   Rounding r = Rounding::fast) {
    IntervalPolynomial out;
    std::size_t n = std::max(a.coeffs.size(), b.coeffs.size());
    out.coeffs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.coeffs.push_back(add(a.at(i), b.at(i), r));
    return out;
}

inline IntervalPolynomial poly_neg(const IntervalPolynomial& a) {
    IntervalPolynomial out;
    out.coeffs.reserve(a.coeffs.size());
    for (const Interval& c : a.coeffs) out.coeffs.push_back(neg(c));
    return out;
}

inline IntervalPolynomial poly_sub(const IntervalPolynomial& a, const IntervalPolynomial& b,
                                   Rounding r = Rounding::fast) {
    return poly_add(a, poly_neg(b), r);
}

inline IntervalPolynomial poly_scale(const IntervalPolynomial& a, double c,
                                     Rounding r = Rounding::fast) {
    IntervalPolynomial out;
    out.coeffs.reserve(a.coeffs.size());
    for (const Interval& ci : a.coeffs) out.coeffs.push_back(scale(ci, c, r));
    return out;
}

inline IntervalPolynomial poly_add_const(IntervalPolynomial a, double c,
                                         Rounding r = Rounding::fast) {
    a.coeffs[0] = add(a.coeffs[0], Interval(c), r);
    return a;
}

// Degree reduction: keep coefficients below k, collect every term of degree
// >= k into one tail polynomial H (H[i] = A[k+i]) and spend a single
// range_bound on it: A(z) in sum_{i<k} A[i] z^i + RangeBound(H, Z) z^k.
inline IntervalPolynomial poly_truncate(const IntervalPolynomial& a, const Interval& z,
                                        std::size_t k, Rounding r = Rounding::fast) {
    if (a.degree() <= k) return poly_pad(a, k);
    IntervalPolynomial out;
    out.coeffs.assign(a.coeffs.begin(), a.coeffs.begin() + static_cast<long>(k));
    IntervalPolynomial tail;
    tail.coeffs.assign(a.coeffs.begin() + static_cast<long>(k), a.coeffs.end());
    out.coeffs.push_back(range_bound(tail, z, r));
    return out;
}

// Full convolution product (each coefficient pair multiplied once), then one
// degree reduction.
inline IntervalPolynomial poly_mul(const IntervalPolynomial& a, const IntervalPolynomial& b,
                                   const Interval& z, std::size_t k,
                                   Rounding r = Rounding::fast) {
    IntervalPolynomial full;
    full.coeffs.assign(a.degree() + b.degree() + 1, Interval(0.0));
    for (std::size_t i = 0; i < a.coeffs.size(); ++i)
        for (std::size_t j = 0; j < b.coeffs.size(); ++j)
            full.coeffs[i + j] = add(full.coeffs[i + j], mul(a.coeffs[i], b.coeffs[j], r), r);
    return poly_truncate(full, z, k, r);
}

namespace detail {

inline double factorial(unsigned n) {
    double f = 1.0;
    for (unsigned i = 2; i <= n; ++i) f *= static_cast<double>(i);
    return f;
}

// Full multinomial expansion of A(z)^p with the power rule applied to every
// repeated coefficient: term (p; e_0..e_d) * prod_i A[i]^{e_i} at degree
// sum_i i*e_i, each power via ipow.  Sharper than repeated products
// (e.g. [-3,3]^2 = [0,9], not [-9,9]).
inline void pow_terms(const IntervalPolynomial& a, unsigned p, std::size_t idx, unsigned left,
                      double coeff_denom, Interval partial, std::size_t degree,
                      IntervalPolynomial& acc, Rounding r) {
    if (idx == a.coeffs.size() - 1) {
        Interval term = left == 0 ? partial
                                  : mul(partial, ipow(a.coeffs[idx], left, r), r);
        double multinom = factorial(p) / (coeff_denom * factorial(left));
        degree += idx * left;
        acc.coeffs[degree] = add(acc.coeffs[degree], scale(term, multinom, r), r);
        return;
    }
    for (unsigned e = 0; e <= left; ++e) {
        Interval next = e == 0 ? partial : mul(partial, ipow(a.coeffs[idx], e, r), r);
        pow_terms(a, p, idx + 1, left - e, coeff_denom * factorial(e), next, degree + idx * e,
                  acc, r);
    }
}

inline IntervalPolynomial poly_pow_full(const IntervalPolynomial& a, unsigned p, Rounding r) {
    IntervalPolynomial full;
    full.coeffs.assign(a.degree() * p + 1, Interval(0.0));
    pow_terms(a, p, 0, p, 1.0, Interval(1.0), 0, full, r);
    return full;
}

}  // namespace detail

inline IntervalPolynomial poly_pow(const IntervalPolynomial& a, unsigned p, const Interval& z,
                                   std::size_t k, Rounding r = Rounding::fast) {
    if (p > 60) throw resource_error("poly_pow: exponent " + std::to_string(p) + " too large");
    if (p == 0) return poly_pad(IntervalPolynomial({Interval(1.0)}), k);
    if (p == 1) return poly_truncate(a, z, k, r);
    return poly_truncate(detail::poly_pow_full(a, p, r), z, k, r);
}

// Formal substitution A(B(z)) expanded in full (inner powers B^i by the same
// multinomial rule as poly_pow), then one degree reduction: A o_Z B.
// Callers compose with B = P - P[0], so B's constant term must contain zero
// (exactly zero under fast rounding, a rounding-width interval otherwise).
inline IntervalPolynomial poly_compose(const IntervalPolynomial& a, const IntervalPolynomial& b,
                                       const Interval& z, std::size_t k,
                                       Rounding r = Rounding::fast) {
    if (!contains(b.coeffs[0], 0.0))
        throw domain_error("poly_compose: inner constant term must contain zero");
    IntervalPolynomial full;
    full.coeffs.assign(a.degree() * b.degree() + 1, Interval(0.0));
    full.coeffs[0] = a.coeffs[0];
    for (std::size_t i = 1; i < a.coeffs.size(); ++i) {
        IntervalPolynomial bi = detail::poly_pow_full(b, static_cast<unsigned>(i), r);
        for (std::size_t j = 0; j < bi.coeffs.size(); ++j)
            full.coeffs[j] = add(full.coeffs[j], mul(a.coeffs[i], bi.coeffs[j], r), r);
    }
    return poly_truncate(full, z, k, r);
}

// A degree-k enclosure of f around x0, valid over the trust interval:
// f(x) lies in poly(x - x0) for every x in trust.  Coefficients 0..k-1 are
// scalars (f's Taylor coefficients at x0); only coefficient k is wide.
struct TaylorEnclosure1D {
    double x0 = 0.0;
    Interval trust{0.0};
    IntervalPolynomial poly;
};

// Displacement frame of the trust interval: Z = trust - x0.
inline Interval z_frame(const TaylorEnclosure1D& e, Rounding r = Rounding::fast) {
    return sub(e.trust, Interval(e.x0), r);
}

inline Interval enclosure_eval(const TaylorEnclosure1D& e, double x,
                               Rounding r = Rounding::fast) {
    return range_bound(e.poly, sub(Interval(x), Interval(e.x0), r), r);
}

inline Interval enclosure_range(const TaylorEnclosure1D& e, Rounding r = Rounding::fast) {
    return range_bound(e.poly, z_frame(e, r), r);
}

}  // namespace autobound
