#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "autobound/errors.hpp"
#include "autobound/expr.hpp"
#include "autobound/interval.hpp"
#include "autobound/poly1d.hpp"
#include "autobound/sharp.hpp"

namespace autobound {

namespace detail {

inline void require_scalar_univariate(const ExprGraph& g) {
    if (g.num_inputs != 1)
        throw domain_error("the 1-D pipeline needs exactly one input variable");
    std::vector<Shape> shapes = infer_shapes(g);
    for (std::size_t v = 0; v < shapes.size(); ++v)
        if (!shapes[v].empty())
            throw domain_error("the 1-D pipeline needs a scalar graph", static_cast<long>(v));
}

}  // namespace detail

// Forward propagation of Taylor polynomial enclosures through a scalar
// expression graph: every variable v carries a degree-k interval polynomial
// P_v in z = x - x0 with f_v(x) in P_v(x - x0) on the trust interval, plus a
// cached value range Y_v used as the domain of downstream atomics.
inline TaylorEnclosure1D autobound_1d(const ExprGraph& g, double x0, const Interval& trust,
                                      std::size_t k, Rounding r = Rounding::fast) {
    if (k < 1) throw domain_error("enclosure degree must be at least 1");
    if (!bounded(trust)) throw domain_error("trust interval must be bounded");
    if (!contains(trust, x0)) throw domain_error("reference point outside the trust interval");
    detail::require_scalar_univariate(g);

    Interval z = sub(trust, Interval(x0), r);
    std::vector<IntervalPolynomial> poly(g.num_vars());
    std::vector<Interval> range(g.num_vars());
    poly[0] = poly_pad(IntervalPolynomial({Interval(x0), Interval(1.0)}), k);
    range[0] = trust;

    for (std::size_t j = 0; j < g.eqs.size(); ++j) {
        std::size_t v = g.num_inputs + j;
        const Equation& eq = g.eqs[j];
        try {
            IntervalPolynomial p;
            Interval image;
            switch (eq.fn.op) {
                case Op::AddConst:
                    p = poly[eq.args[0]];
                    p.coeffs[0] = add(p.coeffs[0], Interval(eq.fn.param), r);
                    image = add(range[eq.args[0]], Interval(eq.fn.param), r);
                    break;
                case Op::MulConst:
                    p = poly_scale(poly[eq.args[0]], eq.fn.param, r);
                    image = scale(range[eq.args[0]], eq.fn.param, r);
                    break;
                case Op::Negate:
                    p = poly_neg(poly[eq.args[0]]);
                    image = neg(range[eq.args[0]]);
                    break;
                case Op::Add:
                    p = poly_add(poly[eq.args[0]], poly[eq.args[1]], r);
                    image = add(range[eq.args[0]], range[eq.args[1]], r);
                    break;
                case Op::Mul:
                    p = poly_mul(poly[eq.args[0]], poly[eq.args[1]], z, k, r);
                    image = mul(range[eq.args[0]], range[eq.args[1]], r);
                    break;
                case Op::PowConst:
                    if (is_integer(eq.fn.param) && eq.fn.param >= 0.0) {
                        p = poly_pow(poly[eq.args[0]], static_cast<unsigned>(eq.fn.param), z, k,
                                     r);
                        image = iv_pow_real(range[eq.args[0]], eq.fn.param, r);
                        break;
                    }
                    [[fallthrough]];
                case Op::Exp:
                case Op::Log:
                case Op::Reciprocal:
                case Op::Softplus: {
                    const IntervalPolynomial& arg = poly[eq.args[0]];
                    double y0 = detail::reference_point(arg.coeffs[0]);
                    Interval y = hull(range[eq.args[0]], Interval(y0));
                    TaylorEnclosure1D t = sharp_atomic_enclosure(eq.fn, k, y0, y, r);
                    IntervalPolynomial b = arg;
                    b.coeffs[0] = sub(b.coeffs[0], Interval(y0), r);
                    p = poly_compose(t.poly, b, z, k, r);
                    image = atomic_image(eq.fn, y, r);
                    break;
                }
                default:
                    throw domain_error(std::string(op_name(eq.fn.op)) +
                                       ": not supported in the 1-D pipeline");
            }
            poly[v] = poly_pad(std::move(p), k);
            range[v] = intersect(image, range_bound(poly[v], z, r));
        } catch (const domain_error& e) {
            if (e.equation < 0) throw domain_error(e.what(), static_cast<long>(v));
            throw;
        }
    }

    TaylorEnclosure1D out;
    out.x0 = x0;
    out.trust = trust;
    out.poly = poly[g.output()];
    return out;
}

// ---- Interval-arithmetic Lagrange baseline (separate code path). ----
//
// Taylor-mode recurrences with interval coefficients: seeding the series at
// the whole trust interval makes coefficient i an enclosure of
// f^(i)(y)/i! for every y in it, so coefficient k is the classical Lagrange
// remainder bound f^(k)(trust)/k!.

namespace detail {

using Series = std::vector<Interval>;

inline Series series_const(double c, std::size_t k) {
    Series s(k + 1, Interval(0.0));
    s[0] = Interval(c);
    return s;
}

inline Series series_mul(const Series& a, const Series& b, std::size_t k, Rounding r) {
    Series c(k + 1, Interval(0.0));
    for (std::size_t i = 0; i <= k; ++i)
        for (std::size_t j = 0; i + j <= k; ++j) c[i + j] = add(c[i + j], mul(a[i], b[j], r), r);
    return c;
}

inline Series series_pow_int(const Series& u, unsigned p, std::size_t k, Rounding r) {
    if (p == 0) return series_const(1.0, k);
    Series out = u;
    for (unsigned q = 1; q < p; ++q) out = series_mul(out, u, k, r);
    return out;
}

inline Series series_exp(const Series& u, std::size_t k, Rounding r) {
    Series v(k + 1, Interval(0.0));
    v[0] = iv_exp(u[0], r);
    for (std::size_t n = 1; n <= k; ++n) {
        Interval acc(0.0);
        for (std::size_t i = 1; i <= n; ++i)
            acc = add(acc, scale(mul(u[i], v[n - i], r), static_cast<double>(i), r), r);
        v[n] = scale(acc, 1.0 / static_cast<double>(n), r);
    }
    return v;
}

inline Series series_log(const Series& u, std::size_t k, Rounding r) {
    Series v(k + 1, Interval(0.0));
    v[0] = iv_log(u[0], r);
    for (std::size_t n = 1; n <= k; ++n) {
        Interval acc(0.0);
        for (std::size_t i = 1; i + 1 <= n; ++i)
            acc = add(acc, scale(mul(u[i], v[n - i], r), static_cast<double>(n - i), r), r);
        Interval num = sub(u[n], scale(acc, 1.0 / static_cast<double>(n), r), r);
        v[n] = div(num, u[0], r);
    }
    return v;
}

inline Series series_recip(const Series& u, std::size_t k, Rounding r) {
    Series v(k + 1, Interval(0.0));
    v[0] = iv_recip(u[0], r);
    for (std::size_t n = 1; n <= k; ++n) {
        Interval acc(0.0);
        for (std::size_t i = 1; i <= n; ++i) acc = add(acc, mul(u[i], v[n - i], r), r);
        v[n] = div(neg(acc), u[0], r);
    }
    return v;
}

inline Series series_pow_real(const Series& u, double p, std::size_t k, Rounding r) {
    Series v(k + 1, Interval(0.0));
    v[0] = iv_pow_real(u[0], p, r);
    for (std::size_t n = 1; n <= k; ++n) {
        Interval acc(0.0);
        for (std::size_t i = 1; i <= n; ++i) {
            double w = (p + 1.0) * static_cast<double>(i) - static_cast<double>(n);
            acc = add(acc, scale(mul(u[i], v[n - i], r), w, r), r);
        }
        v[n] = div(scale(acc, 1.0 / static_cast<double>(n), r), u[0], r);
    }
    return v;
}

inline Series series_softplus(const Series& u, std::size_t k, Rounding r) {
    Series v(k + 1, Interval(0.0)), s(k + 1, Interval(0.0)), w(k + 1, Interval(0.0));
    v[0] = iv_softplus(u[0], r);
    s[0] = iv_sigmoid(u[0], r);
    w[0] = sub(s[0], mul(s[0], s[0], r), r);  // w = s - s^2 = softplus''
    for (std::size_t n = 1; n <= k; ++n) {
        Interval accs(0.0), accv(0.0);
        for (std::size_t i = 1; i <= n; ++i) {
            accs = add(accs, scale(mul(u[i], w[n - i], r), static_cast<double>(i), r), r);
            accv = add(accv, scale(mul(u[i], s[n - i], r), static_cast<double>(i), r), r);
        }
        s[n] = scale(accs, 1.0 / static_cast<double>(n), r);
        v[n] = scale(accv, 1.0 / static_cast<double>(n), r);
        Interval conv(0.0);
        for (std::size_t i = 0; i <= n; ++i) conv = add(conv, mul(s[i], s[n - i], r), r);
        w[n] = sub(s[n], conv, r);
    }
    return v;
}

inline Series taylor_mode(const ExprGraph& g, const Interval& seed, std::size_t k, Rounding r) {
    std::vector<Series> series(g.num_vars());
    series[0] = series_const(0.0, k);
    series[0][0] = seed;
    if (k >= 1) series[0][1] = Interval(1.0);

    for (std::size_t j = 0; j < g.eqs.size(); ++j) {
        std::size_t v = g.num_inputs + j;
        const Equation& eq = g.eqs[j];
        try {
            const Series& u = series[eq.args.empty() ? 0 : eq.args[0]];
            switch (eq.fn.op) {
                case Op::AddConst:
                    series[v] = u;
                    series[v][0] = add(u[0], Interval(eq.fn.param), r);
                    break;
                case Op::MulConst: {
                    Series out(k + 1, Interval(0.0));
                    for (std::size_t i = 0; i <= k; ++i) out[i] = scale(u[i], eq.fn.param, r);
                    series[v] = std::move(out);
                    break;
                }
                case Op::Negate: {
                    Series out(k + 1, Interval(0.0));
                    for (std::size_t i = 0; i <= k; ++i) out[i] = neg(u[i]);
                    series[v] = std::move(out);
                    break;
                }
                case Op::Add: {
                    const Series& b = series[eq.args[1]];
                    Series out(k + 1, Interval(0.0));
                    for (std::size_t i = 0; i <= k; ++i) out[i] = add(u[i], b[i], r);
                    series[v] = std::move(out);
                    break;
                }
                case Op::Mul: series[v] = series_mul(u, series[eq.args[1]], k, r); break;
                case Op::Exp: series[v] = series_exp(u, k, r); break;
                case Op::Log: series[v] = series_log(u, k, r); break;
                case Op::Reciprocal: series[v] = series_recip(u, k, r); break;
                case Op::Softplus: series[v] = series_softplus(u, k, r); break;
                case Op::PowConst: {
                    double p = eq.fn.param;
                    if (is_integer(p) && p >= 0.0)
                        series[v] = series_pow_int(u, static_cast<unsigned>(p), k, r);
                    else if (is_integer(p))
                        series[v] = series_recip(
                            series_pow_int(u, static_cast<unsigned>(-p), k, r), k, r);
                    else
                        series[v] = series_pow_real(u, p, k, r);
                    break;
                }
                default:
                    throw domain_error(std::string(op_name(eq.fn.op)) +
                                       ": not supported in the 1-D pipeline");
            }
        } catch (const domain_error& e) {
            if (e.equation < 0) throw domain_error(e.what(), static_cast<long>(v));
            throw;
        }
    }
    return series[g.output()];
}

}  // namespace detail

// Classical k-th order Taylor enclosure: exact coefficients at x0 plus the
// Lagrange remainder coefficient f^(k)(trust)/k! from one interval-seeded
// Taylor-mode pass.  Comparator only; the main pipeline never calls this.
inline TaylorEnclosure1D lagrange_baseline(const ExprGraph& g, double x0, const Interval& trust,
                                           std::size_t k, Rounding r = Rounding::fast) {
    if (k < 1) throw domain_error("enclosure degree must be at least 1");
    if (!bounded(trust)) throw domain_error("trust interval must be bounded");
    if (!contains(trust, x0)) throw domain_error("reference point outside the trust interval");
    detail::require_scalar_univariate(g);

    detail::Series at_point = detail::taylor_mode(g, Interval(x0), k, r);
    detail::Series over_set = detail::taylor_mode(g, trust, k, r);
    TaylorEnclosure1D out;
    out.x0 = x0;
    out.trust = trust;
    out.poly.coeffs.assign(at_point.begin(), at_point.begin() + static_cast<long>(k));
    out.poly.coeffs.push_back(over_set[k]);
    return out;
}

}  // namespace autobound
