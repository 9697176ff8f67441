#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "autobound/bilinear.hpp"
#include "autobound/errors.hpp"
#include "autobound/expr.hpp"
#include "autobound/interval.hpp"
#include "autobound/sharp.hpp"
#include "autobound/tensor.hpp"
#include "autobound/tensor_poly.hpp"

namespace autobound {

// A degree-k enclosure of a graph output around x0, valid over the trust box:
// f(x) in poly(x - x0) entrywise for every x in trust.  x0 and trust have
// shape (d,), one slot per scalar input.
struct TaylorEnclosureND {
    Tensor x0;
    TensorInterval trust;
    TensorIntervalPolynomial poly;
};

// Displacement frame of the trust box: Z = trust - x0.
inline TensorInterval nd_z_frame(const TaylorEnclosureND& e, Rounding r = Rounding::fast) {
    return ti_zip(e.trust, TensorInterval(e.x0),
                  [&](const Interval& t, const Interval& x) { return sub(t, x, r); });
}

inline TensorInterval enclosure_eval_nd(const TaylorEnclosureND& e, const Tensor& x,
                                        Rounding r = Rounding::fast) {
    return tip_range_bound(e.poly, TensorInterval(t_sub(x, e.x0)), r);
}

inline TensorInterval enclosure_range_nd(const TaylorEnclosureND& e, Rounding r = Rounding::fast) {
    return tip_range_bound(e.poly, nd_z_frame(e, r), r);
}

namespace detail {

inline TensorInterval ti_stack(const std::vector<TensorInterval>& parts) {
    Shape out{parts.size()};
    out.insert(out.end(), parts[0].shape().begin(), parts[0].shape().end());
    TensorInterval t = ti_zeros(out);
    std::size_t blk = parts[0].size();
    for (std::size_t p = 0; p < parts.size(); ++p)
        for (std::size_t i = 0; i < blk; ++i) t.set(p * blk + i, parts[p].at(i));
    return t;
}

// Entrywise atomic image over the same hulled domain the sharp enclosure uses
// (the entry's range widened to its reference point).
inline TensorInterval nd_atomic_image(const AtomicFn& fn, const TensorInterval& c0,
                                      const TensorInterval& y, Rounding r) {
    return ti_zip(c0, y, [&](const Interval& c, const Interval& yo) {
        return atomic_image(fn, hull(yo, Interval(reference_point(c))), r);
    });
}

}  // namespace detail

// Forward propagation of tensor polynomial enclosures through a graph of d
// scalar inputs: variable v carries a polynomial P_v in Z = x - x0 (input i
// seeded with (x0_i, e_i)) plus a cached value range Y_v that serves as the
// domain of downstream atomics.  Bilinear nodes use the given strategy, or a
// per-op default (midpoint-radius when all weights are nonnegative, sign-split
// otherwise).
inline TaylorEnclosureND autobound_nd(const ExprGraph& g, const Tensor& x0,
                                      const TensorInterval& trust, std::size_t k,
                                      std::optional<BilinearStrategy> strategy = std::nullopt,
                                      Rounding r = Rounding::fast) {
    std::size_t d = g.num_inputs;
    if (k < 1) throw domain_error("enclosure degree must be at least 1");
    if (x0.shape != Shape{d} || trust.shape() != Shape{d})
        throw domain_error("reference point and trust box must have shape (" + std::to_string(d) +
                           ",), got " + shape_str(x0.shape) + " and " + shape_str(trust.shape()));
    for (std::size_t i = 0; i < d; ++i)
        if (!bounded(trust.at(i))) throw domain_error("trust box must be bounded");
    if (!ti_contains(trust, x0))
        throw domain_error("reference point outside the trust box");

    Shape in{d};
    TensorInterval z = ti_zip(trust, TensorInterval(x0),
                              [&](const Interval& t, const Interval& x) { return sub(t, x, r); });
    std::vector<TensorIntervalPolynomial> poly(g.num_vars());
    std::vector<TensorInterval> range(g.num_vars());
    for (std::size_t i = 0; i < d; ++i) {
        TensorInterval e_i = ti_zeros(in);
        e_i.set(i, Interval(1.0));
        poly[i] = TensorIntervalPolynomial(in, Shape{},
                                           {ti_scalar(Interval(x0.data[i])), std::move(e_i)});
        range[i] = ti_scalar(trust.at(i));
    }

    for (std::size_t j = 0; j < g.eqs.size(); ++j) {
        std::size_t v = g.num_inputs + j;
        const Equation& eq = g.eqs[j];
        try {
            TensorIntervalPolynomial p;
            TensorInterval image;
            switch (eq.fn.op) {
                case Op::AddConst: {
                    Interval c(eq.fn.param);
                    p = poly[eq.args[0]];
                    p.coeffs[0] = ti_map(p.coeffs[0], [&](const Interval& x) { return add(x, c, r); });
                    image = ti_map(range[eq.args[0]], [&](const Interval& x) { return add(x, c, r); });
                    break;
                }
                case Op::MulConst:
                    p = tip_scale(poly[eq.args[0]], eq.fn.param, r);
                    image = ti_scale(range[eq.args[0]], eq.fn.param, r);
                    break;
                case Op::Negate:
                    p = tip_neg(poly[eq.args[0]]);
                    image = ti_neg(range[eq.args[0]]);
                    break;
                case Op::Add:
                    p = tip_add(poly[eq.args[0]], poly[eq.args[1]], r);
                    image = ti_add(range[eq.args[0]], range[eq.args[1]], r);
                    break;
                case Op::Mul:
                    p = tip_elementwise_mul(poly[eq.args[0]], poly[eq.args[1]], z, k, r);
                    image = ti_hadamard(range[eq.args[0]], range[eq.args[1]], r);
                    break;
                case Op::PowConst:
                    if (is_integer(eq.fn.param) && eq.fn.param >= 0.0) {
                        p = tip_pow(poly[eq.args[0]], static_cast<unsigned>(eq.fn.param), z, k, r);
                        image = ti_map(range[eq.args[0]], [&](const Interval& x) {
                            return iv_pow_real(x, eq.fn.param, r);
                        });
                        break;
                    }
                    [[fallthrough]];
                case Op::Exp:
                case Op::Log:
                case Op::Reciprocal:
                case Op::Softplus: {
                    const TensorIntervalPolynomial& arg = poly[eq.args[0]];
                    p = tip_elementwise_fn(eq.fn, arg, range[eq.args[0]], z, k, r);
                    image = detail::nd_atomic_image(eq.fn, arg.coeffs[0], range[eq.args[0]], r);
                    break;
                }
                case Op::Bilinear: {
                    const BilinearOp& op = *eq.fn.bilinear;
                    BilinearStrategy s = strategy ? *strategy : default_strategy(op);
                    p = tip_bilinear(op, poly[eq.args[0]], poly[eq.args[1]], z, k, s, r);
                    image = batched_bilinear(op, range[eq.args[0]], range[eq.args[1]], s, r);
                    break;
                }
                case Op::Pack: {
                    std::vector<TensorIntervalPolynomial> parts;
                    std::vector<TensorInterval> ranges;
                    parts.reserve(eq.args.size());
                    ranges.reserve(eq.args.size());
                    for (std::size_t a : eq.args) {
                        parts.push_back(poly[a]);
                        ranges.push_back(range[a]);
                    }
                    p = tip_pack(parts);
                    image = detail::ti_stack(ranges);
                    break;
                }
            }
            poly[v] = std::move(p);
            range[v] = ti_intersect(image, tip_range_bound(poly[v], z, r));
        } catch (const domain_error& e) {
            if (e.equation < 0) throw domain_error(e.what(), static_cast<long>(v));
            throw;
        }
    }

    TaylorEnclosureND out;
    out.x0 = x0;
    out.trust = trust;
    out.poly = tip_pad(std::move(poly[g.output()]), k);
    return out;
}

}  // namespace autobound
