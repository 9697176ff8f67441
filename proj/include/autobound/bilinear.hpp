#pragma once

#include <cstddef>
#include <utility>

#include "autobound/errors.hpp"
#include "autobound/interval.hpp"
#include "autobound/tensor.hpp"

namespace autobound {

// A bilinear map b(X, Y) = <<W, X>, Y>.  Since inner() contracts trailing
// axes, W is laid out as out + rhs + lhs (X contracts first, then Y).
// Dot and MatMul implement b directly (their W is 0/1 and never materialized);
// GeneralW stores W densely.
struct BilinearOp {
    enum class Kind { dot, matmul, general };

    Kind kind = Kind::dot;
    Shape lhs, rhs, out;
    Tensor w;  // kind == general only

    static BilinearOp make_dot(std::size_t n) {
        BilinearOp op;
        op.kind = Kind::dot;
        op.lhs = {n};
        op.rhs = {n};
        op.out = {};
        return op;
    }

    static BilinearOp make_matmul(std::size_t p, std::size_t q, std::size_t r) {
        BilinearOp op;
        op.kind = Kind::matmul;
        op.lhs = {p, q};
        op.rhs = {q, r};
        op.out = {p, r};
        return op;
    }

    static BilinearOp make_general(Tensor w, Shape lhs, Shape rhs) {
        BilinearOp op;
        op.kind = Kind::general;
        if (w.rank() < lhs.size() + rhs.size())
            throw error("general bilinear: weight rank below argument ranks");
        Shape tail(w.shape.end() - (lhs.size() + rhs.size()), w.shape.end());
        if (tail != concat(rhs, lhs))
            throw error("general bilinear: weight trailing axes do not match argument shapes");
        op.out = Shape(w.shape.begin(), w.shape.end() - (lhs.size() + rhs.size()));
        op.lhs = std::move(lhs);
        op.rhs = std::move(rhs);
        op.w = std::move(w);
        return op;
    }

    // True when every weight entry is >= 0 (required by midpoint-radius).
    bool nonnegative_w() const {
        if (kind != Kind::general) return true;  // 0/1 weights
        for (double v : w.data)
            if (v < 0.0) return false;
        return true;
    }

    // Materialized weight tensor (tests and oracles only).
    Tensor w_tensor() const {
        if (kind == Kind::general) return w;
        Tensor t(concat(out, concat(rhs, lhs)));
        if (kind == Kind::dot) {
            std::size_t n = lhs[0];
            for (std::size_t i = 0; i < n; ++i) t.data[i * n + i] = 1.0;
        } else {
            std::size_t p = lhs[0], q = lhs[1], r = rhs[1];
            // W[(i,j), (c,d), (a,b)] = 1 iff a==i, b==c, d==j
            for (std::size_t i = 0; i < p; ++i)
                for (std::size_t j = 0; j < r; ++j)
                    for (std::size_t b = 0; b < q; ++b) {
                        std::size_t idx = ((((i * r + j) * q + b) * r + j) * p + i) * q + b;
                        t.data[idx] = 1.0;
                    }
        }
        return t;
    }
};

namespace detail {

// Validates batched argument shapes; returns {extra-lhs count, extra-rhs count}.
inline std::pair<std::size_t, std::size_t> batched_extents(const BilinearOp& op, const Shape& u,
                                                           const Shape& v) {
    auto split = [](const Shape& full, const Shape& declared, const char* side) {
        if (full.size() < declared.size() ||
            !std::equal(declared.begin(), declared.end(), full.begin()))
            throw error(std::string("bilinear: ") + side + " argument shape " + shape_str(full) +
                        " does not extend declared " + shape_str(declared));
        return numel(Shape(full.begin() + declared.size(), full.end()));
    };
    return {split(u, op.lhs, "lhs"), split(v, op.rhs, "rhs")};
}

inline Shape batched_out_shape(const BilinearOp& op, const Shape& u, const Shape& v) {
    Shape eu(u.begin() + op.lhs.size(), u.end());
    Shape ev(v.begin() + op.rhs.size(), v.end());
    return concat(op.out, concat(eu, ev));
}

}  // namespace detail

// Point application with trailing batch axes carried along:
//   result[o, eu, ev] = sum_{x,y} W[o,x,y] * U[x,eu] * V[y,ev].
// Plain application is the special case of no trailing axes.
inline Tensor batched_apply(const BilinearOp& op, const Tensor& u, const Tensor& v) {
    auto [neu, nev] = detail::batched_extents(op, u.shape, v.shape);
    Tensor res(detail::batched_out_shape(op, u.shape, v.shape));
    if (op.kind == BilinearOp::Kind::dot) {
        std::size_t n = op.lhs[0];
        for (std::size_t eu = 0; eu < neu; ++eu)
            for (std::size_t ev = 0; ev < nev; ++ev) {
                double acc = 0.0;
                for (std::size_t i = 0; i < n; ++i) acc += u.data[i * neu + eu] * v.data[i * nev + ev];
                res.data[eu * nev + ev] = acc;
            }
    } else if (op.kind == BilinearOp::Kind::matmul) {
        std::size_t p = op.lhs[0], q = op.lhs[1], r = op.rhs[1];
        for (std::size_t a = 0; a < p; ++a)
            for (std::size_t c = 0; c < r; ++c)
                for (std::size_t eu = 0; eu < neu; ++eu)
                    for (std::size_t ev = 0; ev < nev; ++ev) {
                        double acc = 0.0;
                        for (std::size_t b = 0; b < q; ++b)
                            acc += u.data[(a * q + b) * neu + eu] * v.data[(b * r + c) * nev + ev];
                        res.data[((a * r + c) * neu + eu) * nev + ev] = acc;
                    }
    } else {
        std::size_t no = numel(op.out), nx = numel(op.lhs), ny = numel(op.rhs);
        for (std::size_t o = 0; o < no; ++o)
            for (std::size_t eu = 0; eu < neu; ++eu)
                for (std::size_t ev = 0; ev < nev; ++ev) {
                    double acc = 0.0;
                    for (std::size_t y = 0; y < ny; ++y)
                        for (std::size_t x = 0; x < nx; ++x)
                            acc += op.w.data[(o * ny + y) * nx + x] * u.data[x * neu + eu] *
                                   v.data[y * nev + ev];
                    res.data[(o * neu + eu) * nev + ev] = acc;
                }
    }
    return res;
}

inline Tensor apply(const BilinearOp& op, const Tensor& x, const Tensor& y) {
    return batched_apply(op, x, y);
}

// --- Extension 1: naive interval propagation straight through b. -----------

inline TensorInterval batched_naive(const BilinearOp& op, const TensorInterval& u,
                                    const TensorInterval& v, Rounding r = Rounding::fast) {
    auto [neu, nev] = detail::batched_extents(op, u.shape(), v.shape());
    TensorInterval res = ti_zeros(detail::batched_out_shape(op, u.shape(), v.shape()));
    if (op.kind == BilinearOp::Kind::dot) {
        std::size_t n = op.lhs[0];
        for (std::size_t eu = 0; eu < neu; ++eu)
            for (std::size_t ev = 0; ev < nev; ++ev) {
                Interval acc(0.0);
                for (std::size_t i = 0; i < n; ++i)
                    acc = add(acc, mul(u.at(i * neu + eu), v.at(i * nev + ev), r), r);
                res.set(eu * nev + ev, acc);
            }
    } else if (op.kind == BilinearOp::Kind::matmul) {
        std::size_t p = op.lhs[0], q = op.lhs[1], rr = op.rhs[1];
        for (std::size_t a = 0; a < p; ++a)
            for (std::size_t c = 0; c < rr; ++c)
                for (std::size_t eu = 0; eu < neu; ++eu)
                    for (std::size_t ev = 0; ev < nev; ++ev) {
                        Interval acc(0.0);
                        for (std::size_t b = 0; b < q; ++b)
                            acc = add(acc,
                                      mul(u.at((a * q + b) * neu + eu), v.at((b * rr + c) * nev + ev), r),
                                      r);
                        res.set(((a * rr + c) * neu + eu) * nev + ev, acc);
                    }
    } else {
        std::size_t no = numel(op.out), nx = numel(op.lhs), ny = numel(op.rhs);
        for (std::size_t o = 0; o < no; ++o)
            for (std::size_t eu = 0; eu < neu; ++eu)
                for (std::size_t ev = 0; ev < nev; ++ev) {
                    Interval acc(0.0);
                    for (std::size_t y = 0; y < ny; ++y)
                        for (std::size_t x = 0; x < nx; ++x) {
                            Interval term = mul(u.at(x * neu + eu), v.at(y * nev + ev), r);
                            acc = add(acc, scale(term, op.w.data[(o * ny + y) * nx + x], r), r);
                        }
                    res.set((o * neu + eu) * nev + ev, acc);
                }
    }
    return res;
}

namespace detail {

// Point application, run through degenerate interval arithmetic so Outward
// mode charges one ulp per elementary op.  In Fast mode this equals
// batched_apply exactly.
inline TensorInterval point_apply(const BilinearOp& op, const Tensor& u, const Tensor& v,
                                  Rounding r) {
    return batched_naive(op, TensorInterval(u), TensorInterval(v), r);
}

}  // namespace detail

// --- Extension 2: midpoint-radius (2 or 4 point applications). -------------
//
// Requires W >= 0.  Writing X = m_X + [-1,1] r_X (elementwise) gives
//   b(X, Y) <= b(m_X, m_Y) + [-1,1] (b(r_X, |m_Y|) + b(|m_X|, r_Y) + b(r_X, r_Y)),
// and if either argument is a singleton the deviation collapses to one call.
inline TensorInterval batched_midpoint_radius(const BilinearOp& op, const TensorInterval& u,
                                              const TensorInterval& v, Rounding r = Rounding::fast) {
    if (!op.nonnegative_w())
        throw domain_error("midpoint-radius bilinear extension requires nonnegative weights");
    Tensor mu = ti_midpoint(u), mv = ti_midpoint(v);
    Tensor ru = ti_radius(u), rv = ti_radius(v);
    bool u_point = ti_degenerate(u), v_point = ti_degenerate(v);

    TensorInterval center = detail::point_apply(op, mu, mv, r);
    TensorInterval dev;
    if (u_point && v_point) {
        return center;
    } else if (u_point) {
        dev = detail::point_apply(op, t_abs(mu), rv, r);
    } else if (v_point) {
        dev = detail::point_apply(op, ru, t_abs(mv), r);
    } else {
        dev = ti_add(detail::point_apply(op, ru, t_abs(mv), r),
                     ti_add(detail::point_apply(op, t_abs(mu), rv, r),
                            detail::point_apply(op, ru, rv, r), r),
                     r);
    }
    Interval pm1(-1.0, 1.0);
    return ti_zip(center, dev,
                  [&](const Interval& c, const Interval& d) { return add(c, mul(pm1, d, r), r); });
}

namespace detail {

// Eight-application endpoint/sign-part rule.  Sound only when every weight of
// `op` is >= 0: the derivation rewrites each summand A_i W_ij B_j via the
// scalar product rule, and a negative W_ij would swap which endpoint of B_j
// realizes each extreme.
inline TensorInterval signsplit_nonneg(const BilinearOp& op, const TensorInterval& u,
                                       const TensorInterval& v, Rounding r) {
    Tensor ulp = t_pos(u.lo), uln = t_neg_part(u.lo);
    Tensor uhp = t_pos(u.hi), uhn = t_neg_part(u.hi);
    Tensor vlp = t_pos(v.lo), vln = t_neg_part(v.lo);
    Tensor vhp = t_pos(v.hi), vhn = t_neg_part(v.hi);

    TensorInterval lo = ti_add(
        ti_add(detail::point_apply(op, ulp, vlp, r), detail::point_apply(op, uhp, vln, r), r),
        ti_add(detail::point_apply(op, uln, vhp, r), detail::point_apply(op, uhn, vhn, r), r), r);
    TensorInterval hi = ti_add(
        ti_add(detail::point_apply(op, uhp, vhp, r), detail::point_apply(op, ulp, vhn, r), r),
        ti_add(detail::point_apply(op, uhn, vlp, r), detail::point_apply(op, uln, vln, r), r), r);

    TensorInterval res = ti_zeros(lo.shape());
    for (std::size_t i = 0; i < res.size(); ++i)
        res.set(i, Interval(lo.at(i).lo, hi.at(i).hi));
    return res;
}

}  // namespace detail

// --- Extension 3: sign-split, any W. ----------------------------------------
//
// For W >= 0, eight point applications of b on endpoint sign-parts.  Mixed-sign
// weights are handled by splitting W = W+ + W- and applying the eight-term rule
// to the two nonnegative-weight halves (b_{W+} and b_{-W-}), then recombining;
// this keeps the rule sound for arbitrary W at twice the cost.
inline TensorInterval batched_signsplit(const BilinearOp& op, const TensorInterval& u,
                                        const TensorInterval& v, Rounding r = Rounding::fast) {
    if (op.nonnegative_w()) return detail::signsplit_nonneg(op, u, v, r);
    BilinearOp pos = BilinearOp::make_general(t_pos(op.w), op.lhs, op.rhs);
    BilinearOp negabs = BilinearOp::make_general(t_neg(t_neg_part(op.w)), op.lhs, op.rhs);
    TensorInterval p = detail::signsplit_nonneg(pos, u, v, r);
    TensorInterval n = detail::signsplit_nonneg(negabs, u, v, r);
    return ti_add(p, ti_neg(n), r);
}

enum class BilinearStrategy { naive, midpoint_radius, signsplit };

// Default strategy table: midpoint-radius wherever its W >= 0 precondition
// holds structurally, sign-split otherwise.
inline BilinearStrategy default_strategy(const BilinearOp& op) {
    return op.nonnegative_w() ? BilinearStrategy::midpoint_radius : BilinearStrategy::signsplit;
}

inline TensorInterval batched_bilinear(const BilinearOp& op, const TensorInterval& u,
                                       const TensorInterval& v, BilinearStrategy s,
                                       Rounding r = Rounding::fast) {
    switch (s) {
        case BilinearStrategy::naive: return batched_naive(op, u, v, r);
        case BilinearStrategy::midpoint_radius: return batched_midpoint_radius(op, u, v, r);
        case BilinearStrategy::signsplit: return batched_signsplit(op, u, v, r);
    }
    throw error("unknown bilinear strategy");
}

inline TensorInterval bilinear_naive(const BilinearOp& op, const TensorInterval& x,
                                     const TensorInterval& y, Rounding r = Rounding::fast) {
    return batched_naive(op, x, y, r);
}

inline TensorInterval bilinear_midpoint_radius(const BilinearOp& op, const TensorInterval& x,
                                               const TensorInterval& y,
                                               Rounding r = Rounding::fast) {
    return batched_midpoint_radius(op, x, y, r);
}

inline TensorInterval bilinear_signsplit(const BilinearOp& op, const TensorInterval& x,
                                         const TensorInterval& y, Rounding r = Rounding::fast) {
    return batched_signsplit(op, x, y, r);
}

}  // namespace autobound
