#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "autobound/errors.hpp"
#include "autobound/interval.hpp"

// Dense row-major tensors and elementwise interval tensors.  Rank is capped so
// index arithmetic stays trivially safe; raise the cap at compile time if a
// deeper nesting of outer products is ever needed.
#ifndef AUTOBOUND_MAX_RANK
#define AUTOBOUND_MAX_RANK 6
#endif

namespace autobound {

using Shape = std::vector<std::size_t>;

inline constexpr std::size_t kMaxRank = AUTOBOUND_MAX_RANK;

inline std::size_t numel(const Shape& s) {
    std::size_t n = 1;
    for (std::size_t d : s) n *= d;
    return n;
}

inline std::string shape_str(const Shape& s) {
    std::string out = "(";
    for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
    return out + ")";
}

inline void check_rank(const Shape& s) {
    if (s.size() > kMaxRank)
        throw resource_error("tensor rank " + std::to_string(s.size()) + " exceeds cap " +
                             std::to_string(kMaxRank));
}

inline Shape concat(const Shape& a, const Shape& b) {
    Shape out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

// Rank 0 (shape ()) holds a single scalar entry.
struct Tensor {
    Shape shape;
    std::vector<double> data;

    Tensor() : data(1, 0.0) {}

    explicit Tensor(Shape s, double fill = 0.0) : shape(std::move(s)), data(numel(shape), fill) {
        check_rank(shape);
    }

    Tensor(Shape s, std::vector<double> values) : shape(std::move(s)), data(std::move(values)) {
        check_rank(shape);
        if (data.size() != numel(shape))
            throw error("tensor data size " + std::to_string(data.size()) +
                        " does not match shape " + shape_str(shape));
        for (double v : data)
            if (std::isnan(v)) throw error("tensor entry is NaN");
    }

    std::size_t rank() const { return shape.size(); }
    std::size_t size() const { return data.size(); }
};

inline Tensor scalar_tensor(double v) { return Tensor(Shape{}, std::vector<double>{v}); }

inline void check_same_shape(const Tensor& a, const Tensor& b, const char* what) {
    if (a.shape != b.shape)
        throw error(std::string(what) + ": shape mismatch " + shape_str(a.shape) + " vs " +
                    shape_str(b.shape));
}

inline Tensor t_add(const Tensor& a, const Tensor& b) {
    check_same_shape(a, b, "tensor add");
    Tensor out(a.shape);
    for (std::size_t i = 0; i < a.size(); ++i) out.data[i] = a.data[i] + b.data[i];
    return out;
}

inline Tensor t_sub(const Tensor& a, const Tensor& b) {
    check_same_shape(a, b, "tensor sub");
    Tensor out(a.shape);
    for (std::size_t i = 0; i < a.size(); ++i) out.data[i] = a.data[i] - b.data[i];
    return out;
}

inline Tensor t_scale(const Tensor& a, double c) {
    Tensor out(a.shape);
    for (std::size_t i = 0; i < a.size(); ++i) out.data[i] = c * a.data[i];
    return out;
}

inline Tensor t_neg(const Tensor& a) { return t_scale(a, -1.0); }

inline Tensor t_abs(const Tensor& a) {
    Tensor out(a.shape);
    for (std::size_t i = 0; i < a.size(); ++i) out.data[i] = std::fabs(a.data[i]);
    return out;
}

// max(entry, 0) / min(entry, 0): the sign parts used by the sign-split bound.
inline Tensor t_pos(const Tensor& a) {
    Tensor out(a.shape);
    for (std::size_t i = 0; i < a.size(); ++i) out.data[i] = std::max(a.data[i], 0.0);
    return out;
}

inline Tensor t_neg_part(const Tensor& a) {
    Tensor out(a.shape);
    for (std::size_t i = 0; i < a.size(); ++i) out.data[i] = std::min(a.data[i], 0.0);
    return out;
}

inline Tensor t_hadamard(const Tensor& a, const Tensor& b) {
    check_same_shape(a, b, "tensor hadamard");
    Tensor out(a.shape);
    for (std::size_t i = 0; i < a.size(); ++i) out.data[i] = a.data[i] * b.data[i];
    return out;
}

// Inner product <A, B>: contracts the trailing rank(B) axes of A against all
// of B.  Rank(B) == rank(A) gives the full contraction (a scalar tensor).
inline Tensor inner(const Tensor& a, const Tensor& b) {
    if (b.rank() > a.rank())
        throw error("inner: contraction operand rank exceeds lhs rank");
    Shape lead(a.shape.begin(), a.shape.end() - b.rank());
    Shape tail(a.shape.end() - b.rank(), a.shape.end());
    if (tail != b.shape)
        throw error("inner: trailing axes " + shape_str(tail) + " do not match " +
                    shape_str(b.shape));
    std::size_t nl = numel(lead), nt = numel(tail);
    Tensor out(lead);
    for (std::size_t l = 0; l < nl; ++l) {
        double acc = 0.0;
        for (std::size_t t = 0; t < nt; ++t) acc += a.data[l * nt + t] * b.data[t];
        out.data[l] = acc;
    }
    return out;
}

// Outer product A (x) B, shape = shape(A) + shape(B).
inline Tensor outer(const Tensor& a, const Tensor& b) {
    Tensor out(concat(a.shape, b.shape));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out.data[i * b.size() + j] = a.data[i] * b.data[j];
    return out;
}

// Batched outer product (x)_s: the first s axes are shared batch axes.
inline Tensor batched_outer(const Tensor& a, const Tensor& b, std::size_t s) {
    if (s > a.rank() || s > b.rank())
        throw error("batched_outer: batch rank exceeds operand rank");
    Shape batch(a.shape.begin(), a.shape.begin() + s);
    if (!std::equal(batch.begin(), batch.end(), b.shape.begin()))
        throw error("batched_outer: batch axes disagree");
    Shape resta(a.shape.begin() + s, a.shape.end());
    Shape restb(b.shape.begin() + s, b.shape.end());
    std::size_t nb = numel(batch), na = numel(resta), nbr = numel(restb);
    Tensor out(concat(concat(batch, resta), restb));
    for (std::size_t k = 0; k < nb; ++k)
        for (std::size_t i = 0; i < na; ++i)
            for (std::size_t j = 0; j < nbr; ++j)
                out.data[(k * na + i) * nbr + j] = a.data[k * na + i] * b.data[k * nbr + j];
    return out;
}

// ---------------------------------------------------------------------------
// Interval tensors: elementwise [lo, hi] boxes.

struct TensorInterval {
    Tensor lo, hi;

    TensorInterval() = default;

    explicit TensorInterval(const Tensor& point) : lo(point), hi(point) {}

    TensorInterval(Tensor lo_, Tensor hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
        check_same_shape(lo, hi, "tensor interval");
        for (std::size_t i = 0; i < lo.size(); ++i)
            if (lo.data[i] > hi.data[i])
                throw error("tensor interval endpoints out of order at entry " + std::to_string(i));
    }

    const Shape& shape() const { return lo.shape; }
    std::size_t size() const { return lo.size(); }
    Interval at(std::size_t flat) const { return Interval(lo.data[flat], hi.data[flat]); }
    void set(std::size_t flat, const Interval& v) {
        lo.data[flat] = v.lo;
        hi.data[flat] = v.hi;
    }
};

inline TensorInterval ti_zeros(const Shape& s) { return TensorInterval(Tensor(s)); }

inline TensorInterval ti_scalar(const Interval& v) {
    return TensorInterval(scalar_tensor(v.lo), scalar_tensor(v.hi));
}

inline bool ti_degenerate(const TensorInterval& a) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a.lo.data[i] != a.hi.data[i]) return false;
    return true;
}

inline bool ti_contains(const TensorInterval& a, const Tensor& x) {
    check_same_shape(a.lo, x, "tensor interval membership");
    for (std::size_t i = 0; i < a.size(); ++i)
        if (x.data[i] < a.lo.data[i] || x.data[i] > a.hi.data[i]) return false;
    return true;
}

inline bool ti_contains(const TensorInterval& a, const TensorInterval& b) {
    check_same_shape(a.lo, b.lo, "tensor interval containment");
    for (std::size_t i = 0; i < a.size(); ++i)
        if (b.lo.data[i] < a.lo.data[i] || b.hi.data[i] > a.hi.data[i]) return false;
    return true;
}

inline Tensor ti_midpoint(const TensorInterval& a) {
    Tensor out(a.shape());
    for (std::size_t i = 0; i < a.size(); ++i) out.data[i] = midpoint(a.at(i));
    return out;
}

inline Tensor ti_radius(const TensorInterval& a) {
    Tensor out(a.shape());
    for (std::size_t i = 0; i < a.size(); ++i) out.data[i] = radius(a.at(i));
    return out;
}

template <typename F>
inline TensorInterval ti_map(const TensorInterval& a, F&& f) {
    TensorInterval out = ti_zeros(a.shape());
    for (std::size_t i = 0; i < a.size(); ++i) out.set(i, f(a.at(i)));
    return out;
}

template <typename F>
inline TensorInterval ti_zip(const TensorInterval& a, const TensorInterval& b, F&& f) {
    check_same_shape(a.lo, b.lo, "tensor interval zip");
    TensorInterval out = ti_zeros(a.shape());
    for (std::size_t i = 0; i < a.size(); ++i) out.set(i, f(a.at(i), b.at(i)));
    return out;
}

inline TensorInterval ti_add(const TensorInterval& a, const TensorInterval& b,
                             Rounding r = Rounding::fast) {
    return ti_zip(a, b, [&](const Interval& x, const Interval& y) { return add(x, y, r); });
}

inline TensorInterval ti_neg(const TensorInterval& a) {
    return ti_map(a, [](const Interval& x) { return neg(x); });
}

inline TensorInterval ti_scale(const TensorInterval& a, double c, Rounding r = Rounding::fast) {
    return ti_map(a, [&](const Interval& x) { return scale(x, c, r); });
}

inline TensorInterval ti_hadamard(const TensorInterval& a, const TensorInterval& b,
                                  Rounding r = Rounding::fast) {
    return ti_zip(a, b, [&](const Interval& x, const Interval& y) { return mul(x, y, r); });
}

inline TensorInterval ti_ipow(const TensorInterval& a, long p, Rounding r = Rounding::fast) {
    return ti_map(a, [&](const Interval& x) { return ipow(x, p, r); });
}

inline TensorInterval ti_intersect(const TensorInterval& a, const TensorInterval& b) {
    return ti_zip(a, b, [](const Interval& x, const Interval& y) { return intersect(x, y); });
}

inline TensorInterval ti_hull(const TensorInterval& a, const TensorInterval& b) {
    return ti_zip(a, b, [](const Interval& x, const Interval& y) { return hull(x, y); });
}

// Interval inner product; exact (no correlation loss) when either operand is a
// point tensor, because degenerate interval arithmetic is exact per entry.
inline TensorInterval ti_inner(const TensorInterval& a, const TensorInterval& b,
                               Rounding r = Rounding::fast) {
    if (b.lo.rank() > a.lo.rank()) throw error("ti_inner: contraction operand rank exceeds lhs rank");
    Shape lead(a.shape().begin(), a.shape().end() - b.lo.rank());
    Shape tail(a.shape().end() - b.lo.rank(), a.shape().end());
    if (tail != b.shape())
        throw error("ti_inner: trailing axes " + shape_str(tail) + " do not match " +
                    shape_str(b.shape()));
    std::size_t nl = numel(lead), nt = numel(tail);
    TensorInterval out = ti_zeros(lead);
    for (std::size_t l = 0; l < nl; ++l) {
        Interval acc(0.0);
        for (std::size_t t = 0; t < nt; ++t) acc = add(acc, mul(a.at(l * nt + t), b.at(t), r), r);
        out.set(l, acc);
    }
    return out;
}

inline TensorInterval ti_inner(const TensorInterval& a, const Tensor& b,
                               Rounding r = Rounding::fast) {
    return ti_inner(a, TensorInterval(b), r);
}

inline TensorInterval ti_outer(const TensorInterval& a, const TensorInterval& b,
                               Rounding r = Rounding::fast) {
    TensorInterval out = ti_zeros(concat(a.shape(), b.shape()));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            out.set(i * b.size() + j, mul(a.at(i), b.at(j), r));
    return out;
}

inline TensorInterval ti_batched_outer(const TensorInterval& a, const TensorInterval& b,
                                       std::size_t s, Rounding r = Rounding::fast) {
    if (s > a.lo.rank() || s > b.lo.rank()) throw error("ti_batched_outer: batch rank too large");
    Shape batch(a.shape().begin(), a.shape().begin() + s);
    if (!std::equal(batch.begin(), batch.end(), b.shape().begin()))
        throw error("ti_batched_outer: batch axes disagree");
    Shape resta(a.shape().begin() + s, a.shape().end());
    Shape restb(b.shape().begin() + s, b.shape().end());
    std::size_t nb = numel(batch), na = numel(resta), nbr = numel(restb);
    TensorInterval out = ti_zeros(concat(concat(batch, resta), restb));
    for (std::size_t k = 0; k < nb; ++k)
        for (std::size_t i = 0; i < na; ++i)
            for (std::size_t j = 0; j < nbr; ++j)
                out.set((k * na + i) * nbr + j, mul(a.at(k * na + i), b.at(k * nbr + j), r));
    return out;
}

}  // namespace autobound
