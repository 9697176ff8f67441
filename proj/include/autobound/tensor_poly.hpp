#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "autobound/bilinear.hpp"
#include "autobound/errors.hpp"
#include "autobound/interval.hpp"
#include "autobound/poly1d.hpp"
#include "autobound/sharp.hpp"
#include "autobound/tensor.hpp"

namespace autobound {

// Any single coefficient tensor is capped at this many entries, so degree and
// input dimension are jointly limited (d^k entries per scalar output).
inline constexpr std::size_t kMaxCoeffEntries = 1000000;

namespace detail {

// Shape of coefficient j: out + j copies of in.  All coefficient shapes flow
// through here, so the rank and entry caps apply uniformly.
inline Shape tip_shape(const Shape& out, const Shape& in, std::size_t j) {
    Shape s = out;
    for (std::size_t q = 0; q < j; ++q) s.insert(s.end(), in.begin(), in.end());
    check_rank(s);
    if (numel(s) > kMaxCoeffEntries)
        throw resource_error("coefficient tensor " + shape_str(s) + " holds " +
                             std::to_string(numel(s)) + " entries, above the cap " +
                             std::to_string(kMaxCoeffEntries));
    return s;
}

}  // namespace detail

// Polynomial in a tensor displacement Z with tensor-interval coefficients:
// A(Z) = sum_j <A[j], Z^(x)j>, coefficient j of shape out_shape + j*in_shape
// (so the inner product contracts the trailing j*rank(in) axes).
struct TensorIntervalPolynomial {
    Shape in_shape, out_shape;
    std::vector<TensorInterval> coeffs;

    TensorIntervalPolynomial() = default;
    TensorIntervalPolynomial(Shape in, Shape out, std::vector<TensorInterval> c)
        : in_shape(std::move(in)), out_shape(std::move(out)), coeffs(std::move(c)) {
        if (coeffs.empty()) throw domain_error("tensor interval polynomial needs a coefficient");
        for (std::size_t j = 0; j < coeffs.size(); ++j) {
            Shape want = detail::tip_shape(out_shape, in_shape, j);
            if (coeffs[j].shape() != want)
                throw error("tensor polynomial coefficient " + std::to_string(j) + " has shape " +
                            shape_str(coeffs[j].shape()) + ", expected " + shape_str(want));
        }
    }

    std::size_t degree() const { return coeffs.size() - 1; }
    // Coefficient of Z^(x)j, zero beyond the stored degree.
    TensorInterval at(std::size_t j) const {
        return j < coeffs.size() ? coeffs[j] : ti_zeros(detail::tip_shape(out_shape, in_shape, j));
    }
};

inline TensorIntervalPolynomial tip_zero(const Shape& in, const Shape& out, std::size_t degree) {
    TensorIntervalPolynomial p;
    p.in_shape = in;
    p.out_shape = out;
    p.coeffs.reserve(degree + 1);
    for (std::size_t j = 0; j <= degree; ++j) p.coeffs.push_back(ti_zeros(detail::tip_shape(out, in, j)));
    return p;
}

inline TensorIntervalPolynomial tip_pad(TensorIntervalPolynomial a, std::size_t degree) {
    while (a.degree() < degree)
        a.coeffs.push_back(ti_zeros(detail::tip_shape(a.out_shape, a.in_shape, a.coeffs.size())));
    return a;
}

namespace detail {

inline bool ti_exact_zero(const TensorInterval& t) {
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t.lo.data[i] != 0.0 || t.hi.data[i] != 0.0) return false;
    return true;
}

// Trailing exact-zero coefficients contribute nothing to products, powers, or
// compositions, but inflate the rank of the full (untruncated) expansion.
// Dropping them first keeps intermediates inside the rank cap.
inline TensorIntervalPolynomial tip_trim(TensorIntervalPolynomial a) {
    while (a.coeffs.size() > 1 && ti_exact_zero(a.coeffs.back())) a.coeffs.pop_back();
    return a;
}

}  // namespace detail

// Z^(x)i with the power rule: entry (m_1..m_i) = prod over distinct flat
// indices ipow(Z_m, multiplicity), so a single repeated factor never loses the
// dependency (and a one-entry Z degenerates to plain ipow).
inline TensorInterval interval_outer_power(const TensorInterval& z, std::size_t i,
                                           Rounding r = Rounding::fast) {
    if (i == 0) return TensorInterval(scalar_tensor(1.0));
    if (i == 1) return z;
    std::size_t n = z.size();
    TensorInterval out = ti_zeros(detail::tip_shape({}, z.shape(), i));
    std::vector<unsigned> mult(n);
    for (std::size_t f = 0; f < out.size(); ++f) {
        std::fill(mult.begin(), mult.end(), 0u);
        std::size_t rem = f;
        for (std::size_t q = 0; q < i; ++q) {
            mult[rem % n]++;
            rem /= n;
        }
        Interval acc;
        bool first = true;
        for (std::size_t m = 0; m < n; ++m) {
            if (!mult[m]) continue;
            Interval p = ipow(z.at(m), static_cast<long>(mult[m]), r);
            acc = first ? p : mul(acc, p, r);
            first = false;
        }
        out.set(f, acc);
    }
    return out;
}

// Direct interval evaluation sum_j <A[j], Z^(x)j>, mirroring the scalar
// range_bound accumulation order.
inline TensorInterval tip_range_bound(const TensorIntervalPolynomial& p, const TensorInterval& z,
                                      Rounding r = Rounding::fast) {
    if (z.shape() != p.in_shape)
        throw error("tip_range_bound: displacement shape " + shape_str(z.shape()) +
                    " does not match input shape " + shape_str(p.in_shape));
    TensorInterval acc = p.coeffs[0];
    for (std::size_t i = 1; i < p.coeffs.size(); ++i)
        acc = ti_add(acc, ti_inner(p.coeffs[i], interval_outer_power(z, i, r), r), r);
    return acc;
}

inline void check_same_frame(const TensorIntervalPolynomial& a, const TensorIntervalPolynomial& b,
                             const char* what) {
    if (a.in_shape != b.in_shape || a.out_shape != b.out_shape)
        throw error(std::string(what) + ": shape mismatch " + shape_str(a.out_shape) + "/" +
                    shape_str(a.in_shape) + " vs " + shape_str(b.out_shape) + "/" +
                    shape_str(b.in_shape));
}

inline TensorIntervalPolynomial tip_add(const TensorIntervalPolynomial& a,
                                        const TensorIntervalPolynomial& b,
                                        Rounding r = Rounding::fast) {
    check_same_frame(a, b, "tip_add");
    TensorIntervalPolynomial out;
    out.in_shape = a.in_shape;
    out.out_shape = a.out_shape;
    std::size_t n = std::max(a.coeffs.size(), b.coeffs.size());
    out.coeffs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.coeffs.push_back(ti_add(a.at(i), b.at(i), r));
    return out;
}

inline TensorIntervalPolynomial tip_neg(const TensorIntervalPolynomial& a) {
    TensorIntervalPolynomial out = a;
    for (TensorInterval& c : out.coeffs) c = ti_neg(c);
    return out;
}

inline TensorIntervalPolynomial tip_scale(const TensorIntervalPolynomial& a, double c,
                                          Rounding r = Rounding::fast) {
    TensorIntervalPolynomial out = a;
    for (TensorInterval& ci : out.coeffs) ci = ti_scale(ci, c, r);
    return out;
}

// Degree reduction: keep coefficients below k and fold every term of degree
// >= k into coefficient k through a single range bound, contracting the excess
// axes of A[k+j] against Z^(x)j (the tensor analogue of poly_truncate).
inline TensorIntervalPolynomial tip_truncate(const TensorIntervalPolynomial& a,
                                             const TensorInterval& z, std::size_t k,
                                             Rounding r = Rounding::fast) {
    if (a.degree() <= k) return tip_pad(a, k);
    TensorIntervalPolynomial out;
    out.in_shape = a.in_shape;
    out.out_shape = a.out_shape;
    out.coeffs.assign(a.coeffs.begin(), a.coeffs.begin() + static_cast<long>(k));
    TensorInterval acc = a.coeffs[k];
    for (std::size_t j = 1; k + j < a.coeffs.size(); ++j)
        acc = ti_add(acc, ti_inner(a.coeffs[k + j], interval_outer_power(z, j, r), r), r);
    out.coeffs.push_back(std::move(acc));
    return out;
}

// Full convolution via the batched outer product over the shared output axes,
// then one degree reduction; on scalar shapes this is poly_mul entry for entry.
inline TensorIntervalPolynomial tip_elementwise_mul(const TensorIntervalPolynomial& a0,
                                                    const TensorIntervalPolynomial& b0,
                                                    const TensorInterval& z, std::size_t k,
                                                    Rounding r = Rounding::fast) {
    check_same_frame(a0, b0, "tip_elementwise_mul");
    TensorIntervalPolynomial a = detail::tip_trim(a0), b = detail::tip_trim(b0);
    std::size_t s = a.out_shape.size();
    TensorIntervalPolynomial full = tip_zero(a.in_shape, a.out_shape, a.degree() + b.degree());
    for (std::size_t i = 0; i < a.coeffs.size(); ++i)
        for (std::size_t j = 0; j < b.coeffs.size(); ++j)
            full.coeffs[i + j] =
                ti_add(full.coeffs[i + j], ti_batched_outer(a.coeffs[i], b.coeffs[j], s, r), r);
    return tip_truncate(full, z, k, r);
}

namespace detail {

// A^(x)e per batch entry (the leading batch_rank axes are shared): block
// index tuples with repeats are grouped through ipow, exactly like
// interval_outer_power; a scalar block degenerates to elementwise ipow.
inline TensorInterval batched_outer_power(const TensorInterval& a, unsigned e,
                                          std::size_t batch_rank, Rounding r) {
    if (e == 0) throw internal_error("batched_outer_power: zero exponent");
    Shape batch(a.shape().begin(), a.shape().begin() + static_cast<long>(batch_rank));
    Shape block(a.shape().begin() + static_cast<long>(batch_rank), a.shape().end());
    TensorInterval out = ti_zeros(tip_shape(batch, block, e));
    std::size_t nb = numel(batch), nblk = numel(block);
    std::size_t ntuples = nb ? out.size() / nb : 0;
    std::vector<unsigned> mult(nblk);
    for (std::size_t b = 0; b < nb; ++b)
        for (std::size_t f = 0; f < ntuples; ++f) {
            std::fill(mult.begin(), mult.end(), 0u);
            std::size_t rem = f;
            for (unsigned q = 0; q < e; ++q) {
                mult[rem % nblk]++;
                rem /= nblk;
            }
            Interval acc;
            bool first = true;
            for (std::size_t m = 0; m < nblk; ++m) {
                if (!mult[m]) continue;
                Interval p = ipow(a.at(b * nblk + m), static_cast<long>(mult[m]), r);
                acc = first ? p : mul(acc, p, r);
                first = false;
            }
            out.set(b * ntuples + f, acc);
        }
    return out;
}

// Multinomial expansion of A(Z)^p, same term order and power-rule grouping as
// the scalar pow_terms (so scalar shapes reproduce it exactly).
inline void tip_pow_terms(const TensorIntervalPolynomial& a, unsigned p, std::size_t idx,
                          unsigned left, double coeff_denom, const TensorInterval& partial,
                          std::size_t degree, TensorIntervalPolynomial& acc, Rounding r) {
    std::size_t s = a.out_shape.size();
    if (idx == a.coeffs.size() - 1) {
        TensorInterval term =
            left == 0 ? partial
                      : ti_batched_outer(partial, batched_outer_power(a.coeffs[idx], left, s, r),
                                         s, r);
        double multinom = factorial(p) / (coeff_denom * factorial(left));
        degree += idx * left;
        acc.coeffs[degree] = ti_add(acc.coeffs[degree], ti_scale(term, multinom, r), r);
        return;
    }
    for (unsigned e = 0; e <= left; ++e) {
        TensorInterval next =
            e == 0 ? partial
                   : ti_batched_outer(partial, batched_outer_power(a.coeffs[idx], e, s, r), s, r);
        tip_pow_terms(a, p, idx + 1, left - e, coeff_denom * factorial(e), next, degree + idx * e,
                      acc, r);
    }
}

inline TensorIntervalPolynomial tip_pow_full(const TensorIntervalPolynomial& a, unsigned p,
                                             Rounding r) {
    TensorIntervalPolynomial full = tip_zero(a.in_shape, a.out_shape, a.degree() * p);
    tip_pow_terms(a, p, 0, p, 1.0, TensorInterval(Tensor(a.out_shape, 1.0)), 0, full, r);
    return full;
}

}  // namespace detail

inline TensorIntervalPolynomial tip_pow(const TensorIntervalPolynomial& a, unsigned p,
                                        const TensorInterval& z, std::size_t k,
                                        Rounding r = Rounding::fast) {
    if (p > 60) throw resource_error("tip_pow: exponent " + std::to_string(p) + " too large");
    if (p == 0) {
        TensorIntervalPolynomial one;
        one.in_shape = a.in_shape;
        one.out_shape = a.out_shape;
        one.coeffs.push_back(TensorInterval(Tensor(a.out_shape, 1.0)));
        return tip_pad(std::move(one), k);
    }
    if (p == 1) return tip_truncate(a, z, k, r);
    return tip_truncate(detail::tip_pow_full(detail::tip_trim(a), p, r), z, k, r);
}

namespace detail {

inline TensorInterval ti_mul_interval(const Interval& c, const TensorInterval& t, Rounding r) {
    return ti_map(t, [&](const Interval& x) { return mul(c, x, r); });
}

// Formal substitution of a scalar-output inner polynomial into a 1-D outer
// polynomial: same full expansion and single fold as poly_compose.  The
// building block behind elementwise atomic composition.
inline TensorIntervalPolynomial tip_compose_scalar(const IntervalPolynomial& a,
                                                   const TensorIntervalPolynomial& b,
                                                   const TensorInterval& z, std::size_t k,
                                                   Rounding r) {
    if (!b.out_shape.empty())
        throw internal_error("tip_compose_scalar: inner polynomial must have scalar output");
    if (!contains(b.coeffs[0].at(0), 0.0))
        throw domain_error("tip_compose_scalar: inner constant term must contain zero");
    TensorIntervalPolynomial full = tip_zero(b.in_shape, {}, a.degree() * b.degree());
    full.coeffs[0] = ti_scalar(a.coeffs[0]);
    for (std::size_t i = 1; i < a.coeffs.size(); ++i) {
        TensorIntervalPolynomial bi = tip_pow_full(b, static_cast<unsigned>(i), r);
        for (std::size_t j = 0; j < bi.coeffs.size(); ++j)
            full.coeffs[j] = ti_add(full.coeffs[j], ti_mul_interval(a.coeffs[i], bi.coeffs[j], r), r);
    }
    return tip_truncate(full, z, k, r);
}

}  // namespace detail

// Elementwise atomic map: every output entry gets its own sharp 1-D enclosure
// around the reference value (the entry of the point coefficient 0), composed
// with that entry's slice polynomial.  y is the argument's value range over z
// and must have the output shape.
inline TensorIntervalPolynomial tip_elementwise_fn(const AtomicFn& fn,
                                                   const TensorIntervalPolynomial& a,
                                                   const TensorInterval& y, const TensorInterval& z,
                                                   std::size_t k, Rounding r = Rounding::fast) {
    if (y.shape() != a.out_shape)
        throw error("tip_elementwise_fn: range shape " + shape_str(y.shape()) +
                    " does not match output shape " + shape_str(a.out_shape));
    TensorIntervalPolynomial out = tip_zero(a.in_shape, a.out_shape, k);
    std::size_t n = numel(a.out_shape);
    for (std::size_t o = 0; o < n; ++o) {
        TensorIntervalPolynomial slice;
        slice.in_shape = a.in_shape;
        slice.out_shape = {};
        for (std::size_t j = 0; j < a.coeffs.size(); ++j) {
            TensorInterval c = ti_zeros(detail::tip_shape({}, a.in_shape, j));
            std::size_t blk = c.size();
            for (std::size_t t = 0; t < blk; ++t) c.set(t, a.coeffs[j].at(o * blk + t));
            slice.coeffs.push_back(std::move(c));
        }
        double y0 = detail::reference_point(slice.coeffs[0].at(0));
        TaylorEnclosure1D enc = sharp_atomic_enclosure(fn, k, y0, hull(y.at(o), Interval(y0)), r);
        slice.coeffs[0] = ti_scalar(sub(slice.coeffs[0].at(0), Interval(y0), r));
        TensorIntervalPolynomial comp =
            detail::tip_compose_scalar(enc.poly, detail::tip_trim(std::move(slice)), z, k, r);
        for (std::size_t j = 0; j < out.coeffs.size(); ++j) {
            std::size_t blk = comp.coeffs[j].size();
            for (std::size_t t = 0; t < blk; ++t) out.coeffs[j].set(o * blk + t, comp.coeffs[j].at(t));
        }
    }
    return out;
}

// Bilinear map lifted to polynomials: coefficient i < k collects
// Batched(A[l], B[m]) over l + m = i (the trailing displacement axes ride
// along as batch extensions), and everything of degree >= k folds through one
// range bound.
inline TensorIntervalPolynomial tip_bilinear(const BilinearOp& op,
                                             const TensorIntervalPolynomial& a0,
                                             const TensorIntervalPolynomial& b0,
                                             const TensorInterval& z, std::size_t k,
                                             BilinearStrategy strategy,
                                             Rounding r = Rounding::fast) {
    if (a0.in_shape != b0.in_shape)
        throw error("tip_bilinear: input shape mismatch " + shape_str(a0.in_shape) + " vs " +
                    shape_str(b0.in_shape));
    if (a0.out_shape != op.lhs || b0.out_shape != op.rhs)
        throw error("tip_bilinear: argument shapes " + shape_str(a0.out_shape) + ", " +
                    shape_str(b0.out_shape) + " do not match the descriptor " +
                    shape_str(op.lhs) + ", " + shape_str(op.rhs));
    TensorIntervalPolynomial a = detail::tip_trim(a0), b = detail::tip_trim(b0);
    TensorIntervalPolynomial full = tip_zero(a.in_shape, op.out, a.degree() + b.degree());
    for (std::size_t l = 0; l < a.coeffs.size(); ++l)
        for (std::size_t m = 0; m < b.coeffs.size(); ++m)
            full.coeffs[l + m] = ti_add(full.coeffs[l + m],
                                        batched_bilinear(op, a.coeffs[l], b.coeffs[m], strategy, r),
                                        r);
    return tip_truncate(full, z, k, r);
}

// Stacks same-shape polynomials along a new leading output axis (coefficient
// blocks stay contiguous because output axes lead the layout).
inline TensorIntervalPolynomial tip_pack(const std::vector<TensorIntervalPolynomial>& parts) {
    if (parts.empty()) throw domain_error("tip_pack: needs at least one part");
    std::size_t deg = 0;
    for (const TensorIntervalPolynomial& p : parts) {
        check_same_frame(parts[0], p, "tip_pack");
        deg = std::max(deg, p.degree());
    }
    Shape out_shape{parts.size()};
    out_shape.insert(out_shape.end(), parts[0].out_shape.begin(), parts[0].out_shape.end());
    TensorIntervalPolynomial out = tip_zero(parts[0].in_shape, out_shape, deg);
    for (std::size_t j = 0; j <= deg; ++j) {
        std::size_t blk = numel(detail::tip_shape(parts[0].out_shape, parts[0].in_shape, j));
        for (std::size_t p = 0; p < parts.size(); ++p) {
            TensorInterval c = parts[p].at(j);
            for (std::size_t t = 0; t < blk; ++t) out.coeffs[j].set(p * blk + t, c.at(t));
        }
    }
    return out;
}

}  // namespace autobound
