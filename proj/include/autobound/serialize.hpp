#pragma once

#include <cstdio>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "autobound/autoboundnd.hpp"
#include "autobound/expr.hpp"
#include "autobound/interval.hpp"
#include "autobound/poly1d.hpp"
#include "autobound/tensor.hpp"
#include "autobound/tensor_poly.hpp"

namespace autobound {

// Reals render with 17 significant digits so every finite value round-trips;
// infinite endpoints use the string sentinels "inf" / "-inf".
inline std::string json_real(double v) {
    if (std::isinf(v)) return v > 0.0 ? "\"inf\"" : "\"-inf\"";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string to_json(const Interval& iv) {
    return "{\"lo\": " + json_real(iv.lo) + ", \"hi\": " + json_real(iv.hi) + "}";
}

namespace detail {

inline std::string shape_json(const Shape& s) {
    std::string out = "[";
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) out += ", ";
        out += std::to_string(s[i]);
    }
    return out + "]";
}

// Row-major flat data rendered as nested arrays; rank-0 renders bare.
template <class EntryFn>
void append_nested(std::string& out, const Shape& shape, std::size_t axis, std::size_t offset,
                   std::size_t block, EntryFn&& entry) {
    if (axis == shape.size()) {
        out += entry(offset);
        return;
    }
    const std::size_t inner = block / shape[axis];
    out += '[';
    for (std::size_t i = 0; i < shape[axis]; ++i) {
        if (i) out += ", ";
        append_nested(out, shape, axis + 1, offset + i * inner, inner, entry);
    }
    out += ']';
}

}  // namespace detail

inline std::string to_json(const Tensor& t) {
    std::string out = "{\"shape\": " + detail::shape_json(t.shape) + ", \"data\": ";
    detail::append_nested(out, t.shape, 0, 0, t.size(),
                          [&](std::size_t i) { return json_real(t.data[i]); });
    return out + "}";
}

inline std::string to_json(const TensorInterval& t) {
    std::string out = "{\"shape\": " + detail::shape_json(t.lo.shape) + ", \"data\": ";
    detail::append_nested(out, t.lo.shape, 0, 0, t.lo.size(), [&](std::size_t i) {
        return to_json(Interval(t.lo.data[i], t.hi.data[i]));
    });
    return out + "}";
}

inline std::string to_json(const TaylorEnclosure1D& enc) {
    std::string out = "{\"x0\": " + json_real(enc.x0) + ", \"trust\": " + to_json(enc.trust) +
                      ", \"coeffs\": [";
    for (std::size_t i = 0; i < enc.poly.coeffs.size(); ++i) {
        if (i) out += ", ";
        out += to_json(enc.poly.coeffs[i]);
    }
    return out + "]}";
}

// Mirrors the 1-D schema; every coefficient carries its own shape header.
inline std::string to_json(const TaylorEnclosureND& enc) {
    std::string out = "{\"x0\": " + to_json(enc.x0) + ", \"trust\": " + to_json(enc.trust) +
                      ", \"coeffs\": [";
    for (std::size_t i = 0; i < enc.poly.coeffs.size(); ++i) {
        if (i) out += ", ";
        out += to_json(enc.poly.coeffs[i]);
    }
    return out + "]}";
}

inline std::string to_json(const ExprGraph& g) {
    std::string out = "{\"inputs\": " + std::to_string(g.num_inputs) + ", \"eqs\": [";
    for (std::size_t j = 0; j < g.eqs.size(); ++j) {
        const Equation& eq = g.eqs[j];
        if (j) out += ", ";
        out += "{\"fn\": \"";
        out += op_name(eq.fn.op);
        out += "\"";
        if (eq.fn.op == Op::PowConst || eq.fn.op == Op::AddConst || eq.fn.op == Op::MulConst)
            out += ", \"param\": " + json_real(eq.fn.param);
        if (eq.fn.op == Op::Bilinear) {
            const BilinearOp& op = *eq.fn.bilinear;
            const char* kind = op.kind == BilinearOp::Kind::dot ? "dot"
                               : op.kind == BilinearOp::Kind::matmul ? "matmul"
                                                                     : "general";
            out += std::string(", \"kind\": \"") + kind + "\"";
            out += ", \"lhs\": " + detail::shape_json(op.lhs);
            out += ", \"rhs\": " + detail::shape_json(op.rhs);
            if (op.kind == BilinearOp::Kind::general) out += ", \"w\": " + to_json(op.w);
        }
        out += ", \"args\": [";
        for (std::size_t a = 0; a < eq.args.size(); ++a) {
            if (a) out += ", ";
            out += std::to_string(eq.args[a]);
        }
        out += "]}";
    }
    return out + "]}";
}

}  // namespace autobound
