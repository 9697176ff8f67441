#pragma once

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "autobound/bilinear.hpp"
#include "autobound/errors.hpp"
#include "autobound/tensor.hpp"

namespace autobound {

// The atomic vocabulary: unary scalar maps, affine constants, the two
// arithmetic combiners, bilinear tensor maps, and pack (stacks same-shape
// variables along a new leading axis; builder-only, no surface syntax).
enum class Op {
    Exp,
    Log,
    PowConst,
    Reciprocal,
    Softplus,
    AddConst,
    MulConst,
    Negate,
    Add,
    Mul,
    Bilinear,
    Pack,
};

inline const char* op_name(Op op) {
    switch (op) {
        case Op::Exp: return "exp";
        case Op::Log: return "log";
        case Op::PowConst: return "pow_const";
        case Op::Reciprocal: return "reciprocal";
        case Op::Softplus: return "softplus";
        case Op::AddConst: return "add_const";
        case Op::MulConst: return "mul_const";
        case Op::Negate: return "negate";
        case Op::Add: return "add";
        case Op::Mul: return "mul";
        case Op::Bilinear: return "bilinear";
        case Op::Pack: return "pack";
    }
    return "?";
}

// NOTE: -1 marks variadic (Pack takes one or more arguments).
inline int op_arity(Op op) {
    switch (op) {
        case Op::Add:
        case Op::Mul:
        case Op::Bilinear: return 2;
        case Op::Pack: return -1;
        default: return 1;
    }
}

inline bool is_integer(double p) { return std::isfinite(p) && p == std::floor(p); }

struct AtomicFn {
    Op op = Op::Exp;
    double param = 0.0;                          // exponent / added / multiplied constant
    std::shared_ptr<const BilinearOp> bilinear;  // set iff op == Op::Bilinear

    static AtomicFn make(Op op) {
        if (op == Op::PowConst || op == Op::AddConst || op == Op::MulConst || op == Op::Bilinear)
            throw internal_error(std::string("AtomicFn::make: ") + op_name(op) +
                                 " needs a parameter");
        return AtomicFn{op, 0.0, nullptr};
    }
    static AtomicFn pow_const(double p) {
        if (!std::isfinite(p)) throw domain_error("pow_const: exponent must be finite");
        return AtomicFn{Op::PowConst, p, nullptr};
    }
    static AtomicFn add_const(double c) {
        if (!std::isfinite(c)) throw domain_error("add_const: constant must be finite");
        return AtomicFn{Op::AddConst, c, nullptr};
    }
    static AtomicFn mul_const(double c) {
        if (!std::isfinite(c)) throw domain_error("mul_const: constant must be finite");
        return AtomicFn{Op::MulConst, c, nullptr};
    }
    static AtomicFn make_bilinear(BilinearOp op) {
        return AtomicFn{Op::Bilinear, 0.0, std::make_shared<const BilinearOp>(std::move(op))};
    }
};

// Scalar semantics of the unary atomics, with the same domain rules the
// enclosure rules assume: log needs y > 0, reciprocal needs y != 0, and a
// non-integer power needs y > 0.
inline double apply_unary(const AtomicFn& fn, double y, long equation = -1) {
    switch (fn.op) {
        case Op::Exp: return std::exp(y);
        case Op::Log:
            if (!(y > 0.0)) throw domain_error("log of non-positive value", equation);
            return std::log(y);
        case Op::Reciprocal:
            if (y == 0.0) throw domain_error("reciprocal of zero", equation);
            return 1.0 / y;
        case Op::PowConst:
            if (is_integer(fn.param)) {
                if (y == 0.0 && fn.param < 0.0)
                    throw domain_error("zero raised to a negative power", equation);
            } else if (!(y > 0.0)) {
                throw domain_error("non-integer power of a non-positive value", equation);
            }
            return std::pow(y, fn.param);
        case Op::Softplus:
            // NOTE: overflow-safe form softplus(y) = max(y,0) + log1p(exp(-|y|)).
            return std::max(y, 0.0) + std::log1p(std::exp(-std::abs(y)));
        case Op::AddConst: return y + fn.param;
        case Op::MulConst: return y * fn.param;
        case Op::Negate: return -y;
        default: throw internal_error(std::string("apply_unary: ") + op_name(fn.op));
    }
}

struct Equation {
    AtomicFn fn;
    std::vector<std::size_t> args;
};

// Variables 0..num_inputs-1 are the (scalar) inputs; equation j defines
// variable num_inputs + j; the last variable is the output.  Error messages
// identify an equation by the index of the variable it defines.
struct ExprGraph {
    std::size_t num_inputs = 0;
    std::vector<Equation> eqs;

    std::size_t num_vars() const { return num_inputs + eqs.size(); }
    std::size_t output() const { return num_vars() - 1; }
};

namespace detail {

// Shape of the variable defined by `eq`, given the shapes of everything
// before it.  Checks arity, argument ordering, and shape agreement.
inline Shape infer_one(const std::vector<Shape>& shapes, const Equation& eq, std::size_t self) {
    int arity = op_arity(eq.fn.op);
    if (arity >= 0 && eq.args.size() != static_cast<std::size_t>(arity))
        throw domain_error(std::string(op_name(eq.fn.op)) + ": expected " +
                               std::to_string(arity) + " arguments, got " +
                               std::to_string(eq.args.size()),
                           static_cast<long>(self));
    if (eq.fn.op == Op::Pack && eq.args.empty())
        throw domain_error("pack: needs at least one argument", static_cast<long>(self));
    for (std::size_t a : eq.args)
        if (a >= self)
            throw domain_error("argument v" + std::to_string(a) + " is not defined yet",
                               static_cast<long>(self));
    switch (eq.fn.op) {
        case Op::Add:
        case Op::Mul:
            if (shapes[eq.args[0]] != shapes[eq.args[1]])
                throw domain_error(std::string(op_name(eq.fn.op)) + ": shape mismatch " +
                                       shape_str(shapes[eq.args[0]]) + " vs " +
                                       shape_str(shapes[eq.args[1]]),
                                   static_cast<long>(self));
            return shapes[eq.args[0]];
        case Op::Bilinear: {
            if (!eq.fn.bilinear)
                throw domain_error("bilinear equation without a descriptor",
                                   static_cast<long>(self));
            const BilinearOp& b = *eq.fn.bilinear;
            if (shapes[eq.args[0]] != b.lhs || shapes[eq.args[1]] != b.rhs)
                throw domain_error("bilinear: argument shapes " + shape_str(shapes[eq.args[0]]) +
                                       ", " + shape_str(shapes[eq.args[1]]) +
                                       " do not match the descriptor " + shape_str(b.lhs) + ", " +
                                       shape_str(b.rhs),
                                   static_cast<long>(self));
            return b.out;
        }
        case Op::Pack: {
            const Shape& s0 = shapes[eq.args[0]];
            for (std::size_t a : eq.args)
                if (shapes[a] != s0)
                    throw domain_error("pack: arguments must share one shape, got " +
                                           shape_str(shapes[a]) + " vs " + shape_str(s0),
                                       static_cast<long>(self));
            Shape out{eq.args.size()};
            out.insert(out.end(), s0.begin(), s0.end());
            check_rank(out);
            return out;
        }
        default: return shapes[eq.args[0]];  // elementwise unary
    }
}

}  // namespace detail

// Shapes of all variables, inputs first.  Throws if the graph is malformed
// (unordered arguments, arity or shape mismatch, missing descriptor).
inline std::vector<Shape> infer_shapes(const ExprGraph& g) {
    if (g.num_inputs == 0) throw domain_error("graph has no inputs");
    if (g.eqs.empty()) throw domain_error("graph has no equations");
    std::vector<Shape> shapes(g.num_inputs, Shape{});
    for (std::size_t j = 0; j < g.eqs.size(); ++j)
        shapes.push_back(detail::infer_one(shapes, g.eqs[j], g.num_inputs + j));
    return shapes;
}

inline void validate(const ExprGraph& g) { (void)infer_shapes(g); }

// Forward evaluation of every variable.  Inputs are scalar tensors.
inline std::vector<Tensor> evaluate_all(const ExprGraph& g, const std::vector<Tensor>& inputs) {
    std::vector<Shape> shapes = infer_shapes(g);
    if (inputs.size() != g.num_inputs)
        throw domain_error("expected " + std::to_string(g.num_inputs) + " inputs, got " +
                           std::to_string(inputs.size()));
    std::vector<Tensor> vals;
    vals.reserve(g.num_vars());
    for (std::size_t i = 0; i < g.num_inputs; ++i) {
        if (inputs[i].shape != shapes[i])
            throw domain_error("input " + std::to_string(i) + " must be a scalar");
        vals.push_back(inputs[i]);
    }
    for (std::size_t j = 0; j < g.eqs.size(); ++j) {
        const Equation& eq = g.eqs[j];
        long self = static_cast<long>(g.num_inputs + j);
        switch (eq.fn.op) {
            case Op::Add: vals.push_back(t_add(vals[eq.args[0]], vals[eq.args[1]])); break;
            case Op::Mul: vals.push_back(t_hadamard(vals[eq.args[0]], vals[eq.args[1]])); break;
            case Op::Bilinear:
                vals.push_back(apply(*eq.fn.bilinear, vals[eq.args[0]], vals[eq.args[1]]));
                break;
            case Op::Pack: {
                Tensor t(shapes[static_cast<std::size_t>(self)]);
                std::size_t block = vals[eq.args[0]].size();
                for (std::size_t a = 0; a < eq.args.size(); ++a)
                    for (std::size_t i = 0; i < block; ++i)
                        t.data[a * block + i] = vals[eq.args[a]].data[i];
                vals.push_back(std::move(t));
                break;
            }
            default: {
                const Tensor& a = vals[eq.args[0]];
                Tensor t(a.shape);
                for (std::size_t i = 0; i < a.size(); ++i)
                    t.data[i] = apply_unary(eq.fn, a.data[i], self);
                vals.push_back(std::move(t));
                break;
            }
        }
    }
    return vals;
}

inline double evaluate(const ExprGraph& g, const std::vector<double>& x) {
    std::vector<Tensor> inputs;
    inputs.reserve(x.size());
    for (double v : x) inputs.push_back(scalar_tensor(v));
    Tensor out = evaluate_all(g, inputs).back();
    if (!out.shape.empty()) throw domain_error("graph output is not a scalar");
    return out.data[0];
}

// Programmatic construction for graphs the text grammar cannot express
// (tensor-valued variables, bilinear nodes).  Returned indices are the
// variable indices used as downstream args.
struct GraphBuilder {
    explicit GraphBuilder(std::size_t num_inputs)
        : d_(num_inputs), shapes_(num_inputs, Shape{}) {
        if (num_inputs == 0) throw domain_error("graph needs at least one input");
    }

    std::size_t input(std::size_t i) const {
        if (i >= d_) throw domain_error("input index " + std::to_string(i) + " out of range");
        return i;
    }

    std::size_t apply(const AtomicFn& fn, std::vector<std::size_t> args) {
        Equation eq{fn, std::move(args)};
        shapes_.push_back(detail::infer_one(shapes_, eq, shapes_.size()));
        eqs_.push_back(std::move(eq));
        return shapes_.size() - 1;
    }

    std::size_t pack(std::vector<std::size_t> vars) {
        return apply(AtomicFn::make(Op::Pack), std::move(vars));
    }

    const Shape& shape(std::size_t var) const { return shapes_.at(var); }

    ExprGraph finish() const {
        ExprGraph g{d_, eqs_};
        validate(g);
        return g;
    }

  private:
    std::size_t d_;
    std::vector<Shape> shapes_;
    std::vector<Equation> eqs_;
};

namespace detail {

struct Token {
    enum Kind { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };
    Kind kind;
    double num = 0.0;
    std::string text;
    std::size_t pos = 0;
};

inline std::vector<Token> tokenize(const std::string& s) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
            const char* begin = s.c_str() + i;
            char* end = nullptr;
            double v = std::strtod(begin, &end);
            if (end == begin) throw parse_error("malformed number", i);
            if (!std::isfinite(v)) throw parse_error("numeric literal overflows", i);
            out.push_back(Token{Token::Number, v, "", i});
            i += static_cast<std::size_t>(end - begin);
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_'))
                ++j;
            out.push_back(Token{Token::Ident, 0.0, s.substr(i, j - i), i});
            i = j;
            continue;
        }
        Token::Kind k;
        switch (c) {
            case '+': k = Token::Plus; break;
            case '-': k = Token::Minus; break;
            case '*': k = Token::Star; break;
            case '/': k = Token::Slash; break;
            case '^': k = Token::Caret; break;
            case '(': k = Token::LParen; break;
            case ')': k = Token::RParen; break;
            default: throw parse_error(std::string("unexpected character '") + c + "'", i);
        }
        out.push_back(Token{k, 0.0, "", i});
        ++i;
    }
    out.push_back(Token{Token::End, 0.0, "", s.size()});
    return out;
}

// Variable index for "x" (0) or "xN" (N); -1 if the name is not a variable.
inline long var_index(const std::string& name) {
    if (name.empty() || name[0] != 'x') return -1;
    if (name.size() == 1) return 0;
    for (std::size_t i = 1; i < name.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(name[i]))) return -1;
    long v = std::strtol(name.c_str() + 1, nullptr, 10);
    if (v < 0 || v > 1024) return -1;
    return v;
}

// A partially-built operand: either a folded literal or a graph variable.
struct ParseValue {
    bool is_const = false;
    double c = 0.0;
    std::size_t var = 0;
};

struct Parser {
    const std::vector<Token>& toks;
    std::size_t d;
    std::size_t i = 0;
    std::vector<Equation> eqs;

    const Token& peek() const { return toks[i]; }
    Token next() { return toks[i++]; }

    std::size_t emit(const AtomicFn& fn, std::vector<std::size_t> args) {
        eqs.push_back(Equation{fn, std::move(args)});
        return d + eqs.size() - 1;
    }

    static ParseValue constant(double c) { return ParseValue{true, c, 0}; }
    static ParseValue variable(std::size_t v) { return ParseValue{false, 0.0, v}; }

    ParseValue negate_value(const ParseValue& v) {
        if (v.is_const) return constant(-v.c);
        return variable(emit(AtomicFn::make(Op::Negate), {v.var}));
    }

    ParseValue add_values(const ParseValue& a, const ParseValue& b) {
        if (a.is_const && b.is_const) return constant(a.c + b.c);
        if (a.is_const) return variable(emit(AtomicFn::add_const(a.c), {b.var}));
        if (b.is_const) return variable(emit(AtomicFn::add_const(b.c), {a.var}));
        return variable(emit(AtomicFn::make(Op::Add), {a.var, b.var}));
    }

    ParseValue mul_values(const ParseValue& a, const ParseValue& b) {
        if (a.is_const && b.is_const) return constant(a.c * b.c);
        if (a.is_const) return variable(emit(AtomicFn::mul_const(a.c), {b.var}));
        if (b.is_const) return variable(emit(AtomicFn::mul_const(b.c), {a.var}));
        return variable(emit(AtomicFn::make(Op::Mul), {a.var, b.var}));
    }

    ParseValue div_values(const ParseValue& a, const ParseValue& b, std::size_t pos) {
        if (b.is_const) {
            if (b.c == 0.0) throw parse_error("division by constant zero", pos);
            return mul_values(a, constant(1.0 / b.c));
        }
        std::size_t r = emit(AtomicFn::make(Op::Reciprocal), {b.var});
        return mul_values(a, variable(r));
    }

    ParseValue apply_fn(const AtomicFn& fn, const ParseValue& v, std::size_t pos) {
        if (v.is_const) {
            try {
                return constant(apply_unary(fn, v.c));
            } catch (const domain_error& e) {
                throw parse_error(e.what(), pos);
            }
        }
        return variable(emit(fn, {v.var}));
    }

    ParseValue parse_expr() {
        bool neg = false;
        if (peek().kind == Token::Minus) {
            next();
            neg = true;
        }
        ParseValue v = parse_term();
        if (neg) v = negate_value(v);
        while (peek().kind == Token::Plus || peek().kind == Token::Minus) {
            bool minus = next().kind == Token::Minus;
            ParseValue rhs = parse_term();
            // NOTE: a - b is a + negate(b).
            v = add_values(v, minus ? negate_value(rhs) : rhs);
        }
        return v;
    }

    ParseValue parse_term() {
        ParseValue v = parse_factor();
        while (peek().kind == Token::Star || peek().kind == Token::Slash) {
            Token op = next();
            ParseValue rhs = parse_factor();
            v = op.kind == Token::Star ? mul_values(v, rhs) : div_values(v, rhs, op.pos);
        }
        return v;
    }

    ParseValue parse_factor() {
        ParseValue base = parse_base();
        if (peek().kind != Token::Caret) return base;
        std::size_t caret = next().pos;
        double sign = 1.0;
        if (peek().kind == Token::Minus) {
            next();
            sign = -1.0;
        }
        if (peek().kind != Token::Number)
            throw parse_error("exponent must be a numeric constant", peek().pos);
        double p = sign * next().num;
        return apply_fn(AtomicFn::pow_const(p), base, caret);
    }

    ParseValue parse_base() {
        Token t = next();
        switch (t.kind) {
            case Token::Number: return constant(t.num);
            case Token::LParen: {
                ParseValue v = parse_expr();
                if (peek().kind != Token::RParen) throw parse_error("expected ')'", peek().pos);
                next();
                return v;
            }
            case Token::Ident: {
                long vi = var_index(t.text);
                if (vi >= 0) return variable(static_cast<std::size_t>(vi));
                AtomicFn fn = AtomicFn::make(Op::Exp);
                if (t.text == "exp")
                    fn = AtomicFn::make(Op::Exp);
                else if (t.text == "log")
                    fn = AtomicFn::make(Op::Log);
                else if (t.text == "sqrt")
                    fn = AtomicFn::pow_const(0.5);
                else if (t.text == "softplus")
                    fn = AtomicFn::make(Op::Softplus);
                else if (t.text == "relu")
                    throw parse_error("unsupported function 'relu'", t.pos);
                else
                    throw parse_error("unknown identifier '" + t.text + "'", t.pos);
                if (peek().kind != Token::LParen) throw parse_error("expected '('", peek().pos);
                next();
                ParseValue arg = parse_expr();
                if (peek().kind != Token::RParen) throw parse_error("expected ')'", peek().pos);
                next();
                return apply_fn(fn, arg, t.pos);
            }
            default: throw parse_error("unexpected token", t.pos);
        }
    }
};

}  // namespace detail

// Grammar:
//   expr   := ['-'] term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := base ('^' ['-'] number)?
//   base   := number | var | func '(' expr ')' | '(' expr ')'
// with vars `x` (an alias for x0) or `x0..x{d-1}` (d inferred from the highest
// index used) and funcs exp/log/sqrt/softplus.  Lowerings: a-b -> a+negate(b),
// a/b -> a*reciprocal(b), sqrt -> pow_const(0.5); literal-only subexpressions
// fold into add_const/mul_const.
inline ExprGraph parse(const std::string& text) {
    std::vector<detail::Token> toks = detail::tokenize(text);
    std::size_t d = 1;
    for (const detail::Token& t : toks)
        if (t.kind == detail::Token::Ident) {
            long vi = detail::var_index(t.text);
            if (vi >= 0 && static_cast<std::size_t>(vi) + 1 > d)
                d = static_cast<std::size_t>(vi) + 1;
        }
    detail::Parser p{toks, d};
    detail::ParseValue v = p.parse_expr();
    if (p.peek().kind != detail::Token::End)
        throw parse_error("unexpected trailing input", p.peek().pos);
    if (v.is_const) {
        // NOTE: a literal-only expression becomes f(x) = 0*x0 + c, which every
        // extension rule treats exactly.
        std::size_t z = p.emit(AtomicFn::mul_const(0.0), {0});
        p.emit(AtomicFn::add_const(v.c), {z});
    } else if (v.var < d) {
        p.emit(AtomicFn::add_const(0.0), {v.var});  // bare variable: identity equation
    }
    ExprGraph g{d, std::move(p.eqs)};
    validate(g);
    return g;
}

}  // namespace autobound
