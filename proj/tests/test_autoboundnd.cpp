#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <autobound/autobound1d.hpp>
#include <autobound/autoboundnd.hpp>

using namespace autobound;

namespace {

std::mt19937 rng(1613);

double rnd(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

TensorInterval box(const std::vector<Interval>& entries) {
    TensorInterval t = ti_zeros(Shape{entries.size()});
    for (std::size_t i = 0; i < entries.size(); ++i) t.set(i, entries[i]);
    return t;
}

Tensor vec(const std::vector<double>& v) { return Tensor(Shape{v.size()}, v); }

bool iv_close(const Interval& a, const Interval& b, double tol) {
    double scale = std::max({1.0, std::abs(b.lo), std::abs(b.hi)});
    return std::abs(a.lo - b.lo) <= tol * scale && std::abs(a.hi - b.hi) <= tol * scale;
}

bool contains_with_slack(const TensorInterval& boxv, const Tensor& x, double tol) {
    for (std::size_t i = 0; i < boxv.size(); ++i) {
        double slack = tol * std::max(1.0, std::abs(x.data[i]));
        if (x.data[i] < boxv.lo.data[i] - slack || x.data[i] > boxv.hi.data[i] + slack)
            return false;
    }
    return true;
}

struct CorpusCase {
    const char* text;
    double x0;
    Interval trust;
};

const CorpusCase kCorpus[] = {
    {"exp(x)", 0.3, Interval(-1, 1)},
    {"log(2 + x)", 0.3, Interval(-1, 1)},
    {"1/(2 + x)", 0.3, Interval(-1, 1)},
    {"softplus(x)*x", 0.5, Interval(-1, 1)},
    {"exp(x)/(2 + x)", 0.3, Interval(-1, 1)},
    {"x^3 - 2*x + 1", 0.2, Interval(-1, 1)},
    {"(4 + x*x)^0.5", 0.5, Interval(-1, 1)},
    {"exp(x^2)", 0.2, Interval(-0.5, 0.5)},
    {"x*exp(x) + 1/(1 + x)", 0.0, Interval(-0.5, 0.5)},
    {"softplus(2*x + 1)", -0.2, Interval(-1, 1)},
    {"x^-2 + log(x)", 1.5, Interval(1, 3)},
    {"2.5*x^2.5 - x", 1.0, Interval(0.5, 2)},
};

}  // namespace

TEST_CASE("one-input graphs agree with the scalar pipeline") {
    for (const CorpusCase& c : kCorpus) {
        ExprGraph g = parse(c.text);
        for (std::size_t k = 1; k <= 3; ++k) {
            for (Rounding r : {Rounding::fast, Rounding::outward}) {
                TaylorEnclosure1D one = autobound_1d(g, c.x0, c.trust, k, r);
                TaylorEnclosureND nd =
                    autobound_nd(g, vec({c.x0}), box({c.trust}), k, std::nullopt, r);
                REQUIRE(nd.poly.coeffs.size() == k + 1);
                for (std::size_t j = 0; j <= k; ++j) {
                    REQUIRE(nd.poly.coeffs[j].size() == 1);
                    INFO(c.text << " k=" << k << " coeff " << j);
                    CHECK(iv_close(nd.poly.coeffs[j].at(0), one.poly.coeffs[j], 1e-12));
                }
            }
        }
    }
}

TEST_CASE("dot square of the input vector is the exact quadratic") {
    GraphBuilder gb(2);
    std::size_t v = gb.pack({gb.input(0), gb.input(1)});
    gb.apply(AtomicFn::make_bilinear(BilinearOp::make_dot(2)), {v, v});
    ExprGraph g = gb.finish();

    TaylorEnclosureND enc =
        autobound_nd(g, vec({0.0, 0.0}), box({Interval(-1, 1), Interval(-1, 1)}), 2);
    REQUIRE(enc.poly.out_shape == Shape{});
    REQUIRE(enc.poly.coeffs.size() == 3);
    CHECK(enc.poly.coeffs[0].at(0).lo == 0.0);
    CHECK(enc.poly.coeffs[0].at(0).hi == 0.0);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(enc.poly.coeffs[1].at(i).lo == 0.0);
        CHECK(enc.poly.coeffs[1].at(i).hi == 0.0);
    }
    for (std::size_t m1 = 0; m1 < 2; ++m1)
        for (std::size_t m2 = 0; m2 < 2; ++m2) {
            double want = m1 == m2 ? 1.0 : 0.0;
            Interval got = enc.poly.coeffs[2].at(m1 * 2 + m2);
            CHECK(got.lo == want);
            CHECK(got.hi == want);
        }

    Interval range = enclosure_range_nd(enc).at(0);
    CHECK(range.lo == 0.0);
    CHECK(range.hi == 2.0);
}

TEST_CASE("product exponential is enclosed over the trust box") {
    GraphBuilder gb(2);
    std::size_t m = gb.apply(AtomicFn::make(Op::Mul), {gb.input(0), gb.input(1)});
    gb.apply(AtomicFn::make(Op::Exp), {m});
    ExprGraph g = gb.finish();

    Tensor x0 = vec({0.2, -0.1});
    TensorInterval trust = box({Interval(-0.3, 0.7), Interval(-0.6, 0.4)});
    for (std::size_t k : {std::size_t{1}, std::size_t{2}}) {
        TaylorEnclosureND enc = autobound_nd(g, x0, trust, k);
        for (std::size_t j = 0; j < k; ++j) CHECK(ti_degenerate(enc.poly.coeffs[j]));
        CHECK(enc.poly.coeffs[0].at(0).lo ==
              Catch::Approx(std::exp(0.2 * -0.1)).margin(1e-12));
        for (int sx = 0; sx <= 20; ++sx)
            for (int sy = 0; sy <= 20; ++sy) {
                double x = trust.at(0).lo + (trust.at(0).hi - trust.at(0).lo) * sx / 20.0;
                double y = trust.at(1).lo + (trust.at(1).hi - trust.at(1).lo) * sy / 20.0;
                Tensor p = vec({x, y});
                CHECK(contains_with_slack(enclosure_eval_nd(enc, p),
                                          scalar_tensor(std::exp(x * y)), 1e-9));
            }
    }
}

TEST_CASE("matmul square stays sound under every strategy") {
    GraphBuilder gb(2);
    std::size_t row0 = gb.pack({gb.input(0), gb.input(1)});
    std::size_t row1 = gb.pack({gb.input(1), gb.input(0)});
    std::size_t mat = gb.pack({row0, row1});
    gb.apply(AtomicFn::make_bilinear(BilinearOp::make_matmul(2, 2, 2)), {mat, mat});
    ExprGraph g = gb.finish();

    Tensor x0 = vec({0.5, -0.25});
    TensorInterval trust = box({Interval(0.1, 0.9), Interval(-0.75, 0.25)});
    for (BilinearStrategy s : {BilinearStrategy::naive, BilinearStrategy::midpoint_radius,
                               BilinearStrategy::signsplit}) {
        TaylorEnclosureND enc = autobound_nd(g, x0, trust, 2, s);
        CHECK(ti_degenerate(enc.poly.coeffs[0]));
        CHECK(ti_degenerate(enc.poly.coeffs[1]));
        for (int t = 0; t < 150; ++t) {
            double x = rnd(trust.at(0).lo, trust.at(0).hi);
            double y = rnd(trust.at(1).lo, trust.at(1).hi);
            Tensor out = evaluate_all(g, {scalar_tensor(x), scalar_tensor(y)}).back();
            CHECK(contains_with_slack(enclosure_eval_nd(enc, vec({x, y})), out, 1e-9));
        }
    }
}

TEST_CASE("mixed-sign general bilinear defaults to the sign-split rule") {
    Tensor w(Shape{2, 2}, {1.0, -2.0, 0.5, -0.25});  // scalar out, W[y][x]
    BilinearOp op = BilinearOp::make_general(w, Shape{2}, Shape{2});
    REQUIRE(!op.nonnegative_w());

    GraphBuilder gb(2);
    std::size_t v = gb.pack({gb.input(0), gb.input(1)});
    gb.apply(AtomicFn::make_bilinear(op), {v, v});
    ExprGraph g = gb.finish();

    Tensor x0 = vec({0.0, 0.0});
    TensorInterval trust = box({Interval(-1, 1), Interval(-1, 1)});
    TaylorEnclosureND enc = autobound_nd(g, x0, trust, 2);
    for (int t = 0; t < 200; ++t) {
        double x = rnd(-1, 1), y = rnd(-1, 1);
        Tensor out = evaluate_all(g, {scalar_tensor(x), scalar_tensor(y)}).back();
        CHECK(contains_with_slack(enclosure_eval_nd(enc, vec({x, y})), out, 1e-9));
    }
    CHECK_THROWS_AS(autobound_nd(g, x0, trust, 2, BilinearStrategy::midpoint_radius),
                    domain_error);
}

TEST_CASE("master containment across random small graphs") {
    for (int trial = 0; trial < 50; ++trial) {
        std::size_t d = 1 + trial % 3;
        std::size_t k = 1 + trial % 2;
        GraphBuilder gb(d);
        std::vector<std::size_t> pool;
        for (std::size_t i = 0; i < d; ++i) pool.push_back(gb.input(i));
        std::size_t steps = 3 + static_cast<std::size_t>(trial) % 4;
        for (std::size_t s = 0; s < steps; ++s) {
            std::size_t a = pool[static_cast<std::size_t>(rng()) % pool.size()];
            std::size_t b = pool[static_cast<std::size_t>(rng()) % pool.size()];
            std::size_t v = 0;
            switch (rng() % 9) {
                case 0: v = gb.apply(AtomicFn::add_const(rnd(-1, 1)), {a}); break;
                case 1: v = gb.apply(AtomicFn::mul_const(rnd(-1.5, 1.5)), {a}); break;
                case 2: v = gb.apply(AtomicFn::make(Op::Negate), {a}); break;
                case 3: v = gb.apply(AtomicFn::make(Op::Add), {a, b}); break;
                case 4: v = gb.apply(AtomicFn::make(Op::Mul), {a, b}); break;
                case 5: v = gb.apply(AtomicFn::pow_const(2.0), {a}); break;
                case 6: v = gb.apply(AtomicFn::make(Op::Exp), {a}); break;
                case 7: v = gb.apply(AtomicFn::make(Op::Softplus), {a}); break;
                default: {
                    // log and reciprocal behind a positivity shield
                    std::size_t sp = gb.apply(AtomicFn::make(Op::Softplus), {a});
                    std::size_t pos = gb.apply(AtomicFn::add_const(0.5), {sp});
                    v = gb.apply(AtomicFn::make(rng() % 2 ? Op::Log : Op::Reciprocal), {pos});
                    break;
                }
            }
            pool.push_back(v);
        }
        ExprGraph g = gb.finish();

        std::vector<double> x0v;
        std::vector<Interval> trustv;
        for (std::size_t i = 0; i < d; ++i) {
            double c = rnd(-0.8, 0.8), rad = rnd(0.1, 0.5);
            x0v.push_back(c);
            trustv.push_back(Interval(c - rad, c + rad));
        }
        TaylorEnclosureND enc = autobound_nd(g, vec(x0v), box(trustv), k);

        for (int s = 0; s < 100; ++s) {
            std::vector<double> xs;
            for (std::size_t i = 0; i < d; ++i) xs.push_back(rnd(trustv[i].lo, trustv[i].hi));
            double val = evaluate(g, xs);
            Interval at = enclosure_eval_nd(enc, vec(xs)).at(0);
            // Rounding inside the evaluations is relative to intermediate
            // magnitudes, so scale the slack by the endpoints too.
            double scale = std::max({1.0, std::abs(val), std::abs(at.lo), std::abs(at.hi)});
            double slack = 1e-9 * scale;
            INFO("trial " << trial << " d=" << d << " k=" << k);
            CHECK(at.lo - slack <= val);
            CHECK(val <= at.hi + slack);
        }
    }
}

TEST_CASE("degenerate trust box gives pure point coefficients") {
    GraphBuilder gb(2);
    std::size_t m = gb.apply(AtomicFn::make(Op::Mul), {gb.input(0), gb.input(1)});
    gb.apply(AtomicFn::make(Op::Exp), {m});
    ExprGraph g = gb.finish();

    Tensor x0 = vec({0.4, 0.3});
    TaylorEnclosureND enc = autobound_nd(g, x0, TensorInterval(x0), 2);
    double f = std::exp(0.4 * 0.3);
    CHECK(enc.poly.coeffs[0].at(0).lo == Catch::Approx(f).margin(1e-13));
    // gradient of exp(x*y): (y, x) * f
    CHECK(enc.poly.coeffs[1].at(0).lo == Catch::Approx(0.3 * f).margin(1e-13));
    CHECK(enc.poly.coeffs[1].at(1).lo == Catch::Approx(0.4 * f).margin(1e-13));
    for (const TensorInterval& c : enc.poly.coeffs) CHECK(ti_degenerate(c));
}

TEST_CASE("domain violations carry the equation index") {
    GraphBuilder gb(2);
    std::size_t m = gb.apply(AtomicFn::make(Op::Mul), {gb.input(0), gb.input(1)});
    gb.apply(AtomicFn::make(Op::Log), {m});
    ExprGraph g = gb.finish();

    Tensor x0 = vec({0.5, 0.5});
    TensorInterval trust = box({Interval(-1, 1), Interval(-1, 1)});
    try {
        autobound_nd(g, x0, trust, 2);
        FAIL("expected a domain error");
    } catch (const domain_error& e) {
        CHECK(e.equation == 3);
        CHECK(std::string(e.what()).find("equation 3") != std::string::npos);
    }
}

TEST_CASE("input validation") {
    ExprGraph g = parse("exp(x)");
    CHECK_THROWS_AS(autobound_nd(g, vec({0.0}), box({Interval(-1, 1)}), 0), domain_error);
    CHECK_THROWS_AS(autobound_nd(g, vec({2.0}), box({Interval(-1, 1)}), 2), domain_error);
    CHECK_THROWS_AS(autobound_nd(g, vec({0.0, 0.0}), box({Interval(-1, 1)}), 2), domain_error);
    CHECK_THROWS_AS(
        autobound_nd(g, vec({0.0}), box({Interval(0, std::numeric_limits<double>::infinity())}),
                     2),
        domain_error);
}

TEST_CASE("joint degree and dimension cap is a clean resource error") {
    std::size_t d = 40;
    GraphBuilder gb(d);
    std::vector<std::size_t> all;
    for (std::size_t i = 0; i < d; ++i) all.push_back(gb.input(i));
    std::size_t v = gb.pack(all);
    std::size_t dot = gb.apply(AtomicFn::make_bilinear(BilinearOp::make_dot(d)), {v, v});
    gb.apply(AtomicFn::make(Op::Mul), {dot, dot});
    ExprGraph g = gb.finish();

    std::vector<double> x0v(d, 0.0);
    std::vector<Interval> trustv(d, Interval(-1, 1));
    CHECK_THROWS_AS(autobound_nd(g, vec(x0v), box(trustv), 2), resource_error);
}
