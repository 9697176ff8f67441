#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>
#include <vector>

#include <autobound/apps.hpp>

using namespace autobound;

namespace {

TaylorEnclosure1D quad_enc(double c0, double c1, Interval c2, double x0, Interval trust) {
    TaylorEnclosure1D enc;
    enc.x0 = x0;
    enc.trust = trust;
    enc.poly.coeffs = {Interval(c0), Interval(c1), c2};
    return enc;
}

double grid_min(const ExprGraph& g, const Interval& trust, int points) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= points; ++i) {
        const double x =
            trust.lo + (trust.hi - trust.lo) * static_cast<double>(i) / static_cast<double>(points);
        best = std::min(best, evaluate(g, {x}));
    }
    return best;
}

}  // namespace

TEST_CASE("quadratic bound extrema pick the vertex exactly when it is interior") {
    const Interval unit(-1.0, 1.0);

    QuadExtremum q = quad_bound_extrema(quad_enc(0, 0, Interval(1, 2), 0.0, unit), QuadBound::lower);
    CHECK(q.arg == 0.0);
    CHECK(q.value == 0.0);

    q = quad_bound_extrema(quad_enc(0, 1, Interval(1, 1), 0.0, unit), QuadBound::lower);
    CHECK(q.arg == -0.5);
    CHECK(q.value == -0.25);

    // NOTE: zero curvature degrades to the linear endpoint case.
    q = quad_bound_extrema(quad_enc(0, 1, Interval(0, 0), 0.0, unit), QuadBound::lower);
    CHECK(q.arg == -1.0);
    CHECK(q.value == -1.0);

    // NOTE: the upper bound function uses the high end of the coefficient.
    q = quad_bound_extrema(quad_enc(0, 1, Interval(1, 2), 0.0, unit), QuadBound::upper);
    CHECK(q.arg == -0.25);
    CHECK(q.value == Catch::Approx(-0.125).margin(1e-15));

    // NOTE: args come back in x coordinates.
    q = quad_bound_extrema(quad_enc(0, 1, Interval(1, 1), 0.5, Interval(-0.5, 1.5)),
                           QuadBound::lower);
    CHECK(q.arg == 0.0);
    CHECK(q.value == -0.25);

    // NOTE: a concave bound attains its minimum at an endpoint.
    q = quad_bound_extrema(quad_enc(0, 0, Interval(-1, -1), 0.0, unit), QuadBound::lower);
    CHECK(q.arg == -1.0);
    CHECK(q.value == -1.0);

    const ExprGraph g = parse("exp(x)");
    CHECK_THROWS_AS(quad_bound_extrema(autobound_1d(g, 0.0, unit, 1), QuadBound::lower),
                    domain_error);
    CHECK_THROWS_AS(quad_bound_extrema(autobound_1d(g, 0.0, unit, 3), QuadBound::lower),
                    domain_error);
}

TEST_CASE("branch and bound finds the cubic's boundary minimum") {
    const ExprGraph g = parse("2*(x - 1)^2 + (x - 1)^3");
    const BnBResult res = branch_and_bound(g, Interval(-2.0, 2.0), 1e-9, 1000);

    CHECK(res.converged);
    CHECK(res.steps <= 50);
    CHECK(res.xbest == Catch::Approx(-2.0).margin(1e-9));
    CHECK(res.fbest == Catch::Approx(-9.0).margin(1e-9));
    CHECK(res.fbest - res.lower_bound <= 1e-9);
    REQUIRE(res.trace.size() == static_cast<std::size_t>(res.steps));
    for (const BnBStep& row : res.trace) {
        CHECK(row.lb <= -9.0 + 1e-12);  // NOTE: true minimum is exactly -9.
        CHECK(row.ub >= -9.0 - 1e-12);
        CHECK(row.lb <= row.ub);
    }
}

TEST_CASE("branch and bound localizes a smooth interior minimum") {
    const ExprGraph g = parse("(x - 0.3)^2");
    const BnBResult res = branch_and_bound(g, Interval(-1.0, 1.0), 1e-9, 1000);

    CHECK(res.converged);
    CHECK(std::abs(res.xbest - 0.3) <= 1e-4);
    CHECK(res.fbest >= -1e-12);
    CHECK(res.fbest <= 1e-9);
    CHECK(res.fbest - res.lower_bound <= 1e-9);
}

TEST_CASE("branch and bound handles monotone objectives") {
    const ExprGraph g = parse("exp(x)");
    for (Rounding r : {Rounding::fast, Rounding::outward}) {
        const BnBResult res = branch_and_bound(g, Interval(0.0, 1.0), 1e-9, 1000, r);
        CHECK(res.converged);
        CHECK(std::abs(res.xbest) <= 1e-6);
        CHECK(std::abs(res.fbest - 1.0) <= 1e-6);
        CHECK(res.fbest - res.lower_bound <= 1e-9);
    }
}

TEST_CASE("branch and bound reports best-so-far when the step budget is too small") {
    const ExprGraph g = parse("2*(x - 1)^2 + (x - 1)^3");
    const BnBResult res = branch_and_bound(g, Interval(-2.0, 2.0), 1e-12, 2);

    CHECK_FALSE(res.converged);
    CHECK(res.steps == 2);
    CHECK(res.trace.size() == 2);
    CHECK(res.lower_bound <= -9.0 + 1e-12);
    CHECK(res.fbest >= -9.0 - 1e-12);
    CHECK(res.lower_bound <= res.fbest);

    CHECK_THROWS_AS(branch_and_bound(g, Interval(-2.0, 2.0), 0.0, 10), domain_error);
    CHECK_THROWS_AS(branch_and_bound(g, Interval(-2.0, 2.0), 1e-9, 0), domain_error);
    CHECK_THROWS_AS(branch_and_bound(g, Interval(1.0, 1.0), 1e-9, 10), domain_error);
}

TEST_CASE("branch and bound is sandwiched by a grid oracle") {
    struct Case {
        std::string text;
        Interval trust;
    };
    const std::vector<Case> cases = {
        {"2*(x - 1)^2 + (x - 1)^3", Interval(-2.0, 2.0)},
        {"(x - 0.3)^2", Interval(-1.0, 1.0)},
        {"exp(x)", Interval(0.0, 1.0)},
        {"softplus(x)*x", Interval(-1.0, 1.0)},
        {"exp(x)/(2+x)", Interval(-1.0, 1.0)},
        {"x*exp(x) + 1/(1+x)", Interval(-0.5, 0.5)},
    };
    for (const Case& c : cases) {
        INFO(c.text);
        const ExprGraph g = parse(c.text);
        const double oracle = grid_min(g, c.trust, 100000);
        const BnBResult res = branch_and_bound(g, c.trust, 1e-7, 2000);
        CHECK(res.converged);
        for (const BnBStep& row : res.trace) {
            // NOTE: the grid overshoots the true minimum by its resolution.
            CHECK(row.lb <= oracle + 1e-12);
            CHECK(row.ub >= oracle - 1e-3);
        }
    }
}

TEST_CASE("verified integration encloses the exponential integral and tightens with refinement") {
    const ExprGraph g = parse("exp(x)");
    const double truth = std::exp(1.0) - 1.0;

    double prev_width = std::numeric_limits<double>::infinity();
    for (int n : {1, 2, 4, 8, 16, 32, 64, 128, 256}) {
        const Interval iv = integrate_enclosure(g, 0.0, 1.0, n, 2);
        CHECK(contains(iv, truth));
        CHECK(width(iv) < prev_width);
        prev_width = width(iv);
    }
    CHECK(prev_width < 1e-6);

    // NOTE: other degrees exercise the odd-power split of the remainder term.
    for (std::size_t k : {1u, 3u, 4u})
        for (int n : {4, 16}) CHECK(contains(integrate_enclosure(g, 0.0, 1.0, n, k), truth));

    const ExprGraph g2 = parse("x*exp(x) + 1/(1+x)");
    const double truth2 = 1.0 + std::log(2.0);
    for (std::size_t k : {2u, 3u})
        for (int n : {4, 16}) CHECK(contains(integrate_enclosure(g2, 0.0, 1.0, n, k), truth2));
}

TEST_CASE("integrating a constant gives the exact point interval") {
    const ExprGraph g = parse("0*x + 2.5");
    for (int n : {1, 2, 4, 8}) {
        const Interval iv = integrate_enclosure(g, 0.0, 1.0, n, 2);
        CHECK(iv.lo == 2.5);
        CHECK(iv.hi == 2.5);
    }
    for (int n : {3, 5, 7}) {
        const Interval iv = integrate_enclosure(g, 0.0, 1.0, n, 2);
        CHECK(iv.lo == iv.hi);
        CHECK(iv.lo == Catch::Approx(2.5).margin(1e-14));
    }
}

TEST_CASE("integration validates its inputs and surfaces domain violations") {
    const ExprGraph g = parse("exp(x)");
    CHECK_THROWS_AS(integrate_enclosure(g, 1.0, 0.0, 4, 2), domain_error);
    CHECK_THROWS_AS(integrate_enclosure(g, 0.0, 0.0, 4, 2), domain_error);
    CHECK_THROWS_AS(integrate_enclosure(g, 0.0, 1.0, 0, 2), domain_error);
    CHECK_THROWS_AS(integrate_enclosure(parse("log(x)"), -1.0, 1.0, 4, 2), domain_error);
}

TEST_CASE("jensen gap for the exponential matches the sharp variance product") {
    const ExprGraph g = parse("exp(x)");
    const Distribution u = uniform_distribution(-1.0, 1.0);

    const Interval gap2 = jensen_bounds(g, u, 2);
    CHECK(gap2.lo == Catch::Approx(std::exp(-1.0) / 3.0).margin(1e-9));
    CHECK(gap2.hi == Catch::Approx((std::exp(1.0) - 2.0) / 3.0).margin(1e-9));

    const double truth = 0.5 * (std::exp(1.0) - std::exp(-1.0)) - 1.0;
    double prev_width = std::numeric_limits<double>::infinity();
    for (std::size_t k = 2; k <= 8; ++k) {
        const Interval gap = jensen_bounds(g, u, k);
        CHECK(contains(gap, truth));
        CHECK(width(gap) < prev_width);
        prev_width = width(gap);
    }
}

TEST_CASE("jensen gap of an affine function is the exact zero interval") {
    const ExprGraph g = parse("2*x + 1");
    const Interval a = jensen_bounds(g, uniform_distribution(-1.0, 1.0), 2);
    CHECK(a.lo == 0.0);
    CHECK(a.hi == 0.0);

    const Interval b = jensen_bounds(g, discrete_distribution({-1.0, 1.0}, {0.5, 0.5}), 2);
    CHECK(b.lo == 0.0);
    CHECK(b.hi == 0.0);
}

TEST_CASE("jensen bounds cover a skewed discrete distribution") {
    const ExprGraph g = parse("exp(x)");
    const Distribution d = discrete_distribution({-1.0, 0.0, 2.0}, {0.25, 0.5, 0.25});
    const double mu = 0.25;
    const double truth =
        0.25 * std::exp(-1.0) + 0.5 + 0.25 * std::exp(2.0) - std::exp(mu);

    std::vector<double> widths;
    for (std::size_t k : {2u, 3u, 4u, 5u}) {
        const Interval gap = jensen_bounds(g, d, k);
        CHECK(contains(gap, truth));
        widths.push_back(width(gap));
    }
    CHECK(widths.back() < widths.front());
}

TEST_CASE("jensen bounds validate the distribution and degree") {
    const ExprGraph g = parse("exp(x)");
    CHECK_THROWS_AS(jensen_bounds(g, uniform_distribution(-1.0, 1.0), 1), domain_error);
    CHECK_THROWS_AS(uniform_distribution(1.0, 1.0), domain_error);
    CHECK_THROWS_AS(uniform_distribution(0.0, std::numeric_limits<double>::infinity()),
                    domain_error);
    CHECK_THROWS_AS(discrete_distribution({0.0, 1.0}, {0.5, 0.6}), domain_error);
    CHECK_THROWS_AS(discrete_distribution({0.0, 1.0}, {-0.5, 1.5}), domain_error);
    CHECK_THROWS_AS(discrete_distribution({}, {}), domain_error);
    CHECK_THROWS_AS(discrete_distribution({0.0, 1.0}, {1.0}), domain_error);

    // NOTE: a point mass has no spread, so the gap is identically zero.
    const Interval point = jensen_bounds(g, discrete_distribution({0.7}, {1.0}), 3);
    CHECK(point.lo == 0.0);
    CHECK(point.hi == 0.0);
}

TEST_CASE("mm stepping solves an exact quadratic in one step") {
    const ExprGraph g = parse("(x - 1)^2");
    const MMTrace tr = mm_minimize(g, 0.0, 2.0, 3);

    REQUIRE(tr.iterates.size() == 4);
    CHECK(tr.iterates[0].x == 0.0);
    CHECK(tr.iterates[0].f == 1.0);
    for (std::size_t t = 1; t < tr.iterates.size(); ++t) {
        CHECK(tr.iterates[t].x == 1.0);
        CHECK(tr.iterates[t].f == 0.0);
    }
}

TEST_CASE("mm stepping descends a nonconvex function to its stationary point") {
    const ExprGraph g = parse("1.5*exp(3*x) - 25*x^2");
    const MMTrace tr = mm_minimize(g, 0.5, 0.5, 30);

    REQUIRE(tr.iterates.size() == 31);
    for (std::size_t t = 0; t + 1 < tr.iterates.size(); ++t)
        CHECK(tr.iterates[t + 1].f <= tr.iterates[t].f + 1e-12);
    // NOTE: the local minimum solves 4.5 exp(3x) = 50x.
    CHECK(tr.iterates.back().x == Catch::Approx(0.6682).margin(2e-3));

    // NOTE: each recorded majorizer really does dominate f over its window.
    for (std::size_t t = 0; t < 5; ++t) {
        const MMStep& s = tr.iterates[t];
        for (int i = -10; i <= 10; ++i) {
            const double z = 0.05 * static_cast<double>(i);
            const double maj = s.c0 + z * (s.c1 + z * s.c2);
            CHECK(evaluate(g, {s.x + z}) <= maj + 1e-9);
        }
    }
}

TEST_CASE("mm stepping marches down monotone objectives") {
    const ExprGraph g = parse("exp(x)");
    const MMTrace tr = mm_minimize(g, 0.0, 1.0, 5);

    REQUIRE(tr.iterates.size() == 6);
    // NOTE: for exp the step is the constant -1/(2(e-2)).
    const double step = -1.0 / (2.0 * (std::exp(1.0) - 2.0));
    CHECK(tr.iterates[1].x == Catch::Approx(step).margin(1e-12));
    for (std::size_t t = 0; t + 1 < tr.iterates.size(); ++t) {
        CHECK(tr.iterates[t + 1].x < tr.iterates[t].x);
        CHECK(tr.iterates[t + 1].f < tr.iterates[t].f);
    }
}

TEST_CASE("mm stepping is monotone across a function corpus") {
    struct Case {
        std::string text;
        double x0;
        double radius;
        int steps;
    };
    const std::vector<Case> cases = {
        {"exp(x)", 0.3, 0.5, 3},
        {"log(2+x)", 0.0, 0.5, 2},
        {"1/(2+x)", 0.0, 0.5, 2},
        {"softplus(x)*x", 0.5, 0.5, 6},
        {"exp(x)/(2+x)", 0.0, 0.25, 3},
        {"x^3 - 2*x + 1", 0.2, 0.4, 8},
        {"sqrt(4+x*x)", 0.5, 0.5, 6},
        {"exp(x^2)", 0.2, 0.25, 4},
        {"x*exp(x) + 1/(1+x)", 0.3, 0.25, 5},
        {"softplus(2*x+1)", -0.2, 0.5, 3},
    };
    for (const Case& c : cases) {
        INFO(c.text);
        const MMTrace tr = mm_minimize(parse(c.text), c.x0, c.radius, c.steps);
        REQUIRE(tr.iterates.size() == static_cast<std::size_t>(c.steps) + 1);
        for (std::size_t t = 0; t + 1 < tr.iterates.size(); ++t)
            CHECK(tr.iterates[t + 1].f <= tr.iterates[t].f + 1e-12);
    }
}

TEST_CASE("mm stepping validates inputs and surfaces domain violations") {
    const ExprGraph g = parse("log(2+x)");
    CHECK_THROWS_AS(mm_minimize(g, 0.0, 0.0, 3), domain_error);
    CHECK_THROWS_AS(mm_minimize(g, 0.0, -1.0, 3), domain_error);
    CHECK_THROWS_AS(mm_minimize(g, 0.0, 0.5, -1), domain_error);
    // NOTE: descending log(2+x) walks the trust window onto the pole.
    CHECK_THROWS_AS(mm_minimize(g, 0.0, 0.5, 8), domain_error);
}
