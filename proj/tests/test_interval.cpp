#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <random>

#include "autobound/interval.hpp"

using namespace autobound;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// Uniform draw from a bounded interval.
double draw(std::mt19937_64& rng, const Interval& a) {
    std::uniform_real_distribution<double> d(a.lo, a.hi);
    return d(rng);
}

Interval random_interval(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> d(-10.0, 10.0);
    double x = d(rng), y = d(rng);
    return Interval(std::min(x, y), std::max(x, y));
}
}  // namespace

TEST_CASE("interval construction validates") {
    CHECK_NOTHROW(Interval(1.0, 2.0));
    CHECK_NOTHROW(Interval(-kInf, 3.0));
    CHECK_NOTHROW(Interval(-kInf, kInf));
    CHECK_THROWS_AS(Interval(2.0, 1.0), error);
    CHECK_THROWS_AS(Interval(std::nan(""), 1.0), error);
    CHECK_THROWS_AS(Interval(1.0, std::nan("")), error);
}

TEST_CASE("hand-checked endpoint arithmetic") {
    Interval s(-3.0, 3.0);

    SECTION("addition doubles symmetric endpoints") {
        Interval r = add(s, s);
        CHECK(r.lo == -6.0);
        CHECK(r.hi == 6.0);
    }
    SECTION("product of symmetric intervals forgets the correlation") {
        Interval r = mul(s, s);
        CHECK(r.lo == -9.0);
        CHECK(r.hi == 9.0);
    }
    SECTION("the power rule keeps even powers nonnegative") {
        Interval r = ipow(s, 2);
        CHECK(r.lo == 0.0);
        CHECK(r.hi == 9.0);
    }
    SECTION("mixed-sign product") {
        Interval r = mul(Interval(-2.0, 3.0), Interval(-5.0, 7.0));
        CHECK(r.lo == -15.0);
        CHECK(r.hi == 21.0);
    }
    SECTION("odd power is monotone") {
        Interval r = ipow(Interval(-2.0, 1.0), 3);
        CHECK(r.lo == -8.0);
        CHECK(r.hi == 1.0);
    }
}

TEST_CASE("scalar helpers") {
    Interval a(-1.0, 4.0);
    CHECK(width(a) == 5.0);
    CHECK(radius(a) == 2.5);
    CHECK(midpoint(a) == 1.5);
    CHECK(contains(a, 0.0));
    CHECK_FALSE(contains(a, 4.5));
    CHECK(contains(a, Interval(0.0, 1.0)));
    CHECK_FALSE(contains(a, Interval(3.0, 5.0)));
    CHECK(degenerate(Interval(2.0)));

    Interval n = neg(a);
    CHECK(n.lo == -4.0);
    CHECK(n.hi == 1.0);

    Interval sc = scale(a, -2.0);
    CHECK(sc.lo == -8.0);
    CHECK(sc.hi == 2.0);
}

TEST_CASE("intersection and hull") {
    Interval r = intersect(Interval(0.0, 5.0), Interval(3.0, 9.0));
    CHECK(r.lo == 3.0);
    CHECK(r.hi == 5.0);

    Interval h = hull(Interval(0.0, 1.0), Interval(4.0, 5.0));
    CHECK(h.lo == 0.0);
    CHECK(h.hi == 5.0);

    // Disjoint operands cannot both enclose the same true set.
    CHECK_THROWS_AS(intersect(Interval(0.0, 1.0), Interval(2.0, 3.0)), internal_error);
}

TEST_CASE("infinite endpoints are first-class") {
    SECTION("an exact zero annihilates an unbounded factor") {
        Interval r = mul(Interval(0.0), Interval(-kInf, kInf));
        CHECK(r.lo == 0.0);
        CHECK(r.hi == 0.0);
    }
    SECTION("unbounded endpoints propagate through addition") {
        Interval r = add(Interval(1.0, 2.0), Interval(-kInf, 3.0));
        CHECK(r.lo == -kInf);
        CHECK(r.hi == 5.0);
    }
    SECTION("inf - inf is rejected, not NaN") {
        CHECK_THROWS_AS(add(Interval(-kInf, 0.0), Interval(kInf, kInf)), error);
    }
    SECTION("scale by zero is exactly zero even for unbounded input") {
        Interval r = scale(Interval(-kInf, kInf), 0.0);
        CHECK(r.lo == 0.0);
        CHECK(r.hi == 0.0);
    }
    SECTION("even power of an unbounded mixed interval") {
        Interval r = ipow(Interval(-kInf, 2.0), 2);
        CHECK(r.lo == 0.0);
        CHECK(r.hi == kInf);
    }
}

TEST_CASE("sampled members stay inside op results") {
    std::mt19937_64 rng(20240814);
    for (int trial = 0; trial < 200; ++trial) {
        Interval a = random_interval(rng);
        Interval b = random_interval(rng);
        for (int s = 0; s < 20; ++s) {
            double x = draw(rng, a), y = draw(rng, b);
            CHECK(contains(add(a, b), x + y));
            CHECK(contains(sub(a, b), x - y));
            CHECK(contains(mul(a, b), x * y));
            CHECK(contains(ipow(a, 3), x * x * x));
            CHECK(contains(ipow(a, 2), x * x));
        }
    }
}

TEST_CASE("outward results contain fast results") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 500; ++trial) {
        Interval a = random_interval(rng);
        Interval b = random_interval(rng);
        CHECK(contains(add(a, b, Rounding::outward), add(a, b)));
        CHECK(contains(mul(a, b, Rounding::outward), mul(a, b)));
        CHECK(contains(ipow(a, 4, Rounding::outward), ipow(a, 4)));
        CHECK(contains(scale(a, 1.0 / 3.0, Rounding::outward), scale(a, 1.0 / 3.0)));
    }
    // The nudge is strict on inexact results.
    Interval t = scale(Interval(1.0, 2.0), 1.0 / 3.0, Rounding::outward);
    Interval f = scale(Interval(1.0, 2.0), 1.0 / 3.0);
    CHECK(t.lo < f.lo);
    CHECK(t.hi > f.hi);
}
