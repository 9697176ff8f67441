#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <utility>
#include <vector>

#include "autobound/autobound1d.hpp"
#include "autobound/errors.hpp"
#include "autobound/expr.hpp"
#include "autobound/interval.hpp"
#include "autobound/poly1d.hpp"

namespace autobound {

// ---------------------------------------------------------------------------
// Closed-form extrema of the quadratic bound functions.
// ---------------------------------------------------------------------------

enum class QuadBound { lower, upper };

struct QuadExtremum {
    double arg = 0.0;    // NOTE: in x coordinates, not displacement.
    double value = 0.0;
};

// Minimizes the selected quadratic bound c0 + c1 z + c z^2 (c is the lower or
// upper end of the degree-2 coefficient) over the trust interval.  Candidates
// are the two endpoints plus the vertex -c1/(2c) when the parabola opens
// upward and the vertex lies inside.  The pipeline produces point intervals
// for coefficients 0..k-1, so reading one end of them is exact.
inline QuadExtremum quad_bound_extrema(const TaylorEnclosure1D& enc, QuadBound which) {
    if (enc.poly.coeffs.size() != 3)
        throw domain_error("quadratic bound extrema need a degree-2 enclosure");
    const bool lower = which == QuadBound::lower;
    const double c0 = lower ? enc.poly.coeffs[0].lo : enc.poly.coeffs[0].hi;
    const double c1 = midpoint(enc.poly.coeffs[1]);
    const double c = lower ? enc.poly.coeffs[2].lo : enc.poly.coeffs[2].hi;

    const double zl = enc.trust.lo - enc.x0;
    const double zr = enc.trust.hi - enc.x0;
    auto q = [&](double z) { return c0 + z * (c1 + z * c); };

    double best_z = zl;
    double best_v = q(zl);
    if (q(zr) < best_v) {
        best_z = zr;
        best_v = q(zr);
    }
    if (c > 0.0) {
        const double zv = -c1 / (2.0 * c);
        if (zv >= zl && zv <= zr && q(zv) < best_v) {
            best_z = zv;
            best_v = q(zv);
        }
    }
    return {enc.x0 + best_z, best_v};
}

// ---------------------------------------------------------------------------
// Verified global minimization by branch and bound.
// ---------------------------------------------------------------------------

struct BnBNode {
    Interval subinterval{0.0};
    double lower_bound = -std::numeric_limits<double>::infinity();
    double center = 0.0;
};

struct BnBStep {
    int step = 0;
    double lb = 0.0;
    double ub = 0.0;
};

struct BnBResult {
    double xbest = 0.0;
    double fbest = std::numeric_limits<double>::infinity();
    double lower_bound = -std::numeric_limits<double>::infinity();
    bool converged = false;
    int steps = 0;
    std::vector<BnBStep> trace;
};

namespace detail {

// Minimum of the node's lower quadratic restricted to a sub-range; valid
// because the enclosure holds over the whole node.
inline double quad_lower_min(const TaylorEnclosure1D& enc, const Interval& sub) {
    TaylorEnclosure1D view{enc.x0, sub, enc.poly};
    return quad_bound_extrema(view, QuadBound::lower).value;
}

}  // namespace detail

// Best-first search: pop the node with the smallest lower bound, evaluate f
// at its midpoint, refresh its bound with a degree-2 enclosure centered
// there, and bisect.  The minimizer of the lower quadratic is also sampled
// for the incumbent (it reaches endpoints exactly, where midpoints only
// converge).  Children bank the refreshed quadratic minimized over their
// halves; nodes whose bound exceeds the incumbent are discarded.
inline BnBResult branch_and_bound(const ExprGraph& g, const Interval& trust, double tol,
                                  int max_steps, Rounding r = Rounding::fast) {
    if (!(tol > 0.0)) throw domain_error("branch and bound needs a positive tolerance");
    if (max_steps < 1) throw domain_error("branch and bound needs a positive step budget");
    if (!bounded(trust) || !(trust.lo < trust.hi))
        throw domain_error("branch and bound needs a bounded search interval");

    auto by_bound = [](const BnBNode& a, const BnBNode& b) {
        return a.lower_bound > b.lower_bound;
    };
    std::priority_queue<BnBNode, std::vector<BnBNode>, decltype(by_bound)> queue(by_bound);
    queue.push({trust, -std::numeric_limits<double>::infinity(), midpoint(trust)});

    BnBResult res;
    res.xbest = midpoint(trust);
    while (res.steps < max_steps && !queue.empty()) {
        const BnBNode node = queue.top();
        queue.pop();
        ++res.steps;

        const double m = node.center;
        const double fm = evaluate(g, {m});
        if (fm < res.fbest) {
            res.fbest = fm;
            res.xbest = m;
        }

        const TaylorEnclosure1D enc = autobound_1d(g, m, node.subinterval, 2, r);
        const QuadExtremum low = quad_bound_extrema(enc, QuadBound::lower);
        const double fa = evaluate(g, {low.arg});
        if (fa < res.fbest) {
            res.fbest = fa;
            res.xbest = low.arg;
        }
        const double refined = std::max(node.lower_bound, low.value);
        const Interval halves[2] = {Interval(node.subinterval.lo, m),
                                    Interval(m, node.subinterval.hi)};
        for (const Interval& half : halves) {
            if (!(half.lo < half.hi)) continue;  // NOTE: midpoint hit an endpoint.
            const double lb = std::max(refined, detail::quad_lower_min(enc, half));
            if (lb <= res.fbest) queue.push({half, lb, midpoint(half)});
        }

        res.lower_bound =
            queue.empty() ? res.fbest : std::min(queue.top().lower_bound, res.fbest);
        res.trace.push_back({res.steps, res.lower_bound, res.fbest});
        if (res.fbest - res.lower_bound <= tol) {
            res.converged = true;
            break;
        }
    }
    return res;
}

// ---------------------------------------------------------------------------
// Verified integration over a uniform grid.
// ---------------------------------------------------------------------------

// Integrates the per-cell enclosure sum_j c_j (x - m_i)^j in closed form over
// each cell.  Even powers contribute c_j * 2 h^{j+1}/(j+1); odd powers split
// into the negative and positive half-cell parts so wide coefficients stay
// sound (for point coefficients the halves cancel exactly).
inline Interval integrate_enclosure(const ExprGraph& g, double a, double b, int n,
                                    std::size_t k, Rounding r = Rounding::fast) {
    if (!(std::isfinite(a) && std::isfinite(b) && a < b))
        throw domain_error("integration needs finite bounds with a < b");
    if (n < 1) throw domain_error("integration needs at least one cell");

    const double w = (b - a) / static_cast<double>(n);
    Interval acc(0.0);
    for (int i = 0; i < n; ++i) {
        const double lo = a + static_cast<double>(i) * w;
        const double hi = i + 1 == n ? b : a + static_cast<double>(i + 1) * w;
        const Interval cell_iv(lo, hi);
        const TaylorEnclosure1D enc = autobound_1d(g, midpoint(cell_iv), cell_iv, k, r);

        const double h = 0.5 * (hi - lo);
        Interval cell(0.0);
        double hpow = h;  // NOTE: h^{j+1}, grown multiplicatively.
        for (std::size_t j = 0; j < enc.poly.coeffs.size(); ++j) {
            const Interval& c = enc.poly.coeffs[j];
            const double v = hpow / static_cast<double>(j + 1);
            if (j % 2 == 0) {
                cell = add(cell, mul(c, Interval(2.0 * v), r), r);
            } else {
                cell = add(cell, add(mul(c, Interval(-v), r), mul(c, Interval(v), r), r), r);
            }
            hpow *= h;
        }
        acc = add(acc, cell, r);
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Sharpened Jensen bounds.
// ---------------------------------------------------------------------------

struct Distribution {
    enum class Kind { uniform, discrete };
    Kind kind = Kind::uniform;
    double a = 0.0;  // NOTE: uniform support ends; unused for discrete.
    double b = 0.0;
    std::vector<double> points;
    std::vector<double> weights;
};

inline Distribution uniform_distribution(double a, double b) {
    if (!(std::isfinite(a) && std::isfinite(b)))
        throw domain_error("uniform distribution needs a bounded support");
    if (!(a < b)) throw domain_error("uniform distribution needs a < b");
    Distribution d;
    d.kind = Distribution::Kind::uniform;
    d.a = a;
    d.b = b;
    return d;
}

inline Distribution discrete_distribution(std::vector<double> points,
                                          std::vector<double> weights) {
    if (points.empty() || points.size() != weights.size())
        throw domain_error("discrete distribution needs matching nonempty points and weights");
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!std::isfinite(points[i]))
            throw domain_error("discrete distribution needs finite points");
        if (!(weights[i] >= 0.0))
            throw domain_error("discrete distribution needs nonnegative weights");
        total += weights[i];
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw domain_error("discrete distribution weights must sum to one");
    Distribution d;
    d.kind = Distribution::Kind::discrete;
    d.points = std::move(points);
    d.weights = std::move(weights);
    return d;
}

namespace detail {

inline double pow_int(double t, std::size_t i) {
    double acc = 1.0;
    for (std::size_t j = 0; j < i; ++j) acc *= t;
    return acc;
}

inline Interval dist_support(const Distribution& d) {
    if (d.kind == Distribution::Kind::uniform) return Interval(d.a, d.b);
    double lo = d.points[0];
    double hi = d.points[0];
    for (double p : d.points) {
        lo = std::min(lo, p);
        hi = std::max(hi, p);
    }
    return Interval(lo, hi);
}

inline double dist_mean(const Distribution& d) {
    if (d.kind == Distribution::Kind::uniform) return 0.5 * (d.a + d.b);
    double mu = 0.0;
    for (std::size_t i = 0; i < d.points.size(); ++i) mu += d.weights[i] * d.points[i];
    return mu;
}

// E[(X - mu)^i]; closed form for the uniform case (odd moments vanish by
// symmetry), weighted sum for the discrete case.
inline double central_moment(const Distribution& d, std::size_t i, double mu) {
    if (d.kind == Distribution::Kind::uniform) {
        if (i % 2 == 1) return 0.0;
        const double h = 0.5 * (d.b - d.a);
        return pow_int(h, i) / static_cast<double>(i + 1);
    }
    double m = 0.0;
    for (std::size_t j = 0; j < d.points.size(); ++j)
        m += d.weights[j] * pow_int(d.points[j] - mu, i);
    return m;
}

// (E[min{0, (X - mu)^i}], E[max{0, (X - mu)^i}]) for odd i, split at mu.
inline std::pair<double, double> split_central_moment(const Distribution& d, std::size_t i,
                                                      double mu) {
    if (d.kind == Distribution::Kind::uniform) {
        const double h = 0.5 * (d.b - d.a);
        const double half = pow_int(h, i) / (2.0 * static_cast<double>(i + 1));
        return {-half, half};
    }
    double neg = 0.0;
    double pos = 0.0;
    for (std::size_t j = 0; j < d.points.size(); ++j) {
        const double t = d.weights[j] * pow_int(d.points[j] - mu, i);
        if (t < 0.0) neg += t;
        else pos += t;
    }
    return {neg, pos};
}

}  // namespace detail

// Interval containing the Jensen gap E[phi(X)] - phi(E[X]): a degree-k
// enclosure of phi at mu over the support is integrated against exact
// central moments.  Terms of even power use E[(X - mu)^i] directly; odd
// powers need the one-sided split because the monomial changes sign at mu
// (for point coefficients the split collapses to the plain moment).
inline Interval jensen_bounds(const ExprGraph& g, const Distribution& dist, std::size_t k,
                              Rounding r = Rounding::fast) {
    if (k < 2) throw domain_error("jensen gap reporting needs degree at least 2");
    const double mu = detail::dist_mean(dist);
    const Interval support = detail::dist_support(dist);
    if (!(width(support) > 0.0)) return Interval(0.0);  // NOTE: X is almost surely mu.

    const TaylorEnclosure1D enc = autobound_1d(g, mu, support, k, r);
    Interval gap(0.0);
    for (std::size_t i = 1; i <= k; ++i) {
        const Interval& c = enc.poly.coeffs[i];
        if (i % 2 == 0) {
            gap = add(gap, mul(c, Interval(detail::central_moment(dist, i, mu)), r), r);
        } else {
            const auto [neg, pos] = detail::split_central_moment(dist, i, mu);
            gap = add(gap, add(mul(c, Interval(neg), r), mul(c, Interval(pos), r), r), r);
        }
    }
    return gap;
}

// ---------------------------------------------------------------------------
// Majorization-minimization stepping.
// ---------------------------------------------------------------------------

struct MMStep {
    double x = 0.0;
    double f = 0.0;
    double c0 = 0.0;  // NOTE: majorizer c0 + c1 z + c2 z^2 in z = x' - x.
    double c1 = 0.0;
    double c2 = 0.0;
};

struct MMTrace {
    std::vector<MMStep> iterates;
};

// Each step minimizes the quadratic upper bound of a degree-2 enclosure over
// the re-centered trust window.  The majorizer touches f at the center, so
// the objective is nonincreasing by construction.
inline MMTrace mm_minimize(const ExprGraph& g, double x0, double trust_radius, int steps,
                           Rounding r = Rounding::fast) {
    if (!(trust_radius > 0.0)) throw domain_error("mm stepping needs a positive trust radius");
    if (steps < 0) throw domain_error("mm stepping needs a nonnegative step count");

    MMTrace trace;
    double x = x0;
    for (int t = 0; t <= steps; ++t) {
        const Interval window(x - trust_radius, x + trust_radius);
        const TaylorEnclosure1D enc = autobound_1d(g, x, window, 2, r);
        MMStep step;
        step.x = x;
        step.f = evaluate(g, {x});
        step.c0 = midpoint(enc.poly.coeffs[0]);
        step.c1 = midpoint(enc.poly.coeffs[1]);
        step.c2 = enc.poly.coeffs[2].hi;
        trace.iterates.push_back(step);
        if (t == steps) break;
        x = quad_bound_extrema(enc, QuadBound::upper).arg;
    }
    return trace;
}

}  // namespace autobound
