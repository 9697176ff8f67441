#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <autobound/autobound.hpp>

namespace {

using namespace autobound;

struct UsageError {
    std::string message;
};

[[noreturn]] void fail_usage(const std::string& message) { throw UsageError{message}; }

const char* kUsage =
    "usage: autobound <subcommand> [flags]\n"
    "\n"
    "subcommands:\n"
    "  enclose    --expr E --x0 R --trust LO,HI [--degree K]\n"
    "  globalmin  --expr E --trust LO,HI [--tol T] [--max-steps N] [--trace PATH]\n"
    "  integrate  --expr E --trust LO,HI [--cells N] [--degree K] [--trace PATH]\n"
    "  jensen     --expr E --dist uniform:A,B [--degree K] [--trace PATH]\n"
    "  mm         --expr E --x0 R [--trust-radius R] [--steps N] [--trace PATH]\n"
    "\n"
    "common flags: --format {json,csv} (default json),\n"
    "              --rounding {fast,outward} (default $AUTOBOUND_ROUNDING or fast)\n";

// ---------------------------------------------------------------------------
// Flag parsing: every flag is validated before any computation starts.
// ---------------------------------------------------------------------------

struct Flags {
    std::vector<std::pair<std::string, std::string>> pairs;

    const std::string* find(const std::string& name) const {
        for (const auto& [key, value] : pairs)
            if (key == name) return &value;
        return nullptr;
    }
};

Flags collect_flags(int argc, char** argv, const std::vector<std::string>& allowed) {
    Flags flags;
    for (int i = 2; i < argc; ++i) {
        const std::string key = argv[i];
        if (key.size() < 3 || key.compare(0, 2, "--") != 0)
            fail_usage("expected a --flag, got '" + key + "'");
        const std::string name = key.substr(2);
        bool known = false;
        for (const std::string& a : allowed) known = known || a == name;
        if (!known) fail_usage("unknown flag --" + name + " for this subcommand");
        if (flags.find(name)) fail_usage("duplicate flag --" + name);
        if (i + 1 >= argc) fail_usage("flag --" + name + " needs a value");
        flags.pairs.emplace_back(name, argv[++i]);
    }
    return flags;
}

double parse_real(const std::string& name, const std::string& text) {
    const char* begin = text.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0')
        fail_usage("flag --" + name + " needs a real number, got '" + text + "'");
    return v;
}

long parse_integer(const std::string& name, const std::string& text) {
    const char* begin = text.c_str();
    char* end = nullptr;
    const long v = std::strtol(begin, &end, 10);
    if (end == begin || *end != '\0')
        fail_usage("flag --" + name + " needs an integer, got '" + text + "'");
    return v;
}

Interval parse_pair(const std::string& name, const std::string& text) {
    const std::size_t comma = text.find(',');
    if (comma == std::string::npos)
        fail_usage("flag --" + name + " needs 'lo,hi', got '" + text + "'");
    const double lo = parse_real(name, text.substr(0, comma));
    const double hi = parse_real(name, text.substr(comma + 1));
    if (lo > hi) fail_usage("flag --" + name + " endpoints are out of order");
    return Interval(lo, hi);
}

double require_real(const Flags& flags, const std::string& name) {
    const std::string* text = flags.find(name);
    if (!text) fail_usage("missing required flag --" + name);
    return parse_real(name, *text);
}

Interval require_pair(const Flags& flags, const std::string& name) {
    const std::string* text = flags.find(name);
    if (!text) fail_usage("missing required flag --" + name);
    return parse_pair(name, *text);
}

long integer_or(const Flags& flags, const std::string& name, long fallback, long min_value) {
    const std::string* text = flags.find(name);
    const long v = text ? parse_integer(name, *text) : fallback;
    if (v < min_value)
        fail_usage("flag --" + name + " must be at least " + std::to_string(min_value));
    return v;
}

double real_or(const Flags& flags, const std::string& name, double fallback) {
    const std::string* text = flags.find(name);
    return text ? parse_real(name, *text) : fallback;
}

ExprGraph require_expr(const Flags& flags) {
    const std::string* text = flags.find("expr");
    if (!text) fail_usage("missing required flag --expr");
    try {
        return parse(*text);
    } catch (const parse_error& e) {
        fail_usage(std::string("bad --expr: ") + e.what());
    }
}

Rounding pick_rounding(const Flags& flags) {
    std::string text = "fast";
    if (const char* env = std::getenv("AUTOBOUND_ROUNDING")) text = env;
    if (const std::string* flag = flags.find("rounding")) text = *flag;
    if (text == "fast") return Rounding::fast;
    if (text == "outward") return Rounding::outward;
    fail_usage("rounding must be 'fast' or 'outward', got '" + text + "'");
}

enum class Format { json, csv };

Format pick_format(const Flags& flags) {
    const std::string* text = flags.find("format");
    if (!text || *text == "json") return Format::json;
    if (*text == "csv") return Format::csv;
    fail_usage("format must be 'json' or 'csv', got '" + *text + "'");
}

Distribution require_dist(const Flags& flags) {
    const std::string* text = flags.find("dist");
    if (!text) fail_usage("missing required flag --dist");
    const std::string prefix = "uniform:";
    if (text->compare(0, prefix.size(), prefix) != 0)
        fail_usage("flag --dist understands 'uniform:<a>,<b>', got '" + *text + "'");
    const Interval support = parse_pair("dist", text->substr(prefix.size()));
    try {
        return uniform_distribution(support.lo, support.hi);
    } catch (const domain_error& e) {
        fail_usage(std::string("bad --dist: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Output plumbing.  Machine output (stdout, trace files) prints 17 significant
// digits; the one-line summaries on stderr print 6.
// ---------------------------------------------------------------------------

std::string csv_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_trace(const Flags& flags, const std::string& header,
                 const std::vector<std::string>& rows) {
    const std::string* path = flags.find("trace");
    if (!path) return;
    std::ofstream out(*path);
    if (!out) fail_usage("cannot open trace file '" + *path + "'");
    out << header << '\n';
    for (const std::string& row : rows) out << row << '\n';
}

// ---------------------------------------------------------------------------
// Subcommands.
// ---------------------------------------------------------------------------

int run_enclose(const Flags& flags) {
    const ExprGraph g = require_expr(flags);
    const double x0 = require_real(flags, "x0");
    const Interval trust = require_pair(flags, "trust");
    const long degree = integer_or(flags, "degree", 2, 1);
    const Rounding r = pick_rounding(flags);
    const Format format = pick_format(flags);

    const TaylorEnclosure1D enc =
        autobound_1d(g, x0, trust, static_cast<std::size_t>(degree), r);
    if (format == Format::json) {
        std::printf("%s\n", to_json(enc).c_str());
    } else {
        std::printf("i,lo,hi\n");
        for (std::size_t i = 0; i < enc.poly.coeffs.size(); ++i)
            std::printf("%zu,%s,%s\n", i, csv_real(enc.poly.coeffs[i].lo).c_str(),
                        csv_real(enc.poly.coeffs[i].hi).c_str());
    }
    const Interval& rem = enc.poly.coeffs.back();
    std::fprintf(stderr, "enclose: degree %ld at x0=%.6g over [%.6g, %.6g]; remainder [%.6g, %.6g]\n",
                 degree, x0, trust.lo, trust.hi, rem.lo, rem.hi);
    return 0;
}

int run_globalmin(const Flags& flags) {
    const ExprGraph g = require_expr(flags);
    const Interval trust = require_pair(flags, "trust");
    const double tol = real_or(flags, "tol", 1e-9);
    if (!(tol > 0.0)) fail_usage("flag --tol must be positive");
    const long max_steps = integer_or(flags, "max-steps", 1000, 1);
    const Rounding r = pick_rounding(flags);
    const Format format = pick_format(flags);

    const BnBResult res = branch_and_bound(g, trust, tol, static_cast<int>(max_steps), r);
    if (format == Format::json) {
        std::printf("{\"xbest\": %s, \"fbest\": %s, \"lower_bound\": %s, "
                    "\"converged\": %s, \"steps\": %d}\n",
                    json_real(res.xbest).c_str(), json_real(res.fbest).c_str(),
                    json_real(res.lower_bound).c_str(), res.converged ? "true" : "false",
                    res.steps);
    } else {
        std::printf("xbest,fbest,lower_bound,converged,steps\n%s,%s,%s,%s,%d\n",
                    csv_real(res.xbest).c_str(), csv_real(res.fbest).c_str(),
                    csv_real(res.lower_bound).c_str(), res.converged ? "true" : "false",
                    res.steps);
    }
    std::vector<std::string> rows;
    for (const BnBStep& row : res.trace)
        rows.push_back(std::to_string(row.step) + "," + csv_real(row.lb) + "," +
                       csv_real(row.ub));
    write_trace(flags, "step,lb,ub", rows);
    std::fprintf(stderr, "globalmin: xbest=%.6g fbest=%.6g lb=%.6g steps=%d (%s)\n", res.xbest,
                 res.fbest, res.lower_bound, res.steps,
                 res.converged ? "converged" : "step budget exhausted");
    return 0;
}

int run_integrate(const Flags& flags) {
    const ExprGraph g = require_expr(flags);
    const Interval trust = require_pair(flags, "trust");
    const long cells = integer_or(flags, "cells", 16, 1);
    const long degree = integer_or(flags, "degree", 2, 1);
    const Rounding r = pick_rounding(flags);
    const Format format = pick_format(flags);

    const Interval iv = integrate_enclosure(g, trust.lo, trust.hi, static_cast<int>(cells),
                                            static_cast<std::size_t>(degree), r);
    if (format == Format::json) {
        std::printf("{\"integral\": %s, \"width\": %s, \"cells\": %ld, \"degree\": %ld}\n",
                    to_json(iv).c_str(), json_real(width(iv)).c_str(), cells, degree);
    } else {
        std::printf("cells,lo,hi,width\n%ld,%s,%s,%s\n", cells, csv_real(iv.lo).c_str(),
                    csv_real(iv.hi).c_str(), csv_real(width(iv)).c_str());
    }
    if (flags.find("trace")) {
        // NOTE: refinement sweep n = 1, 2, 4, ... capped by the cell budget.
        std::vector<std::string> rows;
        for (long n = 1;; n = std::min(2 * n, cells)) {
            const Interval step = integrate_enclosure(g, trust.lo, trust.hi, static_cast<int>(n),
                                                      static_cast<std::size_t>(degree), r);
            rows.push_back(std::to_string(n) + "," + csv_real(step.lo) + "," +
                           csv_real(step.hi));
            if (n == cells) break;
        }
        write_trace(flags, "n,lo,hi", rows);
    }
    std::fprintf(stderr, "integrate: [%.6g, %.6g] width %.6g over %ld cells\n", iv.lo, iv.hi,
                 width(iv), cells);
    return 0;
}

int run_jensen(const Flags& flags) {
    const ExprGraph g = require_expr(flags);
    const Distribution dist = require_dist(flags);
    const long degree = integer_or(flags, "degree", 2, 2);
    const Rounding r = pick_rounding(flags);
    const Format format = pick_format(flags);

    const Interval gap = jensen_bounds(g, dist, static_cast<std::size_t>(degree), r);
    if (format == Format::json) {
        std::printf("{\"gap\": %s, \"width\": %s, \"degree\": %ld}\n", to_json(gap).c_str(),
                    json_real(width(gap)).c_str(), degree);
    } else {
        std::printf("degree,gap_lo,gap_hi\n%ld,%s,%s\n", degree, csv_real(gap.lo).c_str(),
                    csv_real(gap.hi).c_str());
    }
    if (flags.find("trace")) {
        std::vector<std::string> rows;
        for (long k = 2; k <= degree; ++k) {
            const Interval step = jensen_bounds(g, dist, static_cast<std::size_t>(k), r);
            rows.push_back(std::to_string(k) + "," + csv_real(step.lo) + "," +
                           csv_real(step.hi));
        }
        write_trace(flags, "degree,gap_lo,gap_hi", rows);
    }
    std::fprintf(stderr, "jensen: gap in [%.6g, %.6g] at degree %ld\n", gap.lo, gap.hi, degree);
    return 0;
}

int run_mm(const Flags& flags) {
    const ExprGraph g = require_expr(flags);
    const double x0 = require_real(flags, "x0");
    const double radius = real_or(flags, "trust-radius", 0.5);
    if (!(radius > 0.0)) fail_usage("flag --trust-radius must be positive");
    const long steps = integer_or(flags, "steps", 10, 0);
    const Rounding r = pick_rounding(flags);
    const Format format = pick_format(flags);

    const MMTrace tr = mm_minimize(g, x0, radius, static_cast<int>(steps), r);
    const MMStep& first = tr.iterates.front();
    const MMStep& last = tr.iterates.back();
    if (format == Format::json) {
        std::printf("{\"x0\": %s, \"f0\": %s, \"xfinal\": %s, \"ffinal\": %s, \"steps\": %ld}\n",
                    json_real(first.x).c_str(), json_real(first.f).c_str(),
                    json_real(last.x).c_str(), json_real(last.f).c_str(), steps);
    } else {
        std::printf("t,x,f\n");
        for (std::size_t t = 0; t < tr.iterates.size(); ++t)
            std::printf("%zu,%s,%s\n", t, csv_real(tr.iterates[t].x).c_str(),
                        csv_real(tr.iterates[t].f).c_str());
    }
    std::vector<std::string> rows;
    for (std::size_t t = 0; t < tr.iterates.size(); ++t)
        rows.push_back(std::to_string(t) + "," + csv_real(tr.iterates[t].x) + "," +
                       csv_real(tr.iterates[t].f));
    write_trace(flags, "t,x,f", rows);
    std::fprintf(stderr, "mm: x %.6g -> %.6g, f %.6g -> %.6g over %ld steps\n", first.x, last.x,
                 first.f, last.f, steps);
    return 0;
}

int run(int argc, char** argv) {
    if (argc < 2) fail_usage("missing subcommand");
    const std::string sub = argv[1];
    const std::vector<std::string> common = {"expr", "format", "rounding"};
    auto with = [&](std::initializer_list<const char*> extra) {
        std::vector<std::string> allowed = common;
        for (const char* e : extra) allowed.push_back(e);
        return allowed;
    };

    if (sub == "enclose")
        return run_enclose(collect_flags(argc, argv, with({"x0", "trust", "degree"})));
    if (sub == "globalmin")
        return run_globalmin(
            collect_flags(argc, argv, with({"trust", "tol", "max-steps", "trace"})));
    if (sub == "integrate")
        return run_integrate(
            collect_flags(argc, argv, with({"trust", "cells", "degree", "trace"})));
    if (sub == "jensen")
        return run_jensen(collect_flags(argc, argv, with({"dist", "degree", "trace"})));
    if (sub == "mm")
        return run_mm(
            collect_flags(argc, argv, with({"x0", "trust-radius", "steps", "trace"})));
    fail_usage("unknown subcommand '" + sub + "'");
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n\n%s", e.message.c_str(), kUsage);
        return 2;
    } catch (const error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
