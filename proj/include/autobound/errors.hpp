#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace autobound {

// Base class for everything this library throws on purpose.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input lies outside a function's mathematical domain (log of a non-positive
// interval, reciprocal of a zero-containing interval, ...).  `equation` is the
// graph equation index when the violation was detected mid-propagation, or -1.
struct domain_error : error {
    explicit domain_error(const std::string& what, long equation = -1)
        : error(equation < 0 ? what : what + " (equation " + std::to_string(equation) + ")"),
          equation(equation) {}
    long equation;
};

// Malformed expression text; `pos` is the byte offset of the offending token.
struct parse_error : error {
    parse_error(const std::string& what, std::size_t pos)
        : error(what + " at position " + std::to_string(pos)), pos(pos) {}
    std::size_t pos;
};

// An invariant the library itself guarantees was broken (e.g. an intersection
// of a trust set with its range bound came out empty).  Always a bug report.
struct internal_error : error {
    using error::error;
};

// A size cap was exceeded (tensor rank, coefficient entry count, ...).
struct resource_error : error {
    using error::error;
};

}  // namespace autobound
