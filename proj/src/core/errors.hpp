#pragma once

#include <stdexcept>
#include <string>

namespace lrr {

/// Thrown when an iterative numerical kernel (SVD, power iteration) fails to
/// converge within its documented iteration cap. Distinct from argument
/// errors so callers can tell bad input from numerical breakdown.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown on malformed files (matrix text format, operator JSON).
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace lrr
