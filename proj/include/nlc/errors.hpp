#pragma once

#include <stdexcept>
#include <string>

namespace nlc {

/// Data-integrity failure: non-finite samples, broken Hermitian symmetry,
/// malformed or truncated files.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Config parse/validation failure. `line` is 1-based, 0 if not line-specific.
class ConfigError : public std::runtime_error {
public:
    ConfigError(int line, const std::string& what)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line(line) {}
    int line;
};

/// Thrown by the stepper when the director leaves the unit sphere by more
/// than the configured tolerance.
class ConstraintAbort : public std::runtime_error {
public:
    ConstraintAbort(double t, double deviation, double tol)
        : std::runtime_error("director constraint violated at t=" + std::to_string(t) +
                             ": max||n+w0|-1| = " + std::to_string(deviation) +
                             " > " + std::to_string(tol)),
          t(t), deviation(deviation) {}
    double t;
    double deviation;
};

} // namespace nlc
