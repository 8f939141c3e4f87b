#pragma once

#include <stdexcept>
#include <string>

namespace gridss {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad user input: malformed config, invalid dispatch fractions, empty grids.
class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Numerical failure outside the expected per-sample non-convergence path
/// (singular lines, degenerate algebraic constraints, eigensolver failure).
class NumericError : public Error {
public:
    using Error::Error;
};

/// Power flow did not converge; message carries the final mismatch report.
class PowerFlowError : public Error {
public:
    PowerFlowError(const std::string& msg, double mismatch)
        : Error(msg), worst_mismatch(mismatch) {}
    double worst_mismatch;
};

class InitError : public Error {
public:
    using Error::Error;
};

}  // namespace gridss
