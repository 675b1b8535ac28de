#pragma once

#include <stdexcept>
#include <string>

namespace warpgreen {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad input: exit code 2 at the command line.
class ValidationError : public Error {
public:
    using Error::Error;
};

class ParseError : public ValidationError {
public:
    ParseError(const std::string& field, int line, const std::string& what)
        : ValidationError(format(field, line, what)), field_(field), line_(line) {}

    const std::string& field() const noexcept { return field_; }
    int line() const noexcept { return line_; }

private:
    static std::string format(const std::string& field, int line, const std::string& what) {
        std::string msg = "parse error";
        if (line > 0) msg += " at line " + std::to_string(line);
        if (!field.empty()) msg += " in '" + field + "'";
        return msg + ": " + what;
    }
    std::string field_;
    int line_;
};

class CoercivityFailure : public ValidationError {
public:
    CoercivityFailure(const std::string& what, double lambda_min)
        : ValidationError(what), lambda_min_(lambda_min) {}
    double lambda_min() const noexcept { return lambda_min_; }

private:
    double lambda_min_;
};

class ResolutionError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// Concentration functional is flat: no isolated critical point exists.
class ConstantV : public ValidationError {
public:
    ConstantV(const std::string& what, double max_abs)
        : ValidationError(what), max_abs_(max_abs) {}
    double max_abs() const noexcept { return max_abs_; }

private:
    double max_abs_;
};

// Solver failures: exit code 3.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

class NoConvergence : public ConvergenceError {
public:
    using ConvergenceError::ConvergenceError;
};

class NonPositiveIterate : public ConvergenceError {
public:
    using ConvergenceError::ConvergenceError;
};

class JacobianSingular : public ConvergenceError {
public:
    using ConvergenceError::ConvergenceError;
};

}  // namespace warpgreen
