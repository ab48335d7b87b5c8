#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace kmcf {

/// Invalid sizes, bad arguments, malformed files or configs. CLI maps this to exit code 1.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// Base for failures of the numerical machinery itself. CLI maps this to exit code 2.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Iteration limit hit before the requested tolerance. Carries the last iterate.
class ConvergenceError : public NumericalError {
public:
    ConvergenceError(const std::string& what, std::vector<double> last_iterate, double residual)
        : NumericalError(what), last_iterate(std::move(last_iterate)), residual(residual) {}
    std::vector<double> last_iterate;
    double residual;
};

/// Singular (or numerically singular) Jacobian encountered at an iterate.
class SingularJacobianError : public NumericalError {
public:
    SingularJacobianError(const std::string& what, std::vector<double> last_iterate)
        : NumericalError(what), last_iterate(std::move(last_iterate)) {}
    std::vector<double> last_iterate;
};

/// det(dG/dy) = 0 at the requested point: the DAE leaves its regular set.
class RegularityError : public NumericalError {
public:
    explicit RegularityError(const std::string& what) : NumericalError(what) {}
};

} // namespace kmcf
