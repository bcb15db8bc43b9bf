#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace greedy {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Requested operation is not defined for the given input (e.g. peak functional in L_inf).
class Unsupported : public Error {
public:
    using Error::Error;
};

/// A nonzero function was required.
class ZeroFunction : public Error {
public:
    using Error::Error;
};

/// Basis columns are numerically linearly dependent.
class DegenerateBasis : public Error {
public:
    using Error::Error;
};

class EmptyDictionary : public Error {
public:
    using Error::Error;
};

/// An iterative solver hit its iteration cap. Carries the best iterate found.
class ConvergenceFailure : public Error {
public:
    ConvergenceFailure(const std::string& what, Eigen::VectorXd best_coefficients, double best_objective)
        : Error(what), best_coefficients_(std::move(best_coefficients)), best_objective_(best_objective)
    {
    }

    const Eigen::VectorXd& best_coefficients() const noexcept { return best_coefficients_; }
    double best_objective() const noexcept { return best_objective_; }

private:
    Eigen::VectorXd best_coefficients_;
    double best_objective_;
};

} // namespace greedy
