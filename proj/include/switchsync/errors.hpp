#pragma once

#include <stdexcept>
#include <string>

namespace switchsync {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
public:
    using Error::Error;
};

class SingularMatrix : public Error {
public:
    SingularMatrix(const std::string& what, double condition)
        : Error(what), condition_(condition) {}
    double condition() const noexcept { return condition_; }

private:
    double condition_;
};

// Raised by the integrator when the state stops being finite or leaves the
// divergence bound.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, double time)
        : Error(what), time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

class InfeasibleError : public Error {
public:
    InfeasibleError(const std::string& what, double best_margin)
        : Error(what), best_margin_(best_margin) {}
    /// Smallest normalized max-eigenvalue reached by the solver (>= 0 means no
    /// strictly feasible point was found).
    double best_margin() const noexcept { return best_margin_; }

private:
    double best_margin_;
};

class UsageError : public Error {
public:
    using Error::Error;
};

}  // namespace switchsync
