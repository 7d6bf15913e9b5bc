#pragma once

#include <stdexcept>
#include <string>

namespace entverdict {

// Base class for every error thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Precondition violation: bad dimension, non-unit vector, invalid parameters.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// An iterative routine failed to converge within its cap.
class NumericalFailure : public Error {
public:
    using Error::Error;
};

// Input matrix is not Hermitian within tolerance.
class NotHermitian : public Error {
public:
    NotHermitian(const std::string& what, double deviation)
        : Error(what), deviation(deviation) {}
    double deviation;  // max entry modulus of (m - m^dagger)/2
};

// Trace deviates from 1 by more than tolerance.
class BadTrace : public Error {
public:
    BadTrace(const std::string& what, double deviation)
        : Error(what), deviation(deviation) {}
    double deviation;  // |trace - 1|
};

// Minimum eigenvalue below -tolerance.
class NotPsd : public Error {
public:
    NotPsd(const std::string& what, double violation)
        : Error(what), violation(violation) {}
    double violation;  // max(0, -min_eigenvalue)
};

}  // namespace entverdict
