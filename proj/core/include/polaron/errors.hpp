// errors.hpp: exception types raised by the simulator

#pragma once

#include <stdexcept>
#include <string>

namespace polaron {

// Root of every error thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid model or run parameters.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Site or table index outside its admissible range.
class IndexError : public Error {
public:
    using Error::Error;
};

// Input matrix violates a structural precondition (Hermiticity, shape).
class ValidationError : public Error {
public:
    using Error::Error;
};

// Quadrature did not converge to the requested relative accuracy.
class AccuracyError : public Error {
public:
    using Error::Error;
};

class CalibrationError : public Error {
public:
    using Error::Error;
};

// Correlation table exhausted, time grid misaligned.
class RangeError : public Error {
public:
    using Error::Error;
};

// No pair of near-zero Majorana modes separated from the bulk.
class ModeError : public Error {
public:
    using Error::Error;
};

// Ground doublet not separated from the rest of the spectrum.
class DegeneracyError : public Error {
public:
    using Error::Error;
};

// Density matrix left the healthy region during a run.
class HealthError : public Error {
public:
    HealthError(const std::string& what, double time)
        : Error(what), time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

// Steady-state window still drifting.
class NotConvergedError : public Error {
public:
    NotConvergedError(const std::string& what, double drift)
        : Error(what), drift_(drift) {}
    double drift() const noexcept { return drift_; }

private:
    double drift_;
};

} // namespace polaron
