#pragma once

#include <stdexcept>
#include <string>

namespace driftdiff {

// Input file could not be parsed (message carries the line number).
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Input data violates a domain invariant (non-positive price, duplicate date, ...).
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Not enough usable data to produce an estimate.
class EstimationError : public std::runtime_error {
public:
    explicit EstimationError(const std::string& what) : std::runtime_error(what) {}
};

// A regression could not be performed (too few valid bins, singular system).
class FitError : public EstimationError {
public:
    explicit FitError(const std::string& what) : EstimationError(what) {}
};

// A simulation step became invalid (negative diffusion, non-finite state).
class SimulationError : public std::runtime_error {
public:
    explicit SimulationError(const std::string& what) : std::runtime_error(what) {}
};

// Non-fatal diagnostics go to stderr so library calls stay pure.
void warn(const std::string& message);

}  // namespace driftdiff
