#pragma once

#include <stdexcept>
#include <string>

namespace mvmc {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bad user-supplied parameter (counts, weights, spec fields).
struct ParameterError : Error {
    using Error::Error;
};

/// Matrix/vector dimensions do not line up.
struct ShapeError : Error {
    using Error::Error;
};

/// Non-finite or otherwise invalid data content.
struct ValidationError : Error {
    using Error::Error;
};

/// Problems reading a dataset from disk (missing files, ragged CSV).
struct IngestionError : Error {
    using Error::Error;
};

/// Filesystem write failures.
struct IoError : Error {
    using Error::Error;
};

/// Metric undefined on the given input (e.g. a single cluster).
struct MetricError : Error {
    using Error::Error;
};

/// Solver produced a non-finite value; carries the offending iteration.
struct DivergenceError : Error {
    int iteration;
    explicit DivergenceError(const std::string& msg, int iter)
        : Error(msg), iteration(iter) {}
};

}  // namespace mvmc
