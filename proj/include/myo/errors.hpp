#pragma once

#include <stdexcept>
#include <string>

namespace myo {

/// Root of every exception thrown by the library. The CLI maps each subclass
/// onto its own exit status.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration values or violated preconditions on parameters.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Observation point coincides with a source point, or a fibre is malformed.
class GeometryError : public Error {
public:
    using Error::Error;
};

/// Matrix or vector dimensions do not agree.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Input data cannot support the requested statistic (e.g. an all-zero channel).
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

class TrainingError : public Error {
public:
    TrainingError(const std::string& what, int epoch) : Error(what), epoch_(epoch) {}
    int epoch() const noexcept { return epoch_; }

private:
    int epoch_;
};

/// Failures of the clustering baseline. `kind()` says which stage gave up.
class BaselineError : public Error {
public:
    enum class Kind { insufficient_signal, one_sided_data, non_propagating, no_cluster };
    BaselineError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

/// File format problems. Each kind carries a distinct diagnostic.
class FormatError : public Error {
public:
    enum class Kind { version, dimension, malformed_header, io };
    FormatError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

}  // namespace myo
