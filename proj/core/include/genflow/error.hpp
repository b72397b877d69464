#pragma once

#include <stdexcept>
#include <string>

namespace genflow {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or unusable input data (unreadable file, bad cell, too few samples).
class DataError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration: unknown family, hyperparameter outside its schema, bad grid.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Unexpected failure inside a pipeline stage.
class PipelineError : public Error {
public:
    PipelineError(std::string stage, const std::string& what)
        : Error(stage + ": " + what), stage_(std::move(stage)) {}

    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

}  // namespace genflow
