#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dsea {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid or infeasible configuration (pipeline, geometry, CLI).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// The stage scheduler stopped making progress with slices still in flight.
class DeadlockError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// An application kernel failed while processing a slice.
class KernelError : public Error {
public:
    KernelError(std::size_t slice, std::size_t device, std::size_t worker, const std::string& what)
        : Error("kernel failed on slice " + std::to_string(slice) + " (device " +
                std::to_string(device) + ", worker " + std::to_string(worker) + "): " + what),
          slice_(slice), device_(device), worker_(worker) {}

    std::size_t slice() const noexcept { return slice_; }
    std::size_t device() const noexcept { return device_; }
    std::size_t worker() const noexcept { return worker_; }

private:
    std::size_t slice_;
    std::size_t device_;
    std::size_t worker_;
};

/// Physics state that cannot be advanced (overlap, runaway displacement, zero temperature).
class PhysicsError : public Error {
public:
    using Error::Error;
};

/// Dataset files missing, unreadable or corrupt.
class IoError : public Error {
public:
    using Error::Error;
};

/// Wire/file decoding failure.
class FormatError : public Error {
public:
    using Error::Error;
};

} // namespace dsea
