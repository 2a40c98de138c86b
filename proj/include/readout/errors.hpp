// errors.hpp: exception types shared across the library and the CLI

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace readout {

// Integration could not proceed (step-size underflow or step budget exhausted).
class NumericalFailure : public std::runtime_error {
public:
    NumericalFailure(const std::string& what, double time_reached)
        : std::runtime_error(what + " at t = " + std::to_string(time_reached)), time_reached_(time_reached) {}

    double time_reached() const { return time_reached_; }

private:
    double time_reached_;
};

// Malformed scenario configuration. `line` is 1-based, 0 when not tied to a line.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& what, std::string key, std::size_t line)
        : std::runtime_error(format(what, key, line)), key_(std::move(key)), line_(line) {}

    const std::string& key() const { return key_; }
    std::size_t line() const { return line_; }

private:
    static std::string format(const std::string& what, const std::string& key, std::size_t line) {
        std::string msg = "config error";
        if (line > 0) {
            msg += " (line " + std::to_string(line) + ")";
        }
        if (!key.empty()) {
            msg += " [" + key + "]";
        }
        return msg + ": " + what;
    }

    std::string key_;
    std::size_t line_;
};

// A fit could not be carried out on the requested window.
class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace readout
