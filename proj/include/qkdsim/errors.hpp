#pragma once

#include <stdexcept>
#include <string>

namespace qkdsim {

// Bad configuration or malformed input (CLI exit code 2).
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Alice/Bob record lists do not cover the same pulse indices.
class AlignmentError : public std::runtime_error {
public:
    explicit AlignmentError(const std::string& msg) : std::runtime_error(msg) {}
};

// An estimator had nothing to work with (empty sifted list, starved grid point).
class EstimationError : public std::runtime_error {
public:
    explicit EstimationError(const std::string& msg) : std::runtime_error(msg) {}
};

// The brute-force oracle does not support the requested attack tag.
class UnsupportedAttackError : public std::runtime_error {
public:
    explicit UnsupportedAttackError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace qkdsim
