#pragma once

#include <stdexcept>
#include <string>

namespace aztec {

// Each error family maps to one CLI exit code (see tools/aztec_cli.cpp).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Singular matrices, assumption violations, failed consistency checks.
struct MathError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SingularError : MathError {
    explicit SingularError(const std::string& what) : MathError(what) {}
};

struct ExtentError : MathError {
    explicit ExtentError(const std::string& what) : MathError(what) {}
};

struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace aztec
