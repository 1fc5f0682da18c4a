#pragma once

#include <stdexcept>
#include <string>

namespace mixnl {

// Configuration problems (exit code 2 in the CLI).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class OverlapError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class TruncationError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class OrderError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class DegenerateRegion : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class ScheduleError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class ParseError : public ConfigError {
public:
    ParseError(const std::string& key, int line, const std::string& what)
        : ConfigError("line " + std::to_string(line) + ", key '" + key + "': " + what),
          key_(key), line_(line) {}

    const std::string& key() const noexcept { return key_; }
    int line() const noexcept { return line_; }

private:
    std::string key_;
    int line_;
};

// Numerical failures (exit code 3 in the CLI).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class QuadratureError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class AssemblyError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ZeroMassError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class SolverError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class SingularBlockError : public SolverError {
public:
    using SolverError::SolverError;
};

class NoConvergence : public SolverError {
public:
    using SolverError::SolverError;
};

class SingularJacobian : public SolverError {
public:
    using SolverError::SolverError;
};

class ContinuationStall : public SolverError {
public:
    using SolverError::SolverError;
};

class ZeroNorm : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace mixnl
