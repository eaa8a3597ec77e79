#pragma once

#include <stdexcept>
#include <string>

namespace eomsim {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Netlist text could not be tokenized/parsed. Carries the 1-based location.
class SyntaxError : public Error {
public:
    SyntaxError(const std::string& msg, int line, int column)
        : Error(msg + " (line " + std::to_string(line) + ", column " +
                std::to_string(column) + ")"),
          line(line),
          column(column) {}
    int line;
    int column;
};

class DanglingNodeError : public Error {
public:
    using Error::Error;
};

class NonPositiveValueError : public Error {
public:
    using Error::Error;
};

class MissingCoupleDirectiveError : public Error {
public:
    using Error::Error;
};

class SingularNetworkError : public Error {
public:
    using Error::Error;
};

class NegativeStiffnessError : public Error {
public:
    using Error::Error;
};

class DecoupledMechanicsError : public Error {
public:
    using Error::Error;
};

class SidebandOutOfRangeError : public Error {
public:
    using Error::Error;
};

class NoRootError : public Error {
public:
    using Error::Error;
};

class UnpairedChannelsError : public Error {
public:
    using Error::Error;
};

class NonPositiveLabFrequencyError : public Error {
public:
    using Error::Error;
};

class AdiabaticityViolatedError : public Error {
public:
    using Error::Error;
};

class NotConvergedError : public Error {
public:
    using Error::Error;
};

class UnstableSystemError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace eomsim
