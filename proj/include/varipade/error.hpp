#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace varipade {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed expression or structure string. `offset` is the byte position
/// where parsing stopped.
class SyntaxError : public Error {
public:
    SyntaxError(const std::string& what, std::size_t offset)
        : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

class UnknownIdentifier : public Error {
public:
    UnknownIdentifier(const std::string& name, std::size_t offset)
        : Error("unknown identifier '" + name + "' at offset " + std::to_string(offset)),
          name_(name), offset_(offset) {}
    const std::string& name() const noexcept { return name_; }
    std::size_t offset() const noexcept { return offset_; }

private:
    std::string name_;
    std::size_t offset_;
};

/// Well-formed structure string describing an unusable model (zero width,
/// unknown activation, ...).
class InvalidStructure : public Error {
public:
    using Error::Error;
};

/// A sub-expression or function left its natural domain.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Padé denominator vanished at `x`.
class PoleError : public Error {
public:
    PoleError(double x, double denominator)
        : Error("Pade denominator " + std::to_string(denominator) + " too close to zero at x=" +
                std::to_string(x)),
          x_(x) {}
    double x() const noexcept { return x_; }

private:
    double x_;
};

class OverflowError : public Error {
public:
    using Error::Error;
};

/// relative_error() called with a zero reference value.
class DegenerateReference : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

}  // namespace varipade
