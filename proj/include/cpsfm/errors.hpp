#ifndef CPSFM_ERRORS_HPP
#define CPSFM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cpsfm {

/// Base class of every exception thrown by the library. `code()` is a short
/// stable token used by the command-line front end.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual const char* code() const noexcept { return "error"; }
};

class InvalidArgument : public Error {
public:
    using Error::Error;
    const char* code() const noexcept override { return "invalid_argument"; }
};

/// Weighted least-squares system without full column rank.
class DegenerateFit : public Error {
public:
    using Error::Error;
    const char* code() const noexcept override { return "degenerate_fit"; }
};

/// Floating-point range exceeded (exponential growth of complex arguments).
class RangeError : public Error {
public:
    using Error::Error;
    const char* code() const noexcept override { return "range_error"; }
};

/// Required Bessel expansion order exceeds the configured cap.
class TruncationError : public Error {
public:
    TruncationError(const std::string& what, int required, int cap)
        : Error(what), required_(required), cap_(cap) {}
    const char* code() const noexcept override { return "truncation_cap_exceeded"; }
    int required() const noexcept { return required_; }
    int cap() const noexcept { return cap_; }

private:
    int required_;
    int cap_;
};

class QuadratureError : public Error {
public:
    using Error::Error;
    const char* code() const noexcept override { return "quadrature_not_converged"; }
};

class IoError : public Error {
public:
    using Error::Error;
    const char* code() const noexcept override { return "io_error"; }
};

} // namespace cpsfm

#endif
