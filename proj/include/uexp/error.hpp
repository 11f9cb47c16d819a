#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace uexp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A value (result or intermediate) exceeded the caller's cap.
class CapExceeded : public Error {
public:
    using Error::Error;
};

/// An integer function was applied outside its domain (log of a non-power,
/// F/G/H of 1, factorization out of range, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Malformed input text, with the byte offset of the failure and the set of
/// tokens that would have been accepted there.
class ParseError : public Error {
public:
    ParseError(std::string what, std::size_t offset, std::vector<std::string> expected = {})
        : Error(format(what, offset, expected)), offset_(offset), expected_(std::move(expected))
    {
    }

    std::size_t offset() const noexcept { return offset_; }
    const std::vector<std::string> & expected() const noexcept { return expected_; }

private:
    static std::string format(const std::string & what, std::size_t offset, const std::vector<std::string> & expected)
    {
        std::string msg = "parse error at byte " + std::to_string(offset) + ": " + what;
        if (! expected.empty()) {
            msg += " (expected one of:";
            for (auto & e : expected)
                msg += " " + e;
            msg += ")";
        }
        return msg;
    }

    std::size_t offset_;
    std::vector<std::string> expected_;
};

/// The rewrite engine fired more rules than its budget allows. This signals a
/// bug in the termination measure and is never expected in practice.
class RewriteBudgetExceeded : public Error {
public:
    using Error::Error;
};

} // namespace uexp
