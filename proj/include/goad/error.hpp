#pragma once

#include <stdexcept>
#include <string>

namespace goad {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Shape / index contract violations. Message carries expected vs. actual.
class DimensionError : public Error {
public:
    using Error::Error;
};

// Delimited-text parsing failures, with row/column locus in the message.
class ParseError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

// Non-finite values where the numeric contract forbids them.
class NumericError : public Error {
public:
    using Error::Error;
};

inline void require_dim(bool ok, const std::string& what, std::size_t expected,
                        std::size_t actual) {
    if (!ok) {
        throw DimensionError(what + ": expected " + std::to_string(expected) +
                             ", got " + std::to_string(actual));
    }
}

}  // namespace goad
