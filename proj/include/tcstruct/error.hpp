#pragma once

#include <stdexcept>
#include <string>

namespace tcs {

// Base class for everything this library throws on bad input or bad data.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed text/binary inputs (HURDAT2 rows, TCIR1 frames, manifests, CSV).
class ParseError : public Error {
public:
    using Error::Error;
};

// Structurally valid input that violates a documented contract
// (out-of-range coordinates, dimension mismatches, empty joins, ...).
class DataError : public Error {
public:
    using Error::Error;
};

} // namespace tcs
