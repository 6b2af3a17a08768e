#pragma once

#include <stdexcept>
#include <string>

namespace occurlens {

// Base for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input file (bad row, bad header, unparsable cell).
class ParseError : public Error {
public:
    using Error::Error;
};

// Structurally valid input violating a schema rule (duplicate timestamps,
// non-monotone series, unknown ids).
class SchemaError : public Error {
public:
    using Error::Error;
};

// Mathematically invalid argument (negative count, s <= 0, gamma out of range).
class DomainError : public Error {
public:
    using Error::Error;
};

// Input that is valid but degenerate for the requested computation
// (single-class labels, all-missing column, single category).
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace occurlens
