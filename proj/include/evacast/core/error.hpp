#pragma once

#include <stdexcept>
#include <string>

namespace evacast {

// Base of every error the library throws. The CLI maps the concrete type
// to an exit code (see interfaces/cli.hpp).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input text could not be parsed (malformed JSON/CSV/timestamps).
class ParseError : public Error {
public:
    using Error::Error;
};

// Parsed input violates a domain invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

// A file was written by a newer (or unknown) format version.
class IncompatibleVersionError : public ParseError {
public:
    using ParseError::ParseError;
};

// Numeric failure during training (non-finite loss, etc).
class TrainingError : public Error {
public:
    using Error::Error;
};

} // namespace evacast
