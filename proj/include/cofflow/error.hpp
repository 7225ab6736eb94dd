#pragma once

#include <stdexcept>
#include <string>

namespace cofflow {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Missing, unreadable or unwritable files.
class IoError : public Error {
public:
    using Error::Error;
};

/// Malformed file contents (bad magic, truncated data, bad CSV row, ...).
class FormatError : public Error {
public:
    using Error::Error;
};

/// Inputs whose sizes do not agree, or are too small for the operation.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Arguments outside their documented domain.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

}  // namespace cofflow
