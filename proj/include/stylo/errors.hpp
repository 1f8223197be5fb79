#pragma once

#include <stdexcept>
#include <string>

namespace stylo {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Corpus layout or content problems (missing directory, bad UTF-8, ...).
class CorpusError : public Error {
public:
    using Error::Error;
};

/// A precondition on arguments was violated (shape mismatch, bad config).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Serialized artifact has the wrong schema, version, or shape.
class FormatError : public Error {
public:
    using Error::Error;
};

}  // namespace stylo
