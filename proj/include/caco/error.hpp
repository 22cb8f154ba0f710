#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace caco {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ShapeError : public Error {
public:
    using Error::Error;
};

/// A document (or text) produced no tokens, or an empty word list reached the classifier.
class EmptyDocumentError : public Error {
public:
    using Error::Error;
};

/// Malformed input file. `line()` is 1-based, 0 when not tied to a line.
class FormatError : public Error {
public:
    FormatError(const std::string& source, std::size_t line, const std::string& what)
        : Error(line == 0 ? source + ": " + what
                          : source + ":" + std::to_string(line) + ": " + what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Invalid configuration: unknown keys, missing resources, bad values.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace caco
