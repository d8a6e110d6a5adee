// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pulsecal {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file. Carries the source name and 1-based line number (0 if not line-specific).
class ParseError : public Error {
public:
    ParseError(std::string source, std::size_t line, const std::string &message);

    const std::string &source() const noexcept { return source_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string source_;
    std::size_t line_;
};

/// Invalid configuration, arguments or preconditions.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Pulse count does not match inference count, or pairing failed where alignment needs a clean stream.
class AlignmentError : public Error {
public:
    using Error::Error;
};

/// Calibration store key collision with different content.
class StoreConflict : public Error {
public:
    using Error::Error;
};

}  // namespace pulsecal
