// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 simpletrack contributors

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace simpletrack {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Box with non-positive width/height or non-finite coordinates.
class InvalidBoxError : public Error {
public:
    using Error::Error;
};

/// Zero-norm or non-finite embedding handed to a cosine operation.
class DegenerateEmbeddingError : public Error {
public:
    using Error::Error;
};

/// Two operands whose dimensions must agree do not.
class DimensionMismatchError : public Error {
public:
    using Error::Error;
};

/// Kalman state whose height component is not positive.
class DegenerateStateError : public Error {
public:
    using Error::Error;
};

/// Frame handed to a tracker out of order.
class SequencingError : public Error {
public:
    using Error::Error;
};

/// Empty ground truth or otherwise unevaluable input.
class EvaluationError : public Error {
public:
    using Error::Error;
};

/// Malformed input file. Carries the 1-based line number (0 when the error is
/// not tied to a line, e.g. a truncated binary record).
class FormatError : public Error {
public:
    FormatError(std::string path, std::size_t line, const std::string& what)
        : Error(path + (line ? ":" + std::to_string(line) : std::string()) + ": " + what),
          path_(std::move(path)),
          line_(line) {}

    const std::string& path() const noexcept { return path_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string path_;
    std::size_t line_;
};

}  // namespace simpletrack
