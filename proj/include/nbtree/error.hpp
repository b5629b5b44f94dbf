// Copyright 2026 The nbtree Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace nbtree {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A precondition on the arguments of an operation was violated.
class InvalidArgument : public Error {
  public:
    using Error::Error;
};

/// The requested computation exceeds a documented size cap.
class CapExceeded : public Error {
  public:
    using Error::Error;
};

/// Two labels that must be pairwise distinct compared equal.
class LabelCollision : public Error {
  public:
    using Error::Error;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
    if (!condition) {
        throw InvalidArgument(message);
    }
}

} // namespace detail
} // namespace nbtree
