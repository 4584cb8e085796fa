// Copyright 2026 The dcsr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace dcsr {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad arguments or shapes supplied by the caller.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Malformed or truncated file / byte stream.
class FormatError : public Error {
 public:
  using Error::Error;
};

// The matrix does not fit the fixed index widths of a format (e.g. u16 CSR).
class FormatLimitError : public Error {
 public:
  using Error::Error;
};

// A container whose streams break the encoding constraints.
class ConstraintError : public Error {
 public:
  using Error::Error;
};

// Models a memory fault or an illegal operation on the vector engine.
class EngineFault : public Error {
 public:
  using Error::Error;
};

}  // namespace dcsr
