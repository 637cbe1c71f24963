// Copyright 2026 The SpikeForge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace spikeforge {

/// Base of every error thrown by the toolkit. The CLI maps these to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A zero or overflowing dimension.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Coordinate outside the stream.
class IndexError : public Error {
 public:
  using Error::Error;
};

/// Window, prefix length or interval outside the valid range.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Value outside the mathematical domain (negative rate, zero denominator, d = 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent configuration (e.g. frame interval not a multiple of tau).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed file: bad magic, version, header fields or length mismatch.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Payload shorter than declared or failing to decode.
class CorruptionError : public FormatError {
 public:
  using FormatError::FormatError;
};

/// Malformed manifest row; the message carries the line number.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Too few items for the requested operation.
class SizeError : public Error {
 public:
  using Error::Error;
};

/// Invalid caller input such as duplicate identifiers.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Filesystem failure.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace spikeforge
