// Copyright 2026 The dronedet Authors.
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

#ifndef DRONEDET_ERROR_HPP
#define DRONEDET_ERROR_HPP

#include <stdexcept>
#include <string>

namespace dronedet {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Inconsistent operation parameters (channel mismatches, bad anchor
/// counts, kernels larger than their padded input).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed text input. Carries the 1-based line number when known.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& what, int line = 0)
            : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
              line_(line)
    {
    }

    int line() const { return line_; }

private:
    int line_;
};

/// Structurally valid input that violates a semantic rule (counts that
/// disagree, values outside their domain, unresolved references).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Dimension bookkeeping failures during shape inference or execution.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Filesystem and stream failures, including short or oversized
/// binary payloads.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace dronedet

#endif  // DRONEDET_ERROR_HPP
