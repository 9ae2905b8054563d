// Copyright 2026 The losscal Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LOSSCAL_ERROR_H_
#define LOSSCAL_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace losscal {

// Base for all errors caused by bad inputs. The CLI maps these to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class EmptyDataset : public Error {
 public:
  EmptyDataset() : Error("dataset is empty") {}
  using Error::Error;
};

class UnknownSignal : public Error {
 public:
  using Error::Error;
};

// Scores that no posterior maps to under the given weight matrix.
class NoConsistentPosterior : public Error {
 public:
  using Error::Error;
};

// Errors tied to a position in an input file. Line numbers are 1-based and
// count the header line.
class LineError : public Error {
 public:
  LineError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ParseError : public LineError {
 public:
  using LineError::LineError;
};

class RangeError : public LineError {
 public:
  using LineError::LineError;
};

// A broken internal invariant, not a user error. Exit code 3 on the CLI.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace losscal

#endif  // LOSSCAL_ERROR_H_
