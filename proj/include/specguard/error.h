// Copyright 2026 The specguard Authors
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

#ifndef SPECGUARD_ERROR_H_
#define SPECGUARD_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace specguard {

// Base of every error raised by the library. Errors deriving from InputError
// are caused by bad caller data (malformed files, out-of-range arguments);
// anything else signals a broken internal invariant.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

class ParseError : public InputError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class InvariantViolation : public InputError {
 public:
  InvariantViolation(std::string field, const std::string& what)
      : InputError(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// normalize() on a sample with zero iTLB accesses.
class ZeroDenominator : public InputError {
 public:
  ZeroDenominator() : InputError("itlb_accesses is zero") {}
};

class OutOfOrderTimestamp : public InputError {
 public:
  using InputError::InputError;
};

class EmptyHistogram : public InputError {
 public:
  EmptyHistogram() : InputError("histogram has no branches") {}
};

class EmptySample : public InputError {
 public:
  EmptySample() : InputError("KS sample is empty") {}
};

class ExactModeTooLarge : public InputError {
 public:
  ExactModeTooLarge(std::size_t total)
      : InputError("exact KS mode needs n+m <= 12, got " +
                   std::to_string(total)) {}
};

class EmptyPopulation : public InputError {
 public:
  EmptyPopulation() : InputError("benign population is empty") {}
};

class UnreachableTarget : public InputError {
 public:
  using InputError::InputError;
};

class DegenerateSamples : public InputError {
 public:
  using InputError::InputError;
};

// required_requests() could not reach the target success within n_max.
class RequestsUnreachable : public InputError {
 public:
  using InputError::InputError;
};

class CalibrationInfeasible : public InputError {
 public:
  using InputError::InputError;
};

class UnknownWorker : public InputError {
 public:
  explicit UnknownWorker(const std::string& id)
      : InputError("unknown worker '" + id + "'") {}
};

}  // namespace specguard

#endif  // SPECGUARD_ERROR_H_
