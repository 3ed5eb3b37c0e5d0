// Copyright 2026 The actrobust Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace actrobust {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input document.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A model, policy or configuration violates one of its invariants.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// An action value lies outside the action domain of the model.
class OutOfDomain : public Error {
 public:
  using Error::Error;
};

/// Policy shape does not match the game it is used with.
class IncompatiblePolicy : public Error {
 public:
  using Error::Error;
};

/// A linear solve or another numerical kernel failed its residual check.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// The matrix-game solver could not certify its duality gap.
class MatrixGameError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A derivative was requested exactly at a knot of a piecewise-linear model.
class KnotSingularity : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Exhaustive enumeration refused because the instance exceeds the guard.
class TooLarge : public Error {
 public:
  using Error::Error;
};

/// An iterative solver hit its iteration budget. Carries the residual trace
/// accumulated so far.
class NotConverged : public Error {
 public:
  NotConverged(const std::string& what, std::vector<double> trace)
      : Error(what), trace_(std::move(trace)) {}

  const std::vector<double>& trace() const noexcept { return trace_; }

 private:
  std::vector<double> trace_;
};

}  // namespace actrobust
