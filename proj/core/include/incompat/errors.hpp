// Copyright 2026 The incompat Authors
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

namespace incompat {

/// Base class for every library error.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& message) : std::runtime_error(message) {}
};

class NonHermitianInput : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NonUnitary : public Error {
 public:
  using Error::Error;
};

class BlochNormExceeded : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class BlockCapExceeded : public Error {
 public:
  using Error::Error;
};

class BadRange : public Error {
 public:
  using Error::Error;
};

class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

class NotOrthogonal : public Error {
 public:
  using Error::Error;
};

class NotUnit : public Error {
 public:
  using Error::Error;
};

/// Malformed optimization problem (undeclared variable references, empty data).
class InvalidProblem : public Error {
 public:
  using Error::Error;
};

/// Solver finished without an optimality or infeasibility certificate.
class SolverFailure : public Error {
 public:
  using Error::Error;
};

/// Structured-file parsing failure; the message names the offending field.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace incompat
