// Copyright 2026 The apcd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace apcd {

/// Base class for every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Regime or schedule parameters outside the admissible range.
class InvalidRegime : public Error {
 public:
  using Error::Error;
};

/// A 2x2 basis matrix or linear system is numerically singular.
class SingularMatrix : public Error {
 public:
  using Error::Error;
};

/// Index or step argument out of range (negative t, k >= n, ...).
class OutOfRange : public Error {
 public:
  using Error::Error;
};

/// Problem data violating a precondition (zero diagonal, size mismatch, ...).
class InvalidProblem : public Error {
 public:
  using Error::Error;
};

/// A generator could not satisfy its constraints.
class Infeasible : public Error {
 public:
  using Error::Error;
};

/// Malformed config, problem file or CSV.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace apcd
