// Copyright 2026 The KCL Workbench Authors
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
#include <vector>

namespace kcl {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An input violated an operation's stated precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A world could not be built from its spec (bad geometry, bad sizes).
class ConstructionError : public Error {
 public:
  using Error::Error;
};

/// Base for all world-file diagnostics; each concrete subclass maps to one
/// distinct validation failure so callers can report them separately.
class SchemaError : public Error {
 public:
  using Error::Error;
};

class NormalizationError : public SchemaError {
 public:
  using SchemaError::SchemaError;
};

class SymmetryError : public SchemaError {
 public:
  using SchemaError::SchemaError;
};

class ZeroMarginalError : public SchemaError {
 public:
  using SchemaError::SchemaError;
};

class CoverageError : public SchemaError {
 public:
  using SchemaError::SchemaError;
};

class LabelError : public SchemaError {
 public:
  using SchemaError::SchemaError;
};

/// Pre-normalization output fell below the norm floor.
class DegenerateEncoderError : public Error {
 public:
  using Error::Error;
};

/// Conditional variance in a connectivity ratio vanished.
class DenominatorZeroError : public Error {
 public:
  using Error::Error;
};

/// A theorem-level check refused to run because its hypotheses fail.
class HypothesisError : public Error {
 public:
  HypothesisError(const std::string& msg, std::vector<std::string> failed)
      : Error(msg), failed_conditions(std::move(failed)) {}
  std::vector<std::string> failed_conditions;
};

}  // namespace kcl
