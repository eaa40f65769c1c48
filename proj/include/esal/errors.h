// Copyright 2026 The ESAL Authors.
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

#ifndef ESAL_ERRORS_H_
#define ESAL_ERRORS_H_

#include <stdexcept>
#include <string>

namespace esal {

// Invalid schema definition (duplicate or empty names).
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed label text or corpus line.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tensor shape or axis violation.
class ShapeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Violated precondition of an operation (e.g. backward twice, bad range).
class ContractError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inconsistent prediction/gold keys during scoring.
class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input data does not match the model's preprocessing (hash mismatch).
class DataMismatchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// NaN/Inf encountered during training.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad configuration value or unknown key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace esal

#endif  // ESAL_ERRORS_H_
