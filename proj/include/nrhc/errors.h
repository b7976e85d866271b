// Copyright 2026 The nrhc Authors
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

#ifndef NRHC_ERRORS_H_
#define NRHC_ERRORS_H_

#include <stdexcept>
#include <string>

namespace nrhc {

// Bad input values or configuration. Maps to CLI exit status 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Model evaluation produced an unusable result (indefinite or
// ill-conditioned inertia matrix and the like).
class ParameterFault : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// The closed loop blew up during integration. Maps to exit status 2.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, double time)
      : std::runtime_error(what), time_(time) {}

  double time() const { return time_; }

 private:
  double time_;
};

// File system failures. Maps to exit status 3.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nrhc

#endif  // NRHC_ERRORS_H_
