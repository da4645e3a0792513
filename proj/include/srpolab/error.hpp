// Copyright 2026 The SRPO Lab Authors. All rights reserved.
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

#ifndef SRPOLAB_ERROR_HPP_
#define SRPOLAB_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace srpo {

// Numeric values are mirrored by srpo_status in srpolab.h.
enum class ErrorCode {
  kInvalidArgument = 1,
  kStructural = 2,
  kConvergence = 3,
  kNumerical = 4,
  kDomain = 5,
  kInsufficientData = 6,
  kConfig = 7,
  kIo = 8,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Raised by iterative solvers; carries the last sup-norm residual.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual, int iterations)
      : Error(ErrorCode::kConvergence, what),
        residual_(residual),
        iterations_(iterations) {}
  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

[[noreturn]] inline void Fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void Require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) Fail(code, what);
}

}  // namespace srpo

#endif  // SRPOLAB_ERROR_HPP_
