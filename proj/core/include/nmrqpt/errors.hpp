// Copyright 2026 The nmrqpt Authors
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

namespace nmrqpt {

// Coarse failure class; the CLI maps it onto its exit status.
enum class ErrorCategory { config, numerical, io, precondition };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}
  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& what)
      : Error(ErrorCategory::precondition, what) {}
};

class DimensionError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCategory::config, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCategory::io, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what)
      : Error(ErrorCategory::numerical, what) {}
};

class NotHermitianError : public PreconditionError {
 public:
  NotHermitianError(const std::string& where, double defect)
      : PreconditionError(where + ": input is not Hermitian (defect norm " +
                          std::to_string(defect) + ")"),
        defect_(defect) {}
  double defect() const noexcept { return defect_; }

 private:
  double defect_;
};

class NotUnitaryError : public PreconditionError {
 public:
  NotUnitaryError(const std::string& where, double defect)
      : PreconditionError(where + ": input is not unitary (||U^dag U - I||_F = " +
                          std::to_string(defect) + ")"),
        defect_(defect) {}
  double defect() const noexcept { return defect_; }

 private:
  double defect_;
};

class IllConditionedError : public NumericalError {
 public:
  IllConditionedError(const std::string& where, double condition)
      : NumericalError(where + ": matrix is ill-conditioned (condition number " +
                       std::to_string(condition) + ")"),
        condition_(condition) {}
  double condition_number() const noexcept { return condition_; }

 private:
  double condition_;
};

class RankDeficientError : public NumericalError {
 public:
  RankDeficientError(const std::string& where, std::vector<double> deficient)
      : NumericalError(where + ": matrix is rank deficient (" +
                       std::to_string(deficient.size()) + " negligible singular values)"),
        deficient_(std::move(deficient)) {}
  const std::vector<double>& deficient_singular_values() const noexcept { return deficient_; }

 private:
  std::vector<double> deficient_;
};

class UndefinedCorrelationError : public NumericalError {
 public:
  explicit UndefinedCorrelationError(const std::string& where)
      : NumericalError(where + ": correlation undefined for a zero operand") {}
};

}  // namespace nmrqpt
