// Copyright 2026 The assosm Authors
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

#ifndef ASSOSM_ERRORS_HPP_
#define ASSOSM_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace assosm {

/// Process exit codes reported by the pipeline and the CLI.
enum class Stage : int {
  kSuccess = 0,
  kUsage = 2,
  kCollection = 10,
  kRank = 20,
  kDesign = 30,
  kSimulation = 40,
};

const char* to_string(Stage stage);

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad arguments, inconsistent dimensions, malformed files.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A simulated state became non-finite.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, double time);
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// A realized quantity violates a bound that was declared for it.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// Collected data does not satisfy the state-data rank condition.
class RankError : public Error {
 public:
  using Error::Error;
};

/// The design LMI has no solution (or the solver could not find one).
class DesignInfeasibleError : public Error {
 public:
  DesignInfeasibleError(const std::string& what, std::string solver_status);
  const std::string& solver_status() const noexcept { return status_; }

 private:
  std::string status_;
};

/// Pipeline failure tagged with the exit code and the step of the design
/// procedure (1 = collection ... 11 = continuous control) where it occurred.
class PipelineError : public Error {
 public:
  PipelineError(Stage stage, int step, const std::string& what);
  Stage stage() const noexcept { return stage_; }
  int step() const noexcept { return step_; }

 private:
  Stage stage_;
  int step_;
};

}  // namespace assosm

#endif  // ASSOSM_ERRORS_HPP_
