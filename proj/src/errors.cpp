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

#include "assosm/errors.hpp"

#include <utility>

namespace assosm {

const char* to_string(Stage stage) {
  switch (stage) {
    case Stage::kSuccess:
      return "success";
    case Stage::kUsage:
      return "usage";
    case Stage::kCollection:
      return "collection";
    case Stage::kRank:
      return "rank";
    case Stage::kDesign:
      return "design";
    case Stage::kSimulation:
      return "simulation";
  }
  return "unknown";
}

DivergenceError::DivergenceError(const std::string& what, double time)
    : Error(what + " (t = " + std::to_string(time) + " s)"), time_(time) {}

DesignInfeasibleError::DesignInfeasibleError(const std::string& what,
                                             std::string solver_status)
    : Error(what + " [solver: " + solver_status + "]"),
      status_(std::move(solver_status)) {}

PipelineError::PipelineError(Stage stage, int step, const std::string& what)
    : Error(std::string(to_string(stage)) + " failure at step " +
            std::to_string(step) + ": " + what),
      stage_(stage),
      step_(step) {}

}  // namespace assosm
