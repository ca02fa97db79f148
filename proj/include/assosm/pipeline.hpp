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


#ifndef ASSOSM_PIPELINE_HPP_
#define ASSOSM_PIPELINE_HPP_

#include "assosm/data.hpp"
#include "assosm/design.hpp"
#include "assosm/report.hpp"
#include "assosm/simulation.hpp"
#include "assosm/spec.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace assosm {

struct RunResult {
  ExperimentSpec spec;
  std::optional<DataSet> data;
  NoiseBound bound;
  std::optional<DesignProblem> problem;
  std::optional<DesignSolution> solution;
  CertificateReport certificate;
  SlidingVariable sliding;
  LoopResult loop;
  std::vector<std::string> warnings;
  std::vector<std::filesystem::path> artifacts;

  const RunMetrics& metrics() const noexcept { return loop.metrics; }
};

/// collect -> noise bound -> design -> certificate -> sliding variable ->
/// closed loop. Failures raise PipelineError tagged with stage and step.
RunResult run_pipeline(const ExperimentSpec& spec);

/// Writes data/, spec.txt, solution.txt, trajectory.csv, report.txt and the
/// SVG panels into dir. Paths are appended to result.artifacts.
void write_artifacts(RunResult& result, const std::filesystem::path& dir);

/// Benchmark defaults, run and written to out.
RunResult reproduce(Benchmark id, const std::filesystem::path& out);

/// trajectory.csv text: t, x1..xn, u, d, sigma, s2, s2_hat, upsilon, nu.
std::string trajectory_csv(const History& history);

/// The text written to report.txt.
std::string render_report(const RunResult& result);

}  // namespace assosm

#endif  // ASSOSM_PIPELINE_HPP_
