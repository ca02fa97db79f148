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

#ifndef ASSOSM_SPEC_HPP_
#define ASSOSM_SPEC_HPP_

#include "assosm/data.hpp"
#include "assosm/design.hpp"
#include "assosm/kv_file.hpp"
#include "assosm/plant.hpp"
#include "assosm/sosm.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace assosm {

enum class InputKind { kZero, kCosine, kSine, kFeedback, kRandom };

std::string to_string(InputKind kind);
InputKind parse_input_kind(const std::string& text);

/// Excitation used during data collection.
///   cosine/sine: amplitude * cos|sin(frequency t)
///   feedback:    gains x + dither * w(t)
///   random:      amplitude * w(t)
/// w(t) is piecewise constant, uniform on [-1, 1], redrawn every `hold` seconds.
struct InputSpec {
  InputKind kind = InputKind::kZero;
  double amplitude = 0.0;
  double frequency = 1.0;
  Eigen::RowVectorXd gains;
  double dither = 0.0;
  double hold = 0.1;
};

/// Builds the input source; `horizon` bounds the random table.
InputSource make_input(const InputSpec& spec, double t0, double horizon, std::uint64_t seed);

struct CollectSpec {
  double t0 = 0.0;
  double tau = 0.1;
  int samples = 3;
  Eigen::VectorXd x0;
  InputSpec input;
  NoiseSpec noise;
  DerivativeMode mode = DerivativeMode::kForwardDifference;
  double dt = 1e-4;
};

struct DesignSettings {
  double eps_pd = 1e-6;
  double kappa1_cap = 1.0;
  double kappa2_cap = 1e6;
  double margin_backoff = 0.1;
  double gain_cap = 1e3;
  bool prescale = false;

  void apply(DesignProblem& problem) const;
};

struct SimulationSpec {
  Eigen::VectorXd x0;
  double horizon = 20.0;
  double dt = 1e-4;
  double sigma_tol = 1e-2;
  int record_every = 10;
};

struct ExperimentSpec {
  Benchmark benchmark = Benchmark::kPendulum;
  /// Programmatic plant; overrides the benchmark plant when set.
  std::optional<BenchmarkPlant> plant;
  CollectSpec collect;
  DesignSettings design;
  ControllerParams controller;
  SimulationSpec simulation;
  std::uint64_t seed = 1;
  std::filesystem::path out = "out";

  BenchmarkPlant resolve_plant() const;
  ExperimentConfig experiment_config() const;
  /// Throws ConfigError on any inconsistent or non-positive parameter.
  void validate() const;
};

/// Published configuration of a benchmark.
ExperimentSpec benchmark_spec(Benchmark id);

/// Reads a spec file. Missing keys fall back to the defaults of the named
/// benchmark; unknown keys are an error.
ExperimentSpec parse_spec(const KvFile& file);
ExperimentSpec load_spec(const std::filesystem::path& file);
KvFile spec_to_kv(const ExperimentSpec& spec);

}  // namespace assosm

#endif  // ASSOSM_SPEC_HPP_
