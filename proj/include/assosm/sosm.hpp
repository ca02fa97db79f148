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

#ifndef ASSOSM_SOSM_HPP_
#define ASSOSM_SOSM_HPP_

#include "assosm/plant.hpp"

#include <Eigen/Dense>

#include <optional>

namespace assosm {

/// sign with sign(0) = 0.
inline int signum(double v) { return (v > 0.0) - (v < 0.0); }

/// First-order Levant differentiator tracking s1 and its derivative.
struct DifferentiatorState {
  double s1_hat = 0.0;
  double s2_hat = 0.0;
  double lipschitz = 300.0;  // L
  /// Euler sub-steps per sample; the measured signal is linearly
  /// interpolated between the previous and the current sample.
  int substeps = 10;
  double last_sample = 0.0;
  bool has_sample = false;

  double mu0() const;  // 1.5 sqrt(L)
  double mu1() const;  // 1.1 L
};

/// Advances the differentiator over one sample period dt ending at the
/// measurement s1.
DifferentiatorState differentiator_step(DifferentiatorState state, double s1, double dt);

/// New extremum value when sign(s2_hat) differs from a nonzero previous sign.
std::optional<double> extremum_detect(int prev_s2_sign, double s2_hat, double s1);

struct AdaptiveGainState {
  double upsilon = 1.0;
  double eta1 = 30.0;
  double eta2 = 15.0;
  double theta = 0.0;   // reference extremum; adaptation runs while |s1| > |theta|
  double s1_max = 0.0;  // latest detected extremum of s1
};

AdaptiveGainState adaptive_gain_step(AdaptiveGainState state, double s1, double s2_hat,
                                     double dt);

struct ControllerParams {
  double lipschitz = 300.0;
  double eta1 = 30.0;
  double eta2 = 15.0;
  double upsilon0 = 1.0;
  double warmup = 0.0;  // nu held at zero for this long; adaptation runs
  int substeps = 10;

  void validate() const;
};

struct SosmState {
  DifferentiatorState differentiator;
  AdaptiveGainState gain;
  double u = 0.0;   // integral of nu
  double nu = 0.0;
  int prev_s2_sign = 0;  // last nonzero sign of s2_hat
  double elapsed = 0.0;
  double warmup = 0.0;
  long extrema = 0;
};

/// Controller state at t0 for the measured s1(t0). The differentiator starts
/// at (s1, s2_init), s1_max = s1 and theta = |s1|.
SosmState init_sosm(const ControllerParams& params, double s1, double u0 = 0.0,
                    double s2_init = 0.0);

struct ControlStep {
  double nu = 0.0;
  double u = 0.0;  // control applied over the next step
  SosmState state;
};

/// One control period: differentiator, extremum test, adaptation,
/// nu = -upsilon sign(s1 - s1_max / 2) and u += nu dt.
ControlStep control_step(const SosmState& state, double s1, double dt);

/// Auxiliary-system terms of s1'' = Delta + Lambda nu, evaluated from the
/// hidden plant. Diagnostics only.
struct AuxiliaryTerms {
  double delta = 0.0;
  double lambda = 0.0;
};

AuxiliaryTerms aux_oracle_eval(const PlantModel& plant, const Eigen::RowVectorXd& virtual_gain,
                               const Eigen::VectorXd& x, double u, double d, double d_rate);

}  // namespace assosm

#endif  // ASSOSM_SOSM_HPP_
