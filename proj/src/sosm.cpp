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

#include "assosm/sosm.hpp"

#include "assosm/errors.hpp"

#include <cmath>

namespace assosm {

double DifferentiatorState::mu0() const { return 1.5 * std::sqrt(lipschitz); }
double DifferentiatorState::mu1() const { return 1.1 * lipschitz; }

DifferentiatorState differentiator_step(DifferentiatorState state, double s1, double dt) {
  const int m = std::max(1, state.substeps);
  const double h = dt / m;
  const double start = state.has_sample ? state.last_sample : s1;
  const double mu0 = state.mu0();
  const double mu1 = state.mu1();
  for (int i = 1; i <= m; ++i) {
    // sample at the start of the sub-step
    const double w = static_cast<double>(i - 1) / m;
    const double target = start + w * (s1 - start);
    const double e = state.s1_hat - target;
    const int s = signum(e);
    const double d1 = -mu0 * std::sqrt(std::abs(e)) * s + state.s2_hat;
    const double d2 = -mu1 * s;
    state.s1_hat += h * d1;
    state.s2_hat += h * d2;
  }
  state.last_sample = s1;
  state.has_sample = true;
  return state;
}

std::optional<double> extremum_detect(int prev_s2_sign, double s2_hat, double s1) {
  const int s = signum(s2_hat);
  if (prev_s2_sign != 0 && s != 0 && s != prev_s2_sign) return s1;
  return std::nullopt;
}

AdaptiveGainState adaptive_gain_step(AdaptiveGainState state, double s1, double s2_hat,
                                     double dt) {
  if (std::abs(s1) > std::abs(state.theta)) {
    state.upsilon += (state.eta1 * std::abs(s1) + state.eta2 * std::abs(s2_hat)) * dt;
  }
  return state;
}

void ControllerParams::validate() const {
  if (!(lipschitz > 0.0)) throw ConfigError("controller: L must be positive");
  if (!(eta1 > 0.0) || !(eta2 > 0.0)) throw ConfigError("controller: eta1, eta2 must be positive");
  if (!(upsilon0 >= 0.0)) throw ConfigError("controller: upsilon0 must be nonnegative");
  if (!(warmup >= 0.0)) throw ConfigError("controller: warmup must be nonnegative");
  if (substeps < 1) throw ConfigError("controller: substeps must be at least 1");
}

SosmState init_sosm(const ControllerParams& params, double s1, double u0, double s2_init) {
  params.validate();
  SosmState st;
  st.differentiator.lipschitz = params.lipschitz;
  st.differentiator.substeps = params.substeps;
  st.differentiator.s1_hat = s1;
  st.differentiator.s2_hat = s2_init;
  st.differentiator.last_sample = s1;
  st.differentiator.has_sample = true;
  st.gain.upsilon = params.upsilon0;
  st.gain.eta1 = params.eta1;
  st.gain.eta2 = params.eta2;
  st.gain.s1_max = s1;
  st.gain.theta = std::abs(s1);
  st.u = u0;
  st.prev_s2_sign = signum(s2_init);
  st.warmup = params.warmup;
  return st;
}

ControlStep control_step(const SosmState& state, double s1, double dt) {
  if (!(dt > 0.0)) throw ConfigError("control_step: dt must be positive");
  ControlStep out;
  SosmState st = state;
  st.differentiator = differentiator_step(st.differentiator, s1, dt);
  const double s2_hat = st.differentiator.s2_hat;

  if (auto extremum = extremum_detect(st.prev_s2_sign, s2_hat, s1)) {
    st.gain.s1_max = *extremum;
    st.gain.theta = *extremum;
    ++st.extrema;
  }
  if (signum(s2_hat) != 0) st.prev_s2_sign = signum(s2_hat);

  st.gain = adaptive_gain_step(st.gain, s1, s2_hat, dt);
  st.nu = st.elapsed >= st.warmup ? -st.gain.upsilon * signum(s1 - 0.5 * st.gain.s1_max) : 0.0;
  st.u += st.nu * dt;
  st.elapsed += dt;

  out.nu = st.nu;
  out.u = st.u;
  out.state = st;
  return out;
}

AuxiliaryTerms aux_oracle_eval(const PlantModel& plant, const Eigen::RowVectorXd& virtual_gain,
                               const Eigen::VectorXd& x, double u, double d, double d_rate) {
  const int n = plant.dim();
  if (x.size() != n || virtual_gain.size() != n - 1) {
    throw ConfigError("aux_oracle_eval: dimension mismatch");
  }
  const Eigen::VectorXd rate = plant_derivative(plant, x, u, d);
  const Eigen::VectorXd upper_rate = rate.head(n - 1);
  AuxiliaryTerms t;
  t.delta = plant.f_gradient(x).dot(rate) + d_rate -
            virtual_gain.dot(plant.upper() * upper_rate) -
            virtual_gain.dot(plant.coupling()) * rate(n - 1);
  t.lambda = plant.input_gain();
  return t;
}

}  // namespace assosm
