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

#ifndef ASSOSM_SIMULATION_HPP_
#define ASSOSM_SIMULATION_HPP_

#include "assosm/design.hpp"
#include "assosm/plant.hpp"
#include "assosm/sosm.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace assosm {

/// Recorded closed-loop signals (every record_every steps plus the last).
struct History {
  std::vector<double> time;
  std::vector<Eigen::VectorXd> states;
  std::vector<double> u;
  std::vector<double> d;
  std::vector<double> sigma;   // s1
  std::vector<double> s2;      // true d sigma / dt
  std::vector<double> s2_hat;
  std::vector<double> upsilon;
  std::vector<double> nu;

  std::size_t size() const noexcept { return time.size(); }
};

struct RunMetrics {
  /// First t after which |sigma| < tol up to the end of the run.
  std::optional<double> reaching_time;
  double initial_sigma = 0.0;
  double final_sigma = 0.0;
  double max_sigma_after_reaching = 0.0;
  double initial_state_norm = 0.0;
  double final_state_norm = 0.0;
  /// max |x| over the last quarter of the horizon.
  double tail_state_norm = 0.0;
  double final_gain = 0.0;
  /// Least-squares slope of |x| against t over the last 20% of the record.
  double tail_norm_slope = 0.0;
};

/// Step-level checks made at full resolution during the run.
struct LoopChecks {
  bool upsilon_monotone = true;
  bool adaptation_frozen_inside_theta = true;  // no growth while |s1| <= |theta|
  bool u_lipschitz = true;                     // |du| <= upsilon dt each step
  double max_u_rate = 0.0;                     // max |du| / dt
  double aux_mismatch = 0.0;                   // max |(s1(k+1) - s1(k)) / dt - s2(k)|
  double s2_variation = 0.0;                   // max |s2(k+1) - s2(k)|
  long extrema = 0;
};

struct LoopResult {
  History history;
  RunMetrics metrics;
  LoopChecks checks;
};

struct LoopConfig {
  Eigen::VectorXd x0;
  double t0 = 0.0;
  double horizon = 20.0;
  double dt = 1e-4;
  double sigma_tol = 1e-2;
  int record_every = 10;
};

/// ASSOSM loop on the hidden plant: sample sigma, run the controller, hold u
/// over one RK4 step. Throws DivergenceError.
LoopResult simulate_closed_loop(const PlantModel& plant, const DisturbanceSignal& disturbance,
                                const SlidingVariable& sliding, const ControllerParams& params,
                                const LoopConfig& config);

/// Static sliding-variable feedback u = -gain sigma(x), no SOSM.
LoopResult simulate_static_feedback(const PlantModel& plant,
                                    const DisturbanceSignal& disturbance,
                                    const SlidingVariable& sliding, double gain,
                                    const LoopConfig& config);

/// Metrics from stored histories.
RunMetrics compute_metrics(const History& history, double sigma_tol);

}  // namespace assosm

#endif  // ASSOSM_SIMULATION_HPP_
