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


#ifndef ASSOSM_REPORT_HPP_
#define ASSOSM_REPORT_HPP_

#include "assosm/design.hpp"
#include "assosm/plant.hpp"
#include "assosm/simulation.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace assosm {

/// Sampling region for the auxiliary-system bound.
struct BoundBox {
  StateBox states;
  double input_bound = 0.0;       // |u| <= input_bound
  double disturbance_bound = 0.0; // |d|
  double rate_bound = 0.0;        // |d'|
};

struct BoundReport {
  double delta_bar = 0.0;
  double lambda_lower = 0.0;
  double lambda_upper = 0.0;
  double threshold = 0.0;  // non-adaptive gain bound
  Eigen::VectorXd worst_state;
  std::optional<double> final_gain;
};

/// max{delta / lo, 4 delta / (3 lo - hi)}; needs 3 lo > hi.
double non_adaptive_threshold(double delta_bar, double lambda_lower, double lambda_upper);

/// Monte-Carlo sup |Delta| over the box (corners included). Lambda = b.
BoundReport bound_report(const PlantModel& plant, const Eigen::RowVectorXd& virtual_gain,
                         const BoundBox& box, int samples, std::uint64_t seed = 11);

struct SweepPoint {
  double radius = 0.0;  // |x0|_inf
  bool converged = false;
  std::optional<double> reaching_time;
  double initial_norm = 0.0;
  double final_norm = 0.0;
  double final_gain = 0.0;
  std::string failure;
};

struct SweepReport {
  std::vector<SweepPoint> points;
  bool all_converged = false;
  bool gain_non_decreasing = false;
};

/// Runs the closed loop from radius * direction / |direction|_inf for each
/// radius. Converged = reached and |x(end)| < 0.1 |x0|.
SweepReport semi_global_sweep(const PlantModel& plant, const DisturbanceSignal& disturbance,
                              const SlidingVariable& sliding, const ControllerParams& params,
                              LoopConfig config, const Eigen::VectorXd& direction,
                              const std::vector<double>& radii);

struct DisturbanceProbe {
  double static_gain = 0.0;
  double adaptive_residual = 0.0;  // max |x| over the last quarter
  double static_residual = 0.0;
  bool adaptive_diverged = false;
  bool static_diverged = false;
};

DisturbanceProbe disturbance_probe(const PlantModel& plant, const DisturbanceSignal& disturbance,
                                   const SlidingVariable& sliding, const ControllerParams& params,
                                   const LoopConfig& config, double static_gain);

/// Plain-text blocks for report.txt.
std::string format_certificate(const CertificateReport& report);
std::string format_metrics(const RunMetrics& metrics, const LoopChecks& checks);
std::string format_bound(const BoundReport& report);
std::string format_classical(const ClassicalResult& result);
std::string format_growth(const GrowthReport& report);

}  // namespace assosm

#endif  // ASSOSM_REPORT_HPP_
