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

#ifndef ASSOSM_PLANT_HPP_
#define ASSOSM_PLANT_HPP_

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace assosm {

using ScalarField = std::function<double(const Eigen::VectorXd&)>;
using GradientField = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using TimeSignal = std::function<double(double)>;

/// Input source evaluated at the start of every integration step.
using InputSource = std::function<double(double t, const Eigen::VectorXd& x)>;

/// Growth constants of the lower nonlinearity:
///   |f(x)| <= beta1 + beta2 |x|,  |df/dx| <= beta3 + beta4 |x|.
struct GrowthConstants {
  double beta1 = 0.0;
  double beta2 = 0.0;
  double beta3 = 0.0;
  double beta4 = 0.0;
};

/// Strict-feedback plant
///   d/dt x_r = A x_r + a x_n
///   d/dt x_n = f(x) + b u + d(t)
/// with x_r the first n-1 states. Only the simulator and the oracles may
/// look inside; the designer sees data only.
class PlantModel {
 public:
  PlantModel(Eigen::MatrixXd upper, Eigen::VectorXd coupling, double input_gain,
             ScalarField nonlinearity, GradientField gradient = {},
             std::optional<GrowthConstants> growth = std::nullopt);

  int dim() const noexcept { return static_cast<int>(coupling_.size()) + 1; }
  const Eigen::MatrixXd& upper() const noexcept { return upper_; }
  const Eigen::VectorXd& coupling() const noexcept { return coupling_; }
  double input_gain() const noexcept { return input_gain_; }
  const std::optional<GrowthConstants>& growth() const noexcept { return growth_; }

  double f(const Eigen::VectorXd& x) const { return nonlinearity_(x); }

  /// Analytic gradient when one was supplied, central differences otherwise.
  Eigen::VectorXd f_gradient(const Eigen::VectorXd& x) const;

  /// d/dt x_r for the given full state.
  Eigen::VectorXd upper_rate(const Eigen::VectorXd& x) const;

  /// The closed-loop representation matrix [a A].
  Eigen::MatrixXd stacked_upper() const;

 private:
  Eigen::MatrixXd upper_;
  Eigen::VectorXd coupling_;
  double input_gain_;
  ScalarField nonlinearity_;
  GradientField gradient_;
  std::optional<GrowthConstants> growth_;
};

/// Matched disturbance with its rate. The bounds are simulator metadata.
struct DisturbanceSignal {
  TimeSignal value;
  TimeSignal rate;
  double value_bound = 0.0;
  double rate_bound = 0.0;

  static DisturbanceSignal zero();

  /// True when |d| < value_bound and |d'| < rate_bound on a uniform grid.
  bool bounds_hold(double t_begin, double t_end, double step) const;
};

/// Uniform-grid simulation record.
struct Trajectory {
  std::vector<double> time;
  std::vector<Eigen::VectorXd> states;
  std::vector<double> inputs;
  std::vector<double> disturbances;

  std::size_t size() const noexcept { return time.size(); }
};

/// Right-hand side of the plant ODE.
Eigen::VectorXd plant_derivative(const PlantModel& model, const Eigen::VectorXd& x,
                                 double u, double d);

/// One classical RK4 step with the input held constant over the step.
Eigen::VectorXd rk4_step(const PlantModel& model, const DisturbanceSignal& disturbance,
                         const Eigen::VectorXd& x, double u, double t, double dt);

/// Fixed-step RK4 integration. The input is sampled at the start of each
/// step (zero-order hold). Throws DivergenceError on the first non-finite
/// state.
Trajectory integrate(const PlantModel& model, const Eigen::VectorXd& x0,
                     const InputSource& input, const DisturbanceSignal& disturbance,
                     double horizon, double dt, double t0 = 0.0);

/// Number of fixed steps covering a horizon; horizon must be at least dt.
std::int64_t step_count(double horizon, double dt);

enum class Benchmark { kPendulum, kLinear, kNonlinear };

Benchmark parse_benchmark(std::string_view id);
std::string to_string(Benchmark id);

struct BenchmarkPlant {
  PlantModel plant;
  DisturbanceSignal disturbance;
};

/// The three reference plants: inverted pendulum (b1), unstable linear
/// plant (b2) and the 4-state highly nonlinear chain (b3).
BenchmarkPlant benchmark_plant(Benchmark id);

/// Axis-aligned sampling box.
struct StateBox {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  static StateBox symmetric(int dim, double radius);
  StateBox scaled(double factor) const;
};

struct EnvelopeFit {
  double intercept = 0.0;
  double slope = 0.0;
};

struct GrowthReport {
  GrowthConstants fitted;
  /// Slope of the |f| envelope fitted on the box shrunk by 1/4, 1/2 and 1.
  std::vector<double> nested_value_slopes;
  bool degrades_with_radius = false;
  std::vector<std::string> notes;
};

/// Least upper envelope y <= intercept + slope * r over points (r_i, y_i)
/// with nonnegative coefficients, minimizing the mean envelope height.
EnvelopeFit fit_upper_envelope(const std::vector<double>& radius,
                               const std::vector<double>& value);

/// Samples the box, fits |f| and |df/dx| against 1 and |x|. Informational.
GrowthReport growth_diagnostic(const PlantModel& model, const StateBox& box,
                               int samples, std::uint64_t seed = 1);

}  // namespace assosm

#endif  // ASSOSM_PLANT_HPP_
