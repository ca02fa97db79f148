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

#ifndef ASSOSM_DATA_HPP_
#define ASSOSM_DATA_HPP_

#include "assosm/plant.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace assosm {

enum class DerivativeMode { kForwardDifference, kExactPlusNoise };

std::string to_string(DerivativeMode mode);
DerivativeMode parse_derivative_mode(const std::string& text);

/// Additive noise on the measured upper-state derivatives.
struct NoiseSpec {
  enum class Kind { kNone, kUniform };
  Kind kind = Kind::kNone;
  double halfwidth = 0.0;  // per-component range [-halfwidth, halfwidth]

  static NoiseSpec none() { return {}; }
  static NoiseSpec uniform(double halfwidth) { return {Kind::kUniform, halfwidth}; }
};

struct ExperimentConfig {
  double t0 = 0.0;
  double tau = 0.1;
  int samples = 3;
  InputSource input;
  NoiseSpec noise;
  DerivativeMode mode = DerivativeMode::kForwardDifference;
  std::uint64_t seed = 1;
  double integration_dt = 1e-4;

  /// Throws ConfigError; returns warnings for a valid but thin experiment.
  std::vector<std::string> validate(int state_dim) const;
};

/// The part of the collected data a designer is allowed to read.
struct DesignData {
  Eigen::MatrixXd inputs;          // 1 x T
  Eigen::MatrixXd upper;           // (n-1) x T, x_r samples
  Eigen::MatrixXd last;            // 1 x T, x_n samples
  Eigen::MatrixXd upper_rates;     // (n-1) x T, measured (noisy) d/dt x_r
  std::optional<Eigen::MatrixXd> last_rates;  // 1 x T, d/dt x_n (unused by the design)

  Eigen::Index samples() const noexcept { return upper.cols(); }
  Eigen::Index upper_dim() const noexcept { return upper.rows(); }
  void check_shapes() const;
};

/// Everything recorded during a collection run. The disturbance samples and
/// the realized derivative noise are simulator-side and never reach the
/// designer; use design_view().
class DataSet {
 public:
  DataSet(DesignData visible, Eigen::MatrixXd disturbances, Eigen::MatrixXd noise);

  const DesignData& design_view() const noexcept { return visible_; }
  const Eigen::MatrixXd& disturbance_samples() const noexcept { return disturbances_; }
  const Eigen::MatrixXd& realized_noise() const noexcept { return noise_; }

  std::vector<std::string> warnings;

 private:
  DesignData visible_;
  Eigen::MatrixXd disturbances_;
  Eigen::MatrixXd noise_;
};

struct NoiseBound {
  Eigen::MatrixXd gamma_gram;  // gamma gamma^T, symmetric PSD
  double psi_bar = 0.0;        // per-sample squared-norm bound
};

/// Runs the experiment over [t0, t0 + T tau] and samples at t0 + k tau.
/// One extra state sample at t0 + T tau feeds the last forward difference.
DataSet collect(const PlantModel& model, const DisturbanceSignal& disturbance,
                const Eigen::VectorXd& x0, const ExperimentConfig& config);

/// Column k = (x(k+1) - x(k)) / tau; input has T+1 columns.
Eigen::MatrixXd forward_difference(const Eigen::MatrixXd& states, double tau);

/// Numerical rank: singular values above max(rows, cols) * sigma_max * 1e-10.
int numerical_rank(const Eigen::MatrixXd& m);

struct RankReport {
  int state_rank = 0;      // rank [x_r; x_n]
  int augmented_rank = 0;  // rank [x_r; x_n; u]
  bool ours = false;       // state_rank == n
  bool classical = false;  // augmented_rank == n + 1
};

RankReport rank_check(const DesignData& data);

/// Bound for per-component uniform noise of the given half-width:
/// psi_bar = n_r h^2 and gamma gamma^T = psi_bar T I.
NoiseBound noise_bound_uniform(double halfwidth, int upper_dim, int samples);

/// True iff gamma gamma^T - Psi Psi^T is PSD (eigenvalues >= -1e-10).
bool verify_noise_energy(const Eigen::MatrixXd& noise, const NoiseBound& bound);

/// Key/value metadata written next to an exported data set.
struct DataManifest {
  double t0 = 0.0;
  double tau = 0.0;
  int samples = 0;
  std::uint64_t seed = 0;
  DerivativeMode mode = DerivativeMode::kForwardDifference;
  NoiseBound bound;
  std::optional<std::string> benchmark;
};

void write_dataset(const std::filesystem::path& dir, const DataSet& data,
                   const DataManifest& manifest);

/// Reads only what a designer may see.
DesignData read_design_data(const std::filesystem::path& dir);
DataManifest read_manifest(const std::filesystem::path& dir);

/// Simulator-side noise realization, when the export carries it.
std::optional<Eigen::MatrixXd> read_realized_noise(const std::filesystem::path& dir);

void write_matrix_csv(const std::filesystem::path& file, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& file);

}  // namespace assosm

#endif  // ASSOSM_DATA_HPP_
