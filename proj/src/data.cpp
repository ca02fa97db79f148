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

#include "assosm/data.hpp"

#include "assosm/errors.hpp"

#include <cmath>
#include <random>
#include <utility>

namespace assosm {

std::string to_string(DerivativeMode mode) {
  return mode == DerivativeMode::kForwardDifference ? "forward_difference" : "exact_plus_noise";
}

DerivativeMode parse_derivative_mode(const std::string& text) {
  if (text == "forward_difference") return DerivativeMode::kForwardDifference;
  if (text == "exact_plus_noise") return DerivativeMode::kExactPlusNoise;
  throw ConfigError("unknown derivative mode '" + text + "'");
}

std::vector<std::string> ExperimentConfig::validate(int state_dim) const {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError("collect: tau must be positive");
  if (samples < 1) throw ConfigError("collect: at least one sample is required");
  if (!(integration_dt > 0.0)) throw ConfigError("collect: integration step must be positive");
  if (noise.kind == NoiseSpec::Kind::kUniform && !(noise.halfwidth >= 0.0)) {
    throw ConfigError("collect: noise half-width must be nonnegative");
  }
  std::vector<std::string> warnings;
  if (samples < 2 * state_dim - 1) {
    warnings.push_back("only " + std::to_string(samples) + " samples; the state-data rank " +
                       "condition needs at least 2n-1 = " + std::to_string(2 * state_dim - 1));
  }
  return warnings;
}

void DesignData::check_shapes() const {
  const auto t = upper.cols();
  if (upper.rows() < 1) throw ConfigError("data: empty upper-state block");
  if (last.rows() != 1 || last.cols() != t) throw ConfigError("data: x_n block shape mismatch");
  if (upper_rates.rows() != upper.rows() || upper_rates.cols() != t) {
    throw ConfigError("data: derivative block shape mismatch");
  }
  if (inputs.size() != 0 && (inputs.rows() != 1 || inputs.cols() != t)) {
    throw ConfigError("data: input block shape mismatch");
  }
  if (last_rates && (last_rates->rows() != 1 || last_rates->cols() != t)) {
    throw ConfigError("data: x_n derivative block shape mismatch");
  }
}

DataSet::DataSet(DesignData visible, Eigen::MatrixXd disturbances, Eigen::MatrixXd noise)
    : visible_(std::move(visible)),
      disturbances_(std::move(disturbances)),
      noise_(std::move(noise)) {
  visible_.check_shapes();
}

Eigen::MatrixXd forward_difference(const Eigen::MatrixXd& states, double tau) {
  if (!(tau > 0.0)) throw ConfigError("forward_difference: tau must be positive");
  if (states.cols() < 2) throw ConfigError("forward_difference: need at least two samples");
  const auto t = states.cols() - 1;
  return (states.rightCols(t) - states.leftCols(t)) / tau;
}

DataSet collect(const PlantModel& model, const DisturbanceSignal& disturbance,
                const Eigen::VectorXd& x0, const ExperimentConfig& config) {
  const int n = model.dim();
  const int nr = n - 1;
  auto warnings = config.validate(n);
  if (x0.size() != n) throw ConfigError("collect: initial state dimension mismatch");

  const auto per_sample =
      std::max<std::int64_t>(1, std::llround(config.tau / config.integration_dt));
  const double dt = config.tau / static_cast<double>(per_sample);
  const int count = config.samples;

  const Trajectory traj = integrate(model, x0, config.input, disturbance,
                                    config.tau * static_cast<double>(count), dt, config.t0);

  Eigen::MatrixXd states(n, count + 1);
  DesignData data;
  data.inputs.resize(1, count);
  Eigen::MatrixXd dist(1, count);
  Eigen::MatrixXd true_upper_rates(nr, count);
  Eigen::MatrixXd true_last_rates(1, count);
  for (int k = 0; k <= count; ++k) {
    const auto idx = static_cast<std::size_t>(k * per_sample);
    states.col(k) = traj.states[idx];
    if (k == count) break;
    const Eigen::VectorXd rate =
        plant_derivative(model, traj.states[idx], traj.inputs[idx], traj.disturbances[idx]);
    data.inputs(0, k) = traj.inputs[idx];
    dist(0, k) = traj.disturbances[idx];
    true_upper_rates.col(k) = rate.head(nr);
    true_last_rates(0, k) = rate(nr);
  }
  data.upper = states.topLeftCorner(nr, count);
  data.last = states.block(nr, 0, 1, count);

  Eigen::MatrixXd drawn = Eigen::MatrixXd::Zero(nr, count);
  if (config.noise.kind == NoiseSpec::Kind::kUniform && config.noise.halfwidth > 0.0) {
    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> draw(-config.noise.halfwidth, config.noise.halfwidth);
    for (int k = 0; k < count; ++k) {
      for (int i = 0; i < nr; ++i) drawn(i, k) = draw(rng);
    }
    const double psi_bar = nr * config.noise.halfwidth * config.noise.halfwidth;
    for (int k = 0; k < count; ++k) {
      if (drawn.col(k).squaredNorm() > psi_bar * (1.0 + 1e-12)) {
        throw ConsistencyError("collect: noise sample exceeds the declared per-sample bound");
      }
    }
  }

  if (config.mode == DerivativeMode::kForwardDifference) {
    data.upper_rates = forward_difference(states.topRows(nr), config.tau) + drawn;
    data.last_rates = forward_difference(states.bottomRows(1), config.tau);
  } else {
    data.upper_rates = true_upper_rates + drawn;
    data.last_rates = true_last_rates;
  }
  Eigen::MatrixXd realized = data.upper_rates - true_upper_rates;

  DataSet out(std::move(data), std::move(dist), std::move(realized));
  out.warnings = std::move(warnings);
  return out;
}

int numerical_rank(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  const double threshold =
      static_cast<double>(std::max(m.rows(), m.cols())) * s(0) * 1e-10;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > threshold) ++rank;
  }
  return rank;
}

RankReport rank_check(const DesignData& data) {
  const auto nr = data.upper.rows();
  const auto t = data.upper.cols();
  const int n = static_cast<int>(nr) + 1;

  Eigen::MatrixXd stacked(n, t);
  stacked << data.upper, data.last;
  RankReport report;
  report.state_rank = numerical_rank(stacked);
  report.ours = report.state_rank == n;

  if (data.inputs.size() == t) {
    Eigen::MatrixXd augmented(n + 1, t);
    augmented << stacked, data.inputs;
    report.augmented_rank = numerical_rank(augmented);
    report.classical = report.augmented_rank == n + 1;
  }
  return report;
}

NoiseBound noise_bound_uniform(double halfwidth, int upper_dim, int samples) {
  if (!(halfwidth >= 0.0)) throw ConfigError("noise_bound_uniform: negative half-width");
  if (upper_dim < 1 || samples < 1) {
    throw ConfigError("noise_bound_uniform: dimensions must be positive");
  }
  NoiseBound bound;
  // Integer count times h, then h: one rounding fewer than forming h^2 first.
  const double count = static_cast<double>(upper_dim) * static_cast<double>(samples);
  bound.psi_bar = (static_cast<double>(upper_dim) * halfwidth) * halfwidth;
  bound.gamma_gram = ((count * halfwidth) * halfwidth) * Eigen::MatrixXd::Identity(upper_dim, upper_dim);
  return bound;
}

bool verify_noise_energy(const Eigen::MatrixXd& noise, const NoiseBound& bound) {
  if (noise.rows() != bound.gamma_gram.rows() || bound.gamma_gram.rows() != bound.gamma_gram.cols()) {
    throw ConfigError("verify_noise_energy: dimension mismatch");
  }
  const Eigen::MatrixXd slack = bound.gamma_gram - noise * noise.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (slack + slack.transpose()),
                                                     Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff() >= -1e-10;
}

}  // namespace assosm
