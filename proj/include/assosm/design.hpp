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

#ifndef ASSOSM_DESIGN_HPP_
#define ASSOSM_DESIGN_HPP_

#include "assosm/data.hpp"
#include "assosm/plant.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace assosm {

/// Design-visible inputs of the virtual-controller LMI.
struct DesignProblem {
  Eigen::MatrixXd upper;        // O1, (n-1) x T
  Eigen::MatrixXd last;         // O2, 1 x T
  Eigen::MatrixXd upper_rates;  // O1+, (n-1) x T
  NoiseBound bound;
  double eps_pd = 1e-6;         // floor for kappa1 and Q
  double kappa1_cap = 1.0;
  double kappa2_cap = 1e6;
  double gain_cap = 1e3;        // |K| <= gain_cap
  /// The LMI is homogeneous; trace(Q) = n-1 fixes its scale. After kappa1 is
  /// maximized, the virtual gain is minimized with kappa1 >= (1 - backoff) kappa1*.
  double margin_backoff = 0.1;
  bool prescale = false;        // divide data by its largest entry before solving

  static DesignProblem from(const DesignData& data, const NoiseBound& bound);

  Eigen::Index upper_dim() const noexcept { return upper.rows(); }
  void validate() const;
};

/// phi(x_r) = K P x_r with P = Q^{-1}; V(x_r) = x_r^T P x_r.
struct DesignSolution {
  Eigen::RowVectorXd gain;  // K, 1 x (n-1)
  Eigen::MatrixXd q;        // Q
  Eigen::MatrixXd p;        // P = Q^{-1}
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  double eps_pd = 1e-6;
  double lmi_max_eigenvalue = 0.0;
  std::string status;
  std::vector<std::string> warnings;

  /// Builds P from Q and checks the symmetric-positive-definite invariants.
  static DesignSolution from_gain_and_q(Eigen::RowVectorXd gain, Eigen::MatrixXd q,
                                        double kappa1, double kappa2);
  /// Published-style input: K and P given, Q = P^{-1}.
  static DesignSolution from_gain_and_p(Eigen::RowVectorXd gain, Eigen::MatrixXd p,
                                        double kappa1, double kappa2);

  Eigen::RowVectorXd virtual_gain() const { return gain * p; }  // K P
};

/// sigma(x) = x_n + coeff_r x_r, with coeff_r = -K P.
struct SlidingVariable {
  Eigen::RowVectorXd coeff_r;

  double operator()(const Eigen::VectorXd& x) const;
  /// d sigma / dt along the plant: x_n' + coeff_r x_r'.
  double rate(const Eigen::VectorXd& x_rate) const;
};

/// G = [O2; O1].
Eigen::MatrixXd build_g(const Eigen::MatrixXd& upper, const Eigen::MatrixXd& last);

/// The (2n-1)x(2n-1) matrix that must be negative semidefinite:
///   [ k1 I - k2 (O1+ O1+^T - gg^T)    [K; Q]^T + k2 O1+ G^T ]
///   [            *                          -k2 G G^T       ]
Eigen::MatrixXd assemble_lmi(const DesignProblem& problem, const Eigen::RowVectorXd& gain,
                             const Eigen::MatrixXd& q, double kappa1, double kappa2);

double max_eigenvalue(const Eigen::MatrixXd& symmetric);

/// Maximizes kappa1 over the LMI. Throws RankError when G G^T is singular
/// and DesignInfeasibleError when no solution exists.
DesignSolution solve_design(const DesignProblem& problem);

/// Proof-side blocks: Xi1 from (kappa1, K, P^{-1}); Xi2 from the data.
Eigen::MatrixXd certificate_xi1(const DesignSolution& solution);
Eigen::MatrixXd certificate_xi2(const DesignProblem& problem);

/// Simulator-side knowledge the verifier may use.
struct OracleContext {
  const PlantModel* plant = nullptr;
  std::optional<Eigen::MatrixXd> realized_noise;
  int samples = 1000;
  std::uint64_t seed = 7;
  double slack = 1e-8;
};

struct CertificateReport {
  double certificate_max_eigenvalue = 0.0;  // of Xi1 - kappa2 Xi2
  bool certificate_ok = false;
  bool lyapunov_checked = false;
  bool lyapunov_ok = false;
  double worst_lyapunov_margin = 0.0;  // max of Vdot + kappa1 |P x|^2 on the unit sphere
  Eigen::VectorXd worst_state;
  bool noise_checked = false;
  bool noise_ok = false;
  double noise_max_eigenvalue = 0.0;  // of Psi Psi^T - gg^T
  double closed_loop_spectral_abscissa = 0.0;
  std::vector<std::string> messages;

  bool passed() const {
    return certificate_ok && (!lyapunov_checked || lyapunov_ok) && (!noise_checked || noise_ok);
  }
};

CertificateReport verify_certificate(const DesignProblem& problem, const DesignSolution& solution,
                                     const std::optional<OracleContext>& oracle = std::nullopt,
                                     double tolerance = 1e-8);

SlidingVariable sliding_variable(const DesignSolution& solution);

/// Data-based state feedback u = K x from the classical persistently-exciting
/// formulation: find Q (T x n) with X1 Q + Q^T X1^T < 0 and X0 Q = (X0 Q)^T > 0,
/// then K = U Q (X0 Q)^{-1}.
struct ClassicalResult {
  bool feasible = false;
  Eigen::RowVectorXd gain;  // 1 x n when feasible
  int augmented_rank = 0;
  bool rank_ok = false;     // rank [X0; U] == n + 1
  bool input_is_state_feedback = false;
  Eigen::RowVectorXd collection_feedback;  // F with U = F X0, when detected
  std::string solver_status;
  std::vector<std::string> warnings;
};

ClassicalResult classical_design(const DesignData& data);

void write_solution(const std::filesystem::path& file, const DesignSolution& solution);
DesignSolution read_solution(const std::filesystem::path& file);

}  // namespace assosm

#endif  // ASSOSM_DESIGN_HPP_
