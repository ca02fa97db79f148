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

#ifndef ASSOSM_LMI_HPP_
#define ASSOSM_LMI_HPP_

#include <Eigen/Dense>

#include <string>
#include <vector>

/// Small dense semidefinite programs in inequality form
///   minimize c^T y  s.t.  F_j(y) = F_j0 + sum_i y_i F_ji  >= 0  (PSD),
///                         E y = e,
/// solved with a log-det barrier method. Meant for LMIs with a handful of
/// blocks of size < 50 and a few dozen variables.
namespace assosm::lmi {

/// Symmetric matrix affine in the decision vector.
struct AffineMatrix {
  Eigen::MatrixXd constant;
  std::vector<Eigen::MatrixXd> coefficients;

  AffineMatrix() = default;
  AffineMatrix(Eigen::Index size, Eigen::Index variables);

  Eigen::Index size() const noexcept { return constant.rows(); }
  Eigen::MatrixXd at(const Eigen::VectorXd& y) const;
};

struct Problem {
  Eigen::Index variables = 0;
  Eigen::VectorXd cost;                   // empty = pure feasibility
  std::vector<AffineMatrix> constraints;  // each must be PSD
  Eigen::MatrixXd equality;               // rows x variables, may be empty
  Eigen::VectorXd equality_rhs;
};

struct Options {
  double gap_tolerance = 1e-9;     // stop when (sum of block sizes) / t is below
  double barrier_growth = 10.0;
  int max_newton_steps = 200;      // per centering
  double radius = 1e8;             // |y| <= radius keeps centering bounded
  double feasibility_margin = 1e-9;
  bool feasibility_only = false;
};

enum class Status { kOptimal, kFeasible, kInfeasible, kFailed };

const char* to_string(Status status);

struct Result {
  Status status = Status::kFailed;
  Eigen::VectorXd y;
  double objective = 0.0;
  /// Optimal (or last) value of the phase-one margin problem
  ///   min s  s.t.  F_j(y) + s I >= 0;  s >= 0 certifies infeasibility.
  double phase_one_value = 0.0;
  int newton_steps = 0;
  std::string message;
};

Result solve(const Problem& problem, const Options& options = {});

/// Smallest eigenvalue over all constraint blocks at y.
double min_eigenvalue(const Problem& problem, const Eigen::VectorXd& y);

}  // namespace assosm::lmi

#endif  // ASSOSM_LMI_HPP_
