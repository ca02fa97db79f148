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

#include "assosm/lmi.hpp"

#include "assosm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace assosm::lmi {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

using Blocks = std::vector<AffineMatrix>;

double total_size(const Blocks& blocks) {
  double s = 0.0;
  for (const auto& b : blocks) s += static_cast<double>(b.size());
  return s;
}

/// Sum of log det over blocks, or nullopt-like NaN when some block is not PD.
double log_det_sum(const Blocks& blocks, const VectorXd& y) {
  double sum = 0.0;
  for (const auto& b : blocks) {
    Eigen::LLT<MatrixXd> llt(b.at(y));
    if (llt.info() != Eigen::Success) return std::numeric_limits<double>::quiet_NaN();
    const auto& l = llt.matrixLLT();
    for (Index i = 0; i < l.rows(); ++i) {
      const double d = l(i, i);
      if (!(d > 0.0)) return std::numeric_limits<double>::quiet_NaN();
      sum += 2.0 * std::log(d);
    }
  }
  return sum;
}

/// Gradient and Hessian of -sum log det F_j(y).
void barrier_derivatives(const Blocks& blocks, const VectorXd& y, VectorXd& grad,
                         MatrixXd& hess) {
  const Index m = y.size();
  grad.setZero(m);
  hess.setZero(m, m);
  std::vector<MatrixXd> w(static_cast<std::size_t>(m));
  for (const auto& b : blocks) {
    Eigen::LLT<MatrixXd> llt(b.at(y));
    for (Index i = 0; i < m; ++i) {
      w[i] = llt.solve(b.coefficients[i]);
      grad(i) -= w[i].trace();
    }
    for (Index i = 0; i < m; ++i) {
      for (Index k = i; k < m; ++k) {
        // tr(W_i W_k) without forming the product.
        const double v = (w[i].array() * w[k].transpose().array()).sum();
        hess(i, k) += v;
        if (k != i) hess(k, i) += v;
      }
    }
  }
}

struct CenterOutcome {
  bool ok = true;
  bool stopped = false;
};

/// Newton's method on t c^T y - sum log det F_j(y) from a strictly feasible y.
CenterOutcome center(const Blocks& blocks, const VectorXd& cost, double t, VectorXd& y,
                     const Options& options, int& steps,
                     const std::function<bool(const VectorXd&)>& stop) {
  const Index m = y.size();
  VectorXd grad(m);
  MatrixXd hess(m, m);
  double current_logdet = log_det_sum(blocks, y);
  if (!std::isfinite(current_logdet)) return {false, false};

  for (int it = 0; it < options.max_newton_steps; ++it) {
    barrier_derivatives(blocks, y, grad, hess);
    grad += t * cost;
    const double ridge = 1e-14 * std::max(1.0, hess.diagonal().cwiseAbs().maxCoeff());
    hess.diagonal().array() += ridge;
    Eigen::LDLT<MatrixXd> ldlt(hess);
    const VectorXd step = -ldlt.solve(grad);
    if (!step.allFinite()) return {false, false};
    const double decrement = -grad.dot(step);
    ++steps;
    if (decrement < 0.0 || decrement * 0.5 <= 1e-12) break;

    // Damped step; objective change computed as a difference to avoid
    // cancellation in t c^T y at large t.
    double alpha = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 80; ++ls) {
      const VectorXd trial = y + alpha * step;
      const double trial_logdet = log_det_sum(blocks, trial);
      if (std::isfinite(trial_logdet)) {
        const double change =
            t * alpha * cost.dot(step) - (trial_logdet - current_logdet);
        if (change <= 0.25 * alpha * grad.dot(step) || decrement < 1e-9) {
          y = trial;
          current_logdet = trial_logdet;
          accepted = true;
          break;
        }
      }
      alpha *= 0.5;
    }
    if (!accepted) break;
    if (stop && stop(y)) return {true, true};
  }
  return {true, false};
}

/// Block [[R, y^T], [y, R I]] >= 0, i.e. |y| <= R.
AffineMatrix ball_block(Index variables, Index active, double radius) {
  AffineMatrix ball(active + 1, variables);
  ball.constant = radius * MatrixXd::Identity(active + 1, active + 1);
  for (Index i = 0; i < active; ++i) {
    ball.coefficients[i](0, i + 1) = 1.0;
    ball.coefficients[i](i + 1, 0) = 1.0;
  }
  return ball;
}

double block_min_eigenvalue(const Blocks& blocks, const VectorXd& y) {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& b : blocks) {
    const MatrixXd f = b.at(y);
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(0.5 * (f + f.transpose()), Eigen::EigenvaluesOnly);
    lo = std::min(lo, eig.eigenvalues().minCoeff());
  }
  return lo;
}

}  // namespace

AffineMatrix::AffineMatrix(Index size, Index variables)
    : constant(MatrixXd::Zero(size, size)),
      coefficients(static_cast<std::size_t>(variables), MatrixXd::Zero(size, size)) {}

MatrixXd AffineMatrix::at(const VectorXd& y) const {
  MatrixXd out = constant;
  for (std::size_t i = 0; i < coefficients.size(); ++i) {
    if (y(static_cast<Index>(i)) != 0.0) out += y(static_cast<Index>(i)) * coefficients[i];
  }
  return out;
}

const char* to_string(Status status) {
  switch (status) {
    case Status::kOptimal:
      return "optimal";
    case Status::kFeasible:
      return "feasible";
    case Status::kInfeasible:
      return "infeasible";
    case Status::kFailed:
      return "failed";
  }
  return "unknown";
}

double min_eigenvalue(const Problem& problem, const VectorXd& y) {
  return block_min_eigenvalue(problem.constraints, y);
}

Result solve(const Problem& problem, const Options& options) {
  const Index m = problem.variables;
  for (const auto& b : problem.constraints) {
    if (static_cast<Index>(b.coefficients.size()) != m) {
      throw ConfigError("lmi::solve: constraint has the wrong number of coefficients");
    }
  }
  const VectorXd cost = problem.cost.size() == m ? problem.cost : VectorXd::Zero(m);

  // Eliminate equalities: y = particular + basis z.
  VectorXd particular = VectorXd::Zero(m);
  MatrixXd basis = MatrixXd::Identity(m, m);
  if (problem.equality.rows() > 0) {
    if (problem.equality.cols() != m || problem.equality_rhs.size() != problem.equality.rows()) {
      throw ConfigError("lmi::solve: equality constraint shape mismatch");
    }
    Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(problem.equality);
    particular = cod.solve(problem.equality_rhs);
    const double residual = (problem.equality * particular - problem.equality_rhs).norm();
    if (residual > 1e-9 * (1.0 + problem.equality_rhs.norm())) {
      Result r;
      r.status = Status::kInfeasible;
      r.message = "equality constraints are inconsistent";
      return r;
    }
    Eigen::FullPivLU<MatrixXd> lu(problem.equality);
    basis = lu.kernel();
    if (lu.rank() == m) basis.resize(m, 0);
  }
  const Index k = basis.cols();

  Blocks reduced;
  reduced.reserve(problem.constraints.size());
  for (const auto& b : problem.constraints) {
    AffineMatrix r(b.size(), k);
    r.constant = b.at(particular);
    for (Index j = 0; j < k; ++j) {
      for (Index i = 0; i < m; ++i) {
        if (basis(i, j) != 0.0) r.coefficients[j] += basis(i, j) * b.coefficients[i];
      }
    }
    reduced.push_back(std::move(r));
  }
  const VectorXd reduced_cost = basis.transpose() * cost;

  Result result;
  auto lift = [&](const VectorXd& z) { return VectorXd(particular + basis * z); };

  // Phase one: minimize s subject to F_j(z) + s I >= 0 and |z| <= radius.
  Blocks phase_one;
  for (const auto& b : reduced) {
    AffineMatrix p(b.size(), k + 1);
    p.constant = b.constant;
    for (Index j = 0; j < k; ++j) p.coefficients[j] = b.coefficients[j];
    p.coefficients[k] = MatrixXd::Identity(b.size(), b.size());
    phase_one.push_back(std::move(p));
  }
  if (k > 0) phase_one.push_back(ball_block(k + 1, k, options.radius));

  VectorXd zs = VectorXd::Zero(k + 1);
  const double start_min = block_min_eigenvalue(reduced, zs.head(k));
  zs(k) = std::max(0.0, -start_min) + 1.0;
  VectorXd cost_one = VectorXd::Zero(k + 1);
  cost_one(k) = 1.0;

  const double margin = options.feasibility_margin;
  auto strictly_inside = [&](const VectorXd& v) { return v(k) < -margin; };
  bool found = strictly_inside(zs);
  double t = 1.0;
  const double n_one = total_size(phase_one);
  while (!found) {
    const auto out = center(phase_one, cost_one, t, zs, options, result.newton_steps,
                            strictly_inside);
    if (!out.ok) {
      result.status = Status::kFailed;
      result.message = "phase one lost strict feasibility";
      result.phase_one_value = zs(k);
      return result;
    }
    if (strictly_inside(zs)) {
      found = true;
      break;
    }
    if (n_one / t < options.gap_tolerance) break;
    t *= options.barrier_growth;
  }
  result.phase_one_value = zs(k);
  if (!found) {
    result.status = Status::kInfeasible;
    result.y = lift(zs.head(k));
    result.message = "no strictly feasible point (phase-one optimum " +
                     std::to_string(zs(k)) + " >= -margin)";
    return result;
  }

  VectorXd z = zs.head(k);
  if (options.feasibility_only || reduced_cost.isZero(0.0)) {
    result.status = Status::kFeasible;
    result.y = lift(z);
    result.objective = cost.dot(result.y);
    return result;
  }

  // Phase two: barrier path for the actual objective.
  Blocks phase_two = reduced;
  if (k > 0) phase_two.push_back(ball_block(k, k, options.radius));
  const double n_two = total_size(phase_two);
  {
    // Initial weight from the least-squares fit of t c + grad phi = 0 at z.
    VectorXd grad;
    MatrixXd hess;
    barrier_derivatives(phase_two, z, grad, hess);
    hess.diagonal().array() += 1e-14 * std::max(1.0, hess.diagonal().cwiseAbs().maxCoeff());
    Eigen::LDLT<MatrixXd> ldlt(hess);
    const VectorXd hc = ldlt.solve(reduced_cost);
    const double den = reduced_cost.dot(hc);
    const double fit = den > 0.0 ? -hc.dot(grad) / den : 0.0;
    t = std::isfinite(fit) && fit > 0.0 ? std::clamp(fit, 1e-8, 1.0) : 1.0;
  }
  for (int outer = 0; outer < 60; ++outer) {
    const auto out = center(phase_two, reduced_cost, t, z, options, result.newton_steps, {});
    if (!out.ok) {
      result.status = Status::kFailed;
      result.message = "phase two lost strict feasibility";
      result.y = lift(z);
      return result;
    }
    if (n_two / t < options.gap_tolerance) break;
    t *= options.barrier_growth;
  }
  result.status = Status::kOptimal;
  result.y = lift(z);
  result.objective = cost.dot(result.y);
  return result;
}

}  // namespace assosm::lmi
