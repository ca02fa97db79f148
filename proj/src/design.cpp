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

#include "assosm/design.hpp"

#include "assosm/errors.hpp"
#include "assosm/kv_file.hpp"
#include "assosm/lmi.hpp"

#include <cmath>
#include <random>
#include <utility>

namespace assosm {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::RowVectorXd;
using Eigen::VectorXd;

MatrixXd symmetrized(const MatrixXd& m) { return 0.5 * (m + m.transpose()); }

MatrixXd stack_gain_q(const RowVectorXd& gain, const MatrixXd& q) {
  MatrixXd kq(q.rows() + 1, q.cols());
  kq.row(0) = gain;
  kq.bottomRows(q.rows()) = q;
  return kq;
}

bool is_spd(const MatrixXd& m) {
  Eigen::LLT<MatrixXd> llt(symmetrized(m));
  return llt.info() == Eigen::Success;
}

}  // namespace

DesignProblem DesignProblem::from(const DesignData& data, const NoiseBound& bound) {
  data.check_shapes();
  DesignProblem p;
  p.upper = data.upper;
  p.last = data.last;
  p.upper_rates = data.upper_rates;
  p.bound = bound;
  return p;
}

void DesignProblem::validate() const {
  const Index nr = upper.rows();
  const Index t = upper.cols();
  if (nr < 1 || t < 1) throw ConfigError("design: empty data");
  if (last.rows() != 1 || last.cols() != t) throw ConfigError("design: O2 must be 1 x T");
  if (upper_rates.rows() != nr || upper_rates.cols() != t) {
    throw ConfigError("design: O1+ must match O1");
  }
  if (bound.gamma_gram.rows() != nr || bound.gamma_gram.cols() != nr) {
    throw ConfigError("design: noise bound has the wrong size");
  }
  if (!(eps_pd > 0.0) || !(kappa1_cap > eps_pd) || !(kappa2_cap > 0.0) ||
      !(gain_cap > 0.0) || !(margin_backoff >= 0.0 && margin_backoff < 1.0)) {
    throw ConfigError("design: bad solver bounds");
  }
}

DesignSolution DesignSolution::from_gain_and_q(RowVectorXd gain, MatrixXd q, double kappa1,
                                               double kappa2) {
  if (q.rows() != q.cols() || gain.size() != q.rows()) {
    throw ConfigError("design solution: K and Q shapes disagree");
  }
  DesignSolution s;
  s.gain = std::move(gain);
  s.q = symmetrized(q);
  if (!is_spd(s.q)) throw ConfigError("design solution: Q is not positive definite");
  s.p = symmetrized(s.q.inverse());
  s.kappa1 = kappa1;
  s.kappa2 = kappa2;
  return s;
}

DesignSolution DesignSolution::from_gain_and_p(RowVectorXd gain, MatrixXd p, double kappa1,
                                               double kappa2) {
  if (p.rows() != p.cols() || gain.size() != p.rows()) {
    throw ConfigError("design solution: K and P shapes disagree");
  }
  DesignSolution s;
  s.gain = std::move(gain);
  s.p = symmetrized(p);
  if (!is_spd(s.p)) throw ConfigError("design solution: P is not positive definite");
  s.q = symmetrized(s.p.inverse());
  s.kappa1 = kappa1;
  s.kappa2 = kappa2;
  return s;
}

double SlidingVariable::operator()(const VectorXd& x) const {
  const Index nr = coeff_r.size();
  return x(nr) + coeff_r.dot(x.head(nr));
}

double SlidingVariable::rate(const VectorXd& x_rate) const {
  const Index nr = coeff_r.size();
  return x_rate(nr) + coeff_r.dot(x_rate.head(nr));
}

MatrixXd build_g(const MatrixXd& upper, const MatrixXd& last) {
  if (upper.cols() != last.cols() || last.rows() != 1) {
    throw ConfigError("build_g: O1 and O2 must have the same column count");
  }
  MatrixXd g(upper.rows() + 1, upper.cols());
  g << last, upper;
  return g;
}

MatrixXd assemble_lmi(const DesignProblem& problem, const RowVectorXd& gain, const MatrixXd& q,
                      double kappa1, double kappa2) {
  problem.validate();
  const Index nr = problem.upper_dim();
  if (gain.size() != nr || q.rows() != nr || q.cols() != nr) {
    throw ConfigError("assemble_lmi: K or Q has the wrong size");
  }
  const MatrixXd g = build_g(problem.upper, problem.last);
  const MatrixXd& rates = problem.upper_rates;
  const Index n = nr + 1;
  MatrixXd out(nr + n, nr + n);
  out.topLeftCorner(nr, nr) =
      kappa1 * MatrixXd::Identity(nr, nr) -
      kappa2 * (rates * rates.transpose() - problem.bound.gamma_gram);
  out.topRightCorner(nr, n) =
      stack_gain_q(gain, q).transpose() + kappa2 * rates * g.transpose();
  out.bottomLeftCorner(n, nr) = out.topRightCorner(nr, n).transpose();
  out.bottomRightCorner(n, n) = -kappa2 * g * g.transpose();
  return out;
}

double max_eigenvalue(const MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(symmetrized(m), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().maxCoeff();
}

DesignSolution solve_design(const DesignProblem& input) {
  input.validate();
  DesignProblem problem = input;
  const Index nr = problem.upper_dim();
  const Index n = nr + 1;

  const MatrixXd g0 = build_g(problem.upper, problem.last);
  if (numerical_rank(g0) < n) {
    throw RankError("design: [O1; O2] is rank deficient, G G^T is singular");
  }

  double scale = 1.0;
  if (problem.prescale) {
    scale = std::max(g0.cwiseAbs().maxCoeff(), problem.upper_rates.cwiseAbs().maxCoeff());
    if (scale > 0.0) {
      problem.upper /= scale;
      problem.last /= scale;
      problem.upper_rates /= scale;
      problem.bound.gamma_gram /= scale * scale;
      problem.kappa2_cap *= scale * scale;
    } else {
      scale = 1.0;
    }
  }

  // Decision vector: [K (nr) | upper triangle of Q | kappa1 | kappa2 | t],
  // t only in the second stage.
  const Index tri = nr * (nr + 1) / 2;
  const Index ik1 = nr + tri;
  const Index ik2 = ik1 + 1;
  const Index it = ik2 + 1;

  const MatrixXd g = build_g(problem.upper, problem.last);
  const MatrixXd& rates = problem.upper_rates;
  const MatrixXd xi2_top = rates * rates.transpose() - problem.bound.gamma_gram;
  const MatrixXd cross = rates * g.transpose();
  const MatrixXd gram = g * g.transpose();
  const Index size = nr + n;

  // Adds Q_ij (and Q_ji) with the given weight at entry (r0 + i, c0 + j) of m.
  auto q_entries = [nr](std::vector<MatrixXd>& coeffs, Index r0, Index c0, double w) {
    Index v = nr;
    for (Index i = 0; i < nr; ++i) {
      for (Index j = i; j < nr; ++j, ++v) {
        coeffs[v](r0 + i, c0 + j) += w;
        if (i != j) coeffs[v](r0 + j, c0 + i) += w;
      }
    }
  };

  auto build = [&](bool second_stage, double kappa1_floor) {
    const Index vars = second_stage ? it + 1 : it;
    lmi::Problem sdp;
    sdp.variables = vars;

    // -L(y) >= 0; [K; Q]^T occupies columns nr.. of the top block.
    lmi::AffineMatrix neg_lmi(size, vars);
    for (Index j = 0; j < nr; ++j) {
      neg_lmi.coefficients[j](j, nr) = -1.0;
      neg_lmi.coefficients[j](nr, j) = -1.0;
    }
    q_entries(neg_lmi.coefficients, 0, nr + 1, -1.0);
    q_entries(neg_lmi.coefficients, nr + 1, 0, -1.0);
    neg_lmi.coefficients[ik1].topLeftCorner(nr, nr) = -MatrixXd::Identity(nr, nr);
    {
      MatrixXd& c = neg_lmi.coefficients[ik2];
      c.topLeftCorner(nr, nr) = xi2_top;
      c.topRightCorner(nr, n) = -cross;
      c.bottomLeftCorner(n, nr) = -cross.transpose();
      c.bottomRightCorner(n, n) = gram;
    }

    // Q >= eps I
    lmi::AffineMatrix q_block(nr, vars);
    q_block.constant = -problem.eps_pd * MatrixXd::Identity(nr, nr);
    q_entries(q_block.coefficients, 0, 0, 1.0);

    // [[c, K], [K^T, c I]] >= 0, i.e. |K| <= c
    lmi::AffineMatrix gain_ball(nr + 1, vars);
    gain_ball.constant = problem.gain_cap * MatrixXd::Identity(nr + 1, nr + 1);
    for (Index j = 0; j < nr; ++j) {
      gain_ball.coefficients[j](0, j + 1) = 1.0;
      gain_ball.coefficients[j](j + 1, 0) = 1.0;
    }

    // floor <= kappa1 <= cap, 0 <= kappa2 <= cap2
    lmi::AffineMatrix scalars(4, vars);
    scalars.constant.diagonal() << -kappa1_floor, problem.kappa1_cap, 0.0, problem.kappa2_cap;
    scalars.coefficients[ik1](0, 0) = 1.0;
    scalars.coefficients[ik1](1, 1) = -1.0;
    scalars.coefficients[ik2](2, 2) = 1.0;
    scalars.coefficients[ik2](3, 3) = -1.0;

    sdp.constraints = {neg_lmi, q_block, gain_ball, scalars};

    // trace(Q) = nr
    sdp.equality = MatrixXd::Zero(1, vars);
    {
      Index v = nr;
      for (Index i = 0; i < nr; ++i) {
        for (Index j = i; j < nr; ++j, ++v) {
          if (i == j) sdp.equality(0, v) = 1.0;
        }
      }
    }
    sdp.equality_rhs = VectorXd::Constant(1, static_cast<double>(nr));

    sdp.cost = VectorXd::Zero(vars);
    if (!second_stage) {
      sdp.cost(ik1) = -1.0;
    } else {
      // [[t, K], [K^T, Q]] >= 0, i.e. K Q^{-1} K^T = (KP) Q (KP)^T <= t
      lmi::AffineMatrix energy(nr + 1, vars);
      energy.coefficients[it](0, 0) = 1.0;
      for (Index j = 0; j < nr; ++j) {
        energy.coefficients[j](0, j + 1) = 1.0;
        energy.coefficients[j](j + 1, 0) = 1.0;
      }
      q_entries(energy.coefficients, 1, 1, 1.0);
      sdp.constraints.push_back(energy);
      sdp.cost(it) = 1.0;
    }
    return sdp;
  };

  auto check = [](const lmi::Result& res, const char* stage) {
    if (res.status == lmi::Status::kInfeasible) {
      throw DesignInfeasibleError(std::string("design LMI has no strictly feasible point (") +
                                      stage + ")",
                                  std::string(lmi::to_string(res.status)) +
                                      ", phase-one value " + format_double(res.phase_one_value));
    }
    if (res.status == lmi::Status::kFailed) {
      throw DesignInfeasibleError("design solver failed: " + res.message,
                                  lmi::to_string(res.status));
    }
  };

  lmi::Options options;
  options.radius = 1e3 * std::max({1.0, problem.kappa2_cap, problem.gain_cap});
  const lmi::Result first = lmi::solve(build(false, problem.eps_pd), options);
  check(first, "decay margin");
  const double kappa1_star = first.y(ik1);

  // Second stage: keep most of the margin, take the smallest virtual gain.
  const double floor = std::max(problem.eps_pd, (1.0 - problem.margin_backoff) * kappa1_star);
  lmi::Result res = lmi::solve(build(true, floor), options);
  std::string stage_note;
  if (res.status != lmi::Status::kOptimal && res.status != lmi::Status::kFeasible) {
    res = first;
    stage_note = "gain-reduction stage failed; using the maximum-margin point";
  }

  const VectorXd& y = res.y;
  RowVectorXd gain = y.head(nr).transpose();
  MatrixXd q(nr, nr);
  {
    Index v = nr;
    for (Index i = 0; i < nr; ++i) {
      for (Index j = i; j < nr; ++j, ++v) {
        q(i, j) = y(v);
        q(j, i) = y(v);
      }
    }
  }
  DesignSolution sol = DesignSolution::from_gain_and_q(gain, q, y(ik1), y(ik2) / (scale * scale));
  sol.eps_pd = problem.eps_pd;
  sol.status = lmi::to_string(res.status);
  sol.lmi_max_eigenvalue =
      max_eigenvalue(assemble_lmi(input, sol.gain, sol.q, sol.kappa1, sol.kappa2));
  if (!stage_note.empty()) sol.warnings.push_back(stage_note);
  if (sol.kappa2 >= 0.99 * input.kappa2_cap) {
    sol.warnings.push_back("kappa2 is at its upper bound; the data may be badly conditioned");
  }
  if (sol.gain.norm() >= 0.99 * problem.gain_cap) {
    sol.warnings.push_back("|K| is at its upper bound");
  }
  if ((sol.p * sol.q - MatrixXd::Identity(nr, nr)).cwiseAbs().maxCoeff() > 1e-8) {
    sol.warnings.push_back("P Q deviates from identity by more than 1e-8");
  }
  return sol;
}

MatrixXd certificate_xi1(const DesignSolution& solution) {
  const Index nr = solution.p.rows();
  const Index n = nr + 1;
  const MatrixXd coupling = stack_gain_q(solution.gain, solution.p.inverse());
  MatrixXd xi1 = MatrixXd::Zero(nr + n, nr + n);
  xi1.topLeftCorner(nr, nr) = solution.kappa1 * MatrixXd::Identity(nr, nr);
  xi1.topRightCorner(nr, n) = coupling.transpose();
  xi1.bottomLeftCorner(n, nr) = coupling;
  return xi1;
}

MatrixXd certificate_xi2(const DesignProblem& problem) {
  const Index nr = problem.upper_dim();
  const Index n = nr + 1;
  const MatrixXd g = build_g(problem.upper, problem.last);
  const MatrixXd& rates = problem.upper_rates;
  MatrixXd xi2(nr + n, nr + n);
  xi2.topLeftCorner(nr, nr) = rates * rates.transpose() - problem.bound.gamma_gram;
  xi2.topRightCorner(nr, n) = -rates * g.transpose();
  xi2.bottomLeftCorner(n, nr) = xi2.topRightCorner(nr, n).transpose();
  xi2.bottomRightCorner(n, n) = g * g.transpose();
  return xi2;
}

CertificateReport verify_certificate(const DesignProblem& problem, const DesignSolution& solution,
                                     const std::optional<OracleContext>& oracle,
                                     double tolerance) {
  problem.validate();
  const Index nr = problem.upper_dim();
  if (solution.p.rows() != nr || solution.gain.size() != nr) {
    throw ConfigError("verify_certificate: solution does not match the data dimension");
  }
  CertificateReport report;
  const MatrixXd combined = certificate_xi1(solution) - solution.kappa2 * certificate_xi2(problem);
  report.certificate_max_eigenvalue = max_eigenvalue(combined);
  report.certificate_ok = report.certificate_max_eigenvalue <= tolerance;
  if (!report.certificate_ok) {
    report.messages.push_back("Xi1 - kappa2 Xi2 has eigenvalue " +
                              format_double(report.certificate_max_eigenvalue));
  }
  if (solution.kappa2 < 0.0) {
    report.certificate_ok = false;
    report.messages.push_back("negative S-procedure multiplier");
  }

  if (!oracle || oracle->plant == nullptr) return report;
  const PlantModel& plant = *oracle->plant;
  if (plant.dim() != nr + 1) throw ConfigError("verify_certificate: oracle plant dimension mismatch");

  const MatrixXd closed = plant.upper() + plant.coupling() * solution.virtual_gain();
  {
    Eigen::EigenSolver<MatrixXd> es(closed, false);
    report.closed_loop_spectral_abscissa = es.eigenvalues().real().maxCoeff();
  }

  report.lyapunov_checked = true;
  report.lyapunov_ok = true;
  report.worst_lyapunov_margin = -std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(oracle->seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const MatrixXd& p = solution.p;
  for (int s = 0; s < oracle->samples; ++s) {
    VectorXd x(nr);
    for (Index i = 0; i < nr; ++i) x(i) = normal(rng);
    x.normalize();
    const VectorXd px = p * x;
    const double vdot = 2.0 * px.dot(closed * x);
    const double margin = vdot + solution.kappa1 * px.squaredNorm();
    if (margin > report.worst_lyapunov_margin) {
      report.worst_lyapunov_margin = margin;
      report.worst_state = x;
    }
  }
  if (report.worst_lyapunov_margin > oracle->slack) {
    report.lyapunov_ok = false;
    report.messages.push_back("Lyapunov decrease violated by " +
                              format_double(report.worst_lyapunov_margin));
  }

  // Realized noise implied by the hidden plant: Psi = O1+ - S G.
  const MatrixXd psi = problem.upper_rates - plant.stacked_upper() * build_g(problem.upper, problem.last);
  if (oracle->realized_noise) {
    const MatrixXd& given = *oracle->realized_noise;
    if (given.rows() != psi.rows() || given.cols() != psi.cols() ||
        (given - psi).cwiseAbs().maxCoeff() > 1e-6 * (1.0 + psi.cwiseAbs().maxCoeff())) {
      report.messages.push_back("recorded noise disagrees with O1+ - S G");
    }
  }
  // [I; Psi^T]^T [[-gg^T, 0], [0, I]] [I; Psi^T] <= 0
  report.noise_checked = true;
  report.noise_max_eigenvalue = max_eigenvalue(psi * psi.transpose() - problem.bound.gamma_gram);
  report.noise_ok = report.noise_max_eigenvalue <= 1e-10;
  if (!report.noise_ok) {
    report.messages.push_back("realized noise exceeds the declared energy bound by " +
                              format_double(report.noise_max_eigenvalue));
  }
  return report;
}

SlidingVariable sliding_variable(const DesignSolution& solution) {
  return SlidingVariable{-solution.virtual_gain()};
}

ClassicalResult classical_design(const DesignData& data) {
  data.check_shapes();
  if (!data.last_rates) {
    throw ConfigError("classical_design: needs x_n derivative data");
  }
  if (data.inputs.size() != data.samples()) {
    throw ConfigError("classical_design: needs input samples");
  }
  const Index nr = data.upper_dim();
  const Index n = nr + 1;
  const Index t = data.samples();

  MatrixXd x0(n, t), x1(n, t);
  x0 << data.upper, data.last;
  x1 << data.upper_rates, *data.last_rates;
  const MatrixXd& u = data.inputs;

  ClassicalResult result;
  MatrixXd augmented(n + 1, t);
  augmented << x0, u;
  result.augmented_rank = numerical_rank(augmented);
  result.rank_ok = result.augmented_rank == n + 1;
  if (!result.rank_ok) {
    result.warnings.push_back("rank [X0; U] = " + std::to_string(result.augmented_rank) +
                              " < n + 1 = " + std::to_string(n + 1) +
                              "; the result may be degenerate");
  }

  // Is the input a static state feedback of the recorded states?
  {
    Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(x0.transpose());
    const RowVectorXd f = cod.solve(u.transpose()).transpose();
    if ((u - f * x0).norm() <= 1e-9 * std::max(1.0, u.norm())) {
      result.input_is_state_feedback = true;
      result.collection_feedback = f;
      result.warnings.push_back("input samples are a state feedback of the recorded states");
    }
  }

  // vec(Q), column-major: Q(r, c) -> r + c t.
  const Index vars = t * n;
  auto var = [t](Index r, Index c) { return r + c * t; };

  lmi::AffineMatrix decay(n, vars);   // -(X1 Q + Q^T X1^T)
  lmi::AffineMatrix gram(n, vars);    // sym(X0 Q)
  for (Index r = 0; r < t; ++r) {
    for (Index c = 0; c < n; ++c) {
      MatrixXd e = MatrixXd::Zero(t, n);
      e(r, c) = 1.0;
      const MatrixXd a = x1 * e;
      decay.coefficients[var(r, c)] = -(a + a.transpose());
      const MatrixXd b = x0 * e;
      gram.coefficients[var(r, c)] = 0.5 * (b + b.transpose());
    }
  }

  // X0 Q symmetric and trace(X0 Q) = 1 (the conditions are homogeneous).
  const Index pairs = n * (n - 1) / 2;
  MatrixXd eq = MatrixXd::Zero(pairs + 1, vars);
  VectorXd rhs = VectorXd::Zero(pairs + 1);
  for (Index r = 0; r < t; ++r) {
    for (Index c = 0; c < n; ++c) {
      MatrixXd e = MatrixXd::Zero(t, n);
      e(r, c) = 1.0;
      const MatrixXd b = x0 * e;
      Index row = 0;
      for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j, ++row) eq(row, var(r, c)) = b(i, j) - b(j, i);
      }
      eq(pairs, var(r, c)) = b.trace();
    }
  }
  rhs(pairs) = 1.0;

  lmi::Problem sdp;
  sdp.variables = vars;
  sdp.constraints = {decay, gram};
  sdp.equality = eq;
  sdp.equality_rhs = rhs;
  lmi::Options options;
  options.feasibility_only = true;
  options.feasibility_margin = 1e-7;
  const lmi::Result res = lmi::solve(sdp, options);
  result.solver_status = lmi::to_string(res.status);
  if (res.status != lmi::Status::kFeasible) {
    result.warnings.push_back("classical LMI infeasible (phase-one value " +
                              format_double(res.phase_one_value) + ")");
    return result;
  }
  const MatrixXd q = Eigen::Map<const MatrixXd>(res.y.data(), t, n);
  const MatrixXd x0q = x0 * q;
  result.gain = u * q * x0q.inverse();
  result.feasible = true;
  return result;
}

void write_solution(const std::filesystem::path& file, const DesignSolution& solution) {
  KvFile kv;
  kv.set("n_r", static_cast<std::int64_t>(solution.p.rows()));
  kv.set("K", MatrixXd(solution.gain));
  kv.set("Q", solution.q);
  kv.set("P", solution.p);
  kv.set("kappa1", solution.kappa1);
  kv.set("kappa2", solution.kappa2);
  kv.set("eps_pd", solution.eps_pd);
  kv.set("lmi_max_eigenvalue", solution.lmi_max_eigenvalue);
  kv.set("status", solution.status.empty() ? std::string("unknown") : solution.status);
  kv.save(file);
}

DesignSolution read_solution(const std::filesystem::path& file) {
  const KvFile kv = KvFile::load(file);
  const Index nr = kv.get_int("n_r");
  const auto k = kv.get_list("K");
  const auto q = kv.get_list("Q");
  if (nr < 1 || static_cast<Index>(k.size()) != nr || static_cast<Index>(q.size()) != nr * nr) {
    throw ConfigError(file.string() + ": K/Q sizes do not match n_r");
  }
  RowVectorXd gain = Eigen::Map<const RowVectorXd>(k.data(), nr);
  MatrixXd qm = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                               Eigen::RowMajor>>(q.data(), nr, nr);
  DesignSolution sol = DesignSolution::from_gain_and_q(std::move(gain), std::move(qm),
                                                       kv.get_double("kappa1"),
                                                       kv.get_double("kappa2"));
  if (kv.has("P")) {
    const auto p = kv.get_list("P");
    if (static_cast<Index>(p.size()) == nr * nr) {
      sol.p = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                             Eigen::RowMajor>>(p.data(), nr, nr);
    }
  }
  sol.eps_pd = kv.get_double("eps_pd", 1e-6);
  sol.lmi_max_eigenvalue = kv.get_double("lmi_max_eigenvalue", 0.0);
  sol.status = kv.find("status").value_or("unknown");
  return sol;
}

}  // namespace assosm
