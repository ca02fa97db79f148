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


#include "assosm/report.hpp"

#include "assosm/errors.hpp"
#include "assosm/sosm.hpp"

#include <cmath>
#include <algorithm>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

namespace assosm {

double non_adaptive_threshold(double delta_bar, double lambda_lower, double lambda_upper) {
  if (!(lambda_lower > 0.0) || !(3.0 * lambda_lower > lambda_upper)) {
    throw ConfigError("non_adaptive_threshold: need 0 < lambda_lower and 3 lambda_lower > lambda_upper");
  }
  if (delta_bar < 0.0) throw ConfigError("non_adaptive_threshold: negative delta bound");
  return std::max(delta_bar / lambda_lower, 4.0 * delta_bar / (3.0 * lambda_lower - lambda_upper));
}

BoundReport bound_report(const PlantModel& plant, const Eigen::RowVectorXd& virtual_gain,
                         const BoundBox& box, int samples, std::uint64_t seed) {
  const int n = plant.dim();
  if (box.states.lower.size() != n || box.states.upper.size() != n) {
    throw ConfigError("bound_report: box dimension mismatch");
  }
  if (samples < 1) throw ConfigError("bound_report: samples must be positive");
  if (box.input_bound < 0.0 || box.disturbance_bound < 0.0 || box.rate_bound < 0.0) {
    throw ConfigError("bound_report: negative bound");
  }

  BoundReport r;
  r.lambda_lower = plant.input_gain();
  r.lambda_upper = plant.input_gain();
  r.worst_state = Eigen::VectorXd::Zero(n);

  auto visit = [&](const Eigen::VectorXd& unit, double u, double d, double dr) {
    const Eigen::VectorXd x =
        box.states.lower.array() + unit.array() * (box.states.upper - box.states.lower).array();
    const double delta = std::abs(aux_oracle_eval(plant, virtual_gain, x, u, d, dr).delta);
    if (!std::isfinite(delta)) throw DivergenceError("bound_report: Delta not finite", 0.0);
    if (delta > r.delta_bar) {
      r.delta_bar = delta;
      r.worst_state = x;
    }
  };

  // Corners with the extreme input/disturbance signs first.
  if (n <= 12) {
    for (long mask = 0; mask < (1L << n); ++mask) {
      Eigen::VectorXd unit(n);
      for (int i = 0; i < n; ++i) unit(i) = (mask >> i) & 1 ? 1.0 : 0.0;
      for (int s = 0; s < 8; ++s) {
        visit(unit, (s & 1 ? 1 : -1) * box.input_bound, (s & 2 ? 1 : -1) * box.disturbance_bound,
              (s & 4 ? 1 : -1) * box.rate_bound);
      }
    }
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit01(0.0, 1.0);
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  for (int k = 0; k < samples; ++k) {
    Eigen::VectorXd unit(n);
    for (int i = 0; i < n; ++i) unit(i) = unit01(rng);
    const double u = sym(rng) * box.input_bound;
    const double d = sym(rng) * box.disturbance_bound;
    const double dr = sym(rng) * box.rate_bound;
    visit(unit, u, d, dr);
  }
  r.threshold = non_adaptive_threshold(r.delta_bar, r.lambda_lower, r.lambda_upper);
  return r;
}

SweepReport semi_global_sweep(const PlantModel& plant, const DisturbanceSignal& disturbance,
                              const SlidingVariable& sliding, const ControllerParams& params,
                              LoopConfig config, const Eigen::VectorXd& direction,
                              const std::vector<double>& radii) {
  if (direction.size() != plant.dim()) throw ConfigError("semi_global_sweep: direction size");
  const double scale = direction.cwiseAbs().maxCoeff();
  if (!(scale > 0.0)) throw ConfigError("semi_global_sweep: zero direction");

  SweepReport rep;
  rep.all_converged = true;
  rep.gain_non_decreasing = true;
  for (double radius : radii) {
    SweepPoint p;
    p.radius = radius;
    config.x0 = direction * (radius / scale);
    p.initial_norm = config.x0.norm();
    try {
      const LoopResult res = simulate_closed_loop(plant, disturbance, sliding, params, config);
      p.reaching_time = res.metrics.reaching_time;
      p.final_norm = res.metrics.final_state_norm;
      p.final_gain = res.metrics.final_gain;
      p.converged = p.reaching_time.has_value() && p.final_norm < 0.1 * p.initial_norm;
    } catch (const DivergenceError& e) {
      p.failure = e.what();
      p.final_norm = std::numeric_limits<double>::infinity();
    }
    if (!p.converged) rep.all_converged = false;
    if (!rep.points.empty() && p.final_gain < rep.points.back().final_gain) {
      rep.gain_non_decreasing = false;
    }
    rep.points.push_back(std::move(p));
  }
  return rep;
}

DisturbanceProbe disturbance_probe(const PlantModel& plant, const DisturbanceSignal& disturbance,
                                   const SlidingVariable& sliding, const ControllerParams& params,
                                   const LoopConfig& config, double static_gain) {
  DisturbanceProbe p;
  p.static_gain = static_gain;
  try {
    p.adaptive_residual =
        simulate_closed_loop(plant, disturbance, sliding, params, config).metrics.tail_state_norm;
  } catch (const DivergenceError&) {
    p.adaptive_diverged = true;
    p.adaptive_residual = std::numeric_limits<double>::infinity();
  }
  try {
    p.static_residual = simulate_static_feedback(plant, disturbance, sliding, static_gain, config)
                            .metrics.tail_state_norm;
  } catch (const DivergenceError&) {
    p.static_diverged = true;
    p.static_residual = std::numeric_limits<double>::infinity();
  }
  return p;
}

namespace {

std::string vec(const Eigen::VectorXd& v) {
  std::ostringstream os;
  os << std::setprecision(6) << "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v(i);
  os << "]";
  return os.str();
}

const char* yes_no(bool b) { return b ? "yes" : "no"; }

}  // namespace

std::string format_certificate(const CertificateReport& r) {
  std::ostringstream os;
  os << std::setprecision(6);
  os << "certificate max eigenvalue: " << r.certificate_max_eigenvalue << " ("
     << (r.certificate_ok ? "ok" : "FAILED") << ")\n";
  if (r.lyapunov_checked) {
    os << "lyapunov worst margin: " << r.worst_lyapunov_margin << " at " << vec(r.worst_state)
       << " (" << (r.lyapunov_ok ? "ok" : "FAILED") << ")\n";
    os << "closed-loop spectral abscissa: " << r.closed_loop_spectral_abscissa << "\n";
  }
  if (r.noise_checked) {
    os << "realized noise vs bound, max eigenvalue: " << r.noise_max_eigenvalue << " ("
       << (r.noise_ok ? "ok" : "FAILED") << ")\n";
  }
  for (const auto& m : r.messages) os << "note: " << m << "\n";
  return os.str();
}

std::string format_metrics(const RunMetrics& m, const LoopChecks& c) {
  std::ostringstream os;
  os << std::setprecision(6);
  os << "reaching time: ";
  if (m.reaching_time) {
    os << *m.reaching_time << " s\n";
  } else {
    os << "not reached\n";
  }
  os << "sigma initial/final: " << m.initial_sigma << " / " << m.final_sigma << "\n"
     << "max |sigma| after reaching: " << m.max_sigma_after_reaching << "\n"
     << "|x| initial/final: " << m.initial_state_norm << " / " << m.final_state_norm << "\n"
     << "max |x| over last quarter: " << m.tail_state_norm << "\n"
     << "|x| slope over last 20%: " << m.tail_norm_slope << "\n"
     << "final gain: " << m.final_gain << "\n"
     << "gain monotone: " << yes_no(c.upsilon_monotone) << "\n"
     << "adaptation frozen inside theta: " << yes_no(c.adaptation_frozen_inside_theta) << "\n"
     << "u Lipschitz with final gain: " << yes_no(c.u_lipschitz) << " (max |du/dt| "
     << c.max_u_rate << ")\n"
     << "extrema detected: " << c.extrema << "\n";
  return os.str();
}

std::string format_bound(const BoundReport& r) {
  std::ostringstream os;
  os << std::setprecision(6);
  os << "sampled sup |Delta|: " << r.delta_bar << " at " << vec(r.worst_state) << "\n"
     << "Lambda lower/upper: " << r.lambda_lower << " / " << r.lambda_upper << "\n"
     << "non-adaptive gain threshold: " << r.threshold << "\n";
  if (r.final_gain) os << "final adaptive gain: " << *r.final_gain << "\n";
  return os.str();
}

std::string format_classical(const ClassicalResult& r) {
  std::ostringstream os;
  os << std::setprecision(6);
  os << "rank [x; u]: " << r.augmented_rank << (r.rank_ok ? " (full)" : " (deficient)") << "\n";
  if (r.input_is_state_feedback) {
    os << "collection input is state feedback F = " << vec(r.collection_feedback.transpose())
       << "\n";
  }
  os << "classical design: " << (r.feasible ? "feasible" : "not available") << " ("
     << r.solver_status << ")\n";
  if (r.feasible) os << "classical gain: " << vec(r.gain.transpose()) << "\n";
  for (const auto& w : r.warnings) os << "note: " << w << "\n";
  return os.str();
}

std::string format_growth(const GrowthReport& r) {
  std::ostringstream os;
  os << std::setprecision(6);
  os << "|f| <= " << r.fitted.beta1 << " + " << r.fitted.beta2 << " |x|\n"
     << "|grad f| <= " << r.fitted.beta3 << " + " << r.fitted.beta4 << " |x|\n"
     << "value slopes on nested boxes: " << vec(Eigen::Map<const Eigen::VectorXd>(
                                                r.nested_value_slopes.data(),
                                                static_cast<Eigen::Index>(r.nested_value_slopes.size())))
     << "\n";
  for (const auto& n : r.notes) os << "note: " << n << "\n";
  return os.str();
}

}  // namespace assosm
