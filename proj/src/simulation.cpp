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

#include "assosm/simulation.hpp"

#include "assosm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace assosm {

namespace {

/// Streaming version of the run metrics; fed either every step or from a
/// stored history.
class MetricAccumulator {
 public:
  MetricAccumulator(double t_begin, double t_end, double tol)
      : t_begin_(t_begin), t_end_(t_end), tol_(tol) {}

  void add(double t, const Eigen::VectorXd& x, double sigma, double upsilon) {
    const double s = std::abs(sigma);
    const double norm = x.norm();
    if (first_) {
      m_.initial_sigma = sigma;
      m_.initial_state_norm = norm;
      first_ = false;
    }
    if (!(s < tol_)) {
      since_.reset();
      max_after_ = 0.0;
    } else {
      if (!since_) since_ = t;
      max_after_ = std::max(max_after_, s);
    }
    if (t >= t_begin_ + 0.75 * (t_end_ - t_begin_) - 1e-12) {
      m_.tail_state_norm = std::max(m_.tail_state_norm, norm);
    }
    m_.final_sigma = sigma;
    m_.final_state_norm = norm;
    m_.final_gain = upsilon;
    last_ok_ = s < tol_;
  }

  RunMetrics finish() const {
    RunMetrics m = m_;
    if (last_ok_ && since_) {
      m.reaching_time = since_;
      m.max_sigma_after_reaching = max_after_;
    }
    return m;
  }

 private:
  double t_begin_;
  double t_end_;
  double tol_;
  RunMetrics m_;
  bool first_ = true;
  bool last_ok_ = false;
  std::optional<double> since_;
  double max_after_ = 0.0;
};

double tail_slope(const History& h) {
  const std::size_t n = h.size();
  if (n < 3) return 0.0;
  const double t_end = h.time.back();
  const double t_cut = t_end - 0.2 * (t_end - h.time.front());
  double st = 0, sy = 0, stt = 0, sty = 0;
  double count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (h.time[i] < t_cut) continue;
    const double y = h.states[i].norm();
    st += h.time[i];
    sy += y;
    stt += h.time[i] * h.time[i];
    sty += h.time[i] * y;
    count += 1;
  }
  const double den = count * stt - st * st;
  if (count < 2 || den == 0.0) return 0.0;
  return (count * sty - st * sy) / den;
}

struct StepOutput {
  double u = 0.0;
  double nu = 0.0;
  double s2_hat = 0.0;
  double upsilon = 0.0;
};

using Controller = std::function<StepOutput(double t, const Eigen::VectorXd& x, double sigma)>;

LoopResult run_loop(const PlantModel& plant, const DisturbanceSignal& disturbance,
                    const SlidingVariable& sliding, const LoopConfig& config,
                    const Controller& controller, const std::function<void(LoopChecks&)>& extra) {
  const int n = plant.dim();
  if (config.x0.size() != n) throw ConfigError("simulation: x0 dimension mismatch");
  if (sliding.coeff_r.size() != n - 1) throw ConfigError("simulation: sliding variable dimension mismatch");
  if (!(config.dt > 0.0)) throw ConfigError("simulation: dt must be positive");
  if (config.record_every < 1) throw ConfigError("simulation: record_every must be >= 1");
  const std::int64_t steps = step_count(config.horizon, config.dt);
  const double t_end = config.t0 + static_cast<double>(steps) * config.dt;

  LoopResult result;
  History& h = result.history;
  LoopChecks& checks = result.checks;
  MetricAccumulator acc(config.t0, t_end, config.sigma_tol);
  const auto reserve = static_cast<std::size_t>(steps / config.record_every + 2);
  h.time.reserve(reserve);
  h.states.reserve(reserve);

  Eigen::VectorXd x = config.x0;
  double prev_u = 0.0;
  double prev_upsilon = -std::numeric_limits<double>::infinity();
  double prev_sigma = 0.0;
  double prev_s2 = 0.0;
  StepOutput out;

  for (std::int64_t k = 0; k <= steps; ++k) {
    const double t = config.t0 + static_cast<double>(k) * config.dt;
    const double sigma = sliding(x);
    const bool last = k == steps;
    if (!last) {
      out = controller(t, x, sigma);
    }
    const double d = disturbance.value(t);
    const double s2 = sliding.rate(plant_derivative(plant, x, out.u, d));

    if (k > 0) {
      const double du = std::abs(out.u - prev_u);
      if (!last) {
        checks.max_u_rate = std::max(checks.max_u_rate, du / config.dt);
        // Rounding in u itself, not the law, sets the floor.
        const double slack = 8.0 * std::numeric_limits<double>::epsilon() *
                             std::max({1.0, std::abs(out.u), std::abs(prev_u)});
        if (du > out.upsilon * config.dt * (1.0 + 1e-12) + slack) checks.u_lipschitz = false;
      }
      checks.aux_mismatch =
          std::max(checks.aux_mismatch, std::abs((sigma - prev_sigma) / config.dt - prev_s2));
      checks.s2_variation = std::max(checks.s2_variation, std::abs(s2 - prev_s2));
    }
    if (out.upsilon < prev_upsilon) checks.upsilon_monotone = false;
    prev_upsilon = out.upsilon;

    acc.add(t, x, sigma, out.upsilon);
    if (k % config.record_every == 0 || last) {
      h.time.push_back(t);
      h.states.push_back(x);
      h.u.push_back(out.u);
      h.d.push_back(d);
      h.sigma.push_back(sigma);
      h.s2.push_back(s2);
      h.s2_hat.push_back(out.s2_hat);
      h.upsilon.push_back(out.upsilon);
      h.nu.push_back(out.nu);
    }
    if (last) break;

    // The true s2 over this step uses the input held over it.
    prev_sigma = sigma;
    prev_s2 = s2;
    prev_u = out.u;
    x = rk4_step(plant, disturbance, x, out.u, t, config.dt);
    if (!x.allFinite()) {
      throw DivergenceError("closed loop diverged", t + config.dt);
    }
  }
  if (extra) extra(checks);
  result.metrics = acc.finish();
  result.metrics.tail_norm_slope = tail_slope(h);
  return result;
}

}  // namespace

LoopResult simulate_closed_loop(const PlantModel& plant, const DisturbanceSignal& disturbance,
                                const SlidingVariable& sliding, const ControllerParams& params,
                                const LoopConfig& config) {
  params.validate();
  SosmState state = init_sosm(params, sliding(config.x0));
  bool frozen_ok = true;
  const double dt = config.dt;
  auto controller = [&](double, const Eigen::VectorXd&, double sigma) {
    const double before = state.gain.upsilon;
    // theta as it stands once this sample's extremum test has run
    ControlStep step = control_step(state, sigma, dt);
    if (std::abs(sigma) <= std::abs(step.state.gain.theta) && step.state.gain.upsilon != before) {
      frozen_ok = false;
    }
    state = step.state;
    return StepOutput{step.u, step.nu, state.differentiator.s2_hat, state.gain.upsilon};
  };
  return run_loop(plant, disturbance, sliding, config, controller, [&](LoopChecks& c) {
    c.adaptation_frozen_inside_theta = frozen_ok;
    c.extrema = state.extrema;
  });
}

LoopResult simulate_static_feedback(const PlantModel& plant,
                                    const DisturbanceSignal& disturbance,
                                    const SlidingVariable& sliding, double gain,
                                    const LoopConfig& config) {
  auto controller = [gain](double, const Eigen::VectorXd&, double sigma) {
    return StepOutput{-gain * sigma, 0.0, 0.0, 0.0};
  };
  LoopResult r = run_loop(plant, disturbance, sliding, config, controller, {});
  // Lipschitz and gain checks do not apply without the adaptive law.
  r.checks.u_lipschitz = true;
  return r;
}

RunMetrics compute_metrics(const History& history, double sigma_tol) {
  if (history.size() == 0) throw ConfigError("compute_metrics: empty history");
  MetricAccumulator acc(history.time.front(), history.time.back(), sigma_tol);
  for (std::size_t i = 0; i < history.size(); ++i) {
    acc.add(history.time[i], history.states[i], history.sigma[i], history.upsilon[i]);
  }
  RunMetrics m = acc.finish();
  m.tail_norm_slope = tail_slope(history);
  return m;
}

}  // namespace assosm
