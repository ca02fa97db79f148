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

#include "assosm/plant.hpp"

#include "assosm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <utility>

namespace assosm {

namespace {

constexpr double kGradientStep = 1e-6;

bool all_finite(const Eigen::VectorXd& v) { return v.allFinite(); }

}  // namespace

PlantModel::PlantModel(Eigen::MatrixXd upper, Eigen::VectorXd coupling, double input_gain,
                       ScalarField nonlinearity, GradientField gradient,
                       std::optional<GrowthConstants> growth)
    : upper_(std::move(upper)),
      coupling_(std::move(coupling)),
      input_gain_(input_gain),
      nonlinearity_(std::move(nonlinearity)),
      gradient_(std::move(gradient)),
      growth_(growth) {
  const auto nr = coupling_.size();
  if (nr < 1) {
    throw ConfigError("PlantModel: state dimension must be at least 2");
  }
  if (upper_.rows() != nr || upper_.cols() != nr) {
    throw ConfigError("PlantModel: upper matrix must be (n-1)x(n-1)");
  }
  if (coupling_.isZero(0.0)) {
    throw ConfigError("PlantModel: coupling vector must be nonzero");
  }
  if (!(input_gain_ > 0.0)) {
    throw ConfigError("PlantModel: input gain must be positive");
  }
  if (!nonlinearity_) {
    throw ConfigError("PlantModel: nonlinearity is required");
  }
  const double f0 = nonlinearity_(Eigen::VectorXd::Zero(nr + 1));
  if (!(std::abs(f0) <= 1e-12)) {
    throw ConfigError("PlantModel: f(0) must vanish");
  }
}

Eigen::VectorXd PlantModel::f_gradient(const Eigen::VectorXd& x) const {
  if (gradient_) {
    return gradient_(x);
  }
  Eigen::VectorXd grad(x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe(i) = x(i) + kGradientStep;
    const double hi = nonlinearity_(probe);
    probe(i) = x(i) - kGradientStep;
    const double lo = nonlinearity_(probe);
    probe(i) = x(i);
    grad(i) = (hi - lo) / (2.0 * kGradientStep);
  }
  return grad;
}

Eigen::VectorXd PlantModel::upper_rate(const Eigen::VectorXd& x) const {
  const auto nr = coupling_.size();
  return upper_ * x.head(nr) + coupling_ * x(nr);
}

Eigen::MatrixXd PlantModel::stacked_upper() const {
  const auto nr = coupling_.size();
  Eigen::MatrixXd s(nr, nr + 1);
  s.col(0) = coupling_;
  s.rightCols(nr) = upper_;
  return s;
}

DisturbanceSignal DisturbanceSignal::zero() {
  return DisturbanceSignal{[](double) { return 0.0; }, [](double) { return 0.0; },
                           std::numeric_limits<double>::min(),
                           std::numeric_limits<double>::min()};
}

bool DisturbanceSignal::bounds_hold(double t_begin, double t_end, double step) const {
  const auto n = static_cast<std::int64_t>(std::floor((t_end - t_begin) / step));
  for (std::int64_t k = 0; k <= n; ++k) {
    const double t = t_begin + static_cast<double>(k) * step;
    if (!(std::abs(value(t)) < value_bound) || !(std::abs(rate(t)) < rate_bound)) {
      return false;
    }
  }
  return true;
}

Eigen::VectorXd plant_derivative(const PlantModel& model, const Eigen::VectorXd& x,
                                 double u, double d) {
  if (x.size() != model.dim()) {
    throw ConfigError("plant_derivative: state has " + std::to_string(x.size()) +
                      " entries, plant has " + std::to_string(model.dim()));
  }
  const auto nr = model.dim() - 1;
  Eigen::VectorXd dx(model.dim());
  dx.head(nr) = model.upper_rate(x);
  dx(nr) = model.f(x) + model.input_gain() * u + d;
  return dx;
}

Eigen::VectorXd rk4_step(const PlantModel& model, const DisturbanceSignal& disturbance,
                         const Eigen::VectorXd& x, double u, double t, double dt) {
  const double half = 0.5 * dt;
  const Eigen::VectorXd k1 = plant_derivative(model, x, u, disturbance.value(t));
  const Eigen::VectorXd k2 =
      plant_derivative(model, x + half * k1, u, disturbance.value(t + half));
  const Eigen::VectorXd k3 =
      plant_derivative(model, x + half * k2, u, disturbance.value(t + half));
  const Eigen::VectorXd k4 =
      plant_derivative(model, x + dt * k3, u, disturbance.value(t + dt));
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

std::int64_t step_count(double horizon, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw ConfigError("integration step must be positive");
  }
  if (!(horizon >= dt * (1.0 - 1e-9))) {
    throw ConfigError("horizon must be at least one step");
  }
  return std::max<std::int64_t>(1, std::llround(horizon / dt));
}

Trajectory integrate(const PlantModel& model, const Eigen::VectorXd& x0,
                     const InputSource& input, const DisturbanceSignal& disturbance,
                     double horizon, double dt, double t0) {
  if (x0.size() != model.dim()) {
    throw ConfigError("integrate: initial state dimension mismatch");
  }
  const std::int64_t steps = step_count(horizon, dt);
  Trajectory traj;
  traj.time.reserve(steps + 1);
  traj.states.reserve(steps + 1);
  traj.inputs.reserve(steps + 1);
  traj.disturbances.reserve(steps + 1);

  Eigen::VectorXd x = x0;
  for (std::int64_t k = 0; k <= steps; ++k) {
    const double t = t0 + static_cast<double>(k) * dt;
    const double u = input ? input(t, x) : 0.0;
    traj.time.push_back(t);
    traj.states.push_back(x);
    traj.inputs.push_back(u);
    traj.disturbances.push_back(disturbance.value(t));
    if (k == steps) {
      break;
    }
    x = rk4_step(model, disturbance, x, u, t, dt);
    if (!all_finite(x)) {
      throw DivergenceError("integrate: state left the representable range", t + dt);
    }
  }
  return traj;
}

Benchmark parse_benchmark(std::string_view id) {
  if (id == "b1") return Benchmark::kPendulum;
  if (id == "b2") return Benchmark::kLinear;
  if (id == "b3") return Benchmark::kNonlinear;
  throw ConfigError("unknown benchmark id '" + std::string(id) + "' (expected b1, b2 or b3)");
}

std::string to_string(Benchmark id) {
  switch (id) {
    case Benchmark::kPendulum:
      return "b1";
    case Benchmark::kLinear:
      return "b2";
    case Benchmark::kNonlinear:
      return "b3";
  }
  return "?";
}

BenchmarkPlant benchmark_plant(Benchmark id) {
  switch (id) {
    case Benchmark::kPendulum: {
      // x1' = x2, x2' = -10 sin(x1) - x2 + 10 u + d
      PlantModel plant(
          Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Ones(1), 10.0,
          [](const Eigen::VectorXd& x) { return -10.0 * std::sin(x(0)) - x(1); },
          [](const Eigen::VectorXd& x) {
            Eigen::VectorXd g(2);
            g << -10.0 * std::cos(x(0)), -1.0;
            return g;
          },
          GrowthConstants{10.0, 1.0, 10.0, 0.0});
      // Stand-in matched disturbance: bounded, bounded rate, non-vanishing.
      DisturbanceSignal d{[](double t) { return 0.8 * std::sin(2.0 * t) + 0.4; },
                          [](double t) { return 1.6 * std::cos(2.0 * t); }, 1.25, 1.65};
      return {std::move(plant), std::move(d)};
    }
    case Benchmark::kLinear: {
      // x1' = x2, x2' = x1 + x2 + u + d
      PlantModel plant(
          Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Ones(1), 1.0,
          [](const Eigen::VectorXd& x) { return x(0) + x(1); },
          [](const Eigen::VectorXd&) {
            Eigen::VectorXd g(2);
            g << 1.0, 1.0;
            return g;
          },
          GrowthConstants{0.0, std::sqrt(2.0), std::sqrt(2.0), 0.0});
      DisturbanceSignal d{[](double t) { return std::cos(t); },
                          [](double t) { return -std::sin(t); }, 1.05, 1.05};
      return {std::move(plant), std::move(d)};
    }
    case Benchmark::kNonlinear: {
      // x_i' = -x_i + x_{i+1} (i = 1..3),
      // x4' = ln(1 + sin^2(x1 x2)) + x3 / (1 + x3^2) + u + d
      Eigen::MatrixXd upper = -Eigen::MatrixXd::Identity(3, 3);
      upper(0, 1) = 1.0;
      upper(1, 2) = 1.0;
      Eigen::VectorXd coupling = Eigen::VectorXd::Zero(3);
      coupling(2) = 1.0;
      PlantModel plant(
          std::move(upper), std::move(coupling), 1.0,
          [](const Eigen::VectorXd& x) {
            const double s = std::sin(x(0) * x(1));
            return std::log1p(s * s) + x(2) / (1.0 + x(2) * x(2));
          },
          [](const Eigen::VectorXd& x) {
            const double p = x(0) * x(1);
            const double s = std::sin(p);
            const double common = std::sin(2.0 * p) / (1.0 + s * s);
            const double q = 1.0 + x(2) * x(2);
            Eigen::VectorXd g(4);
            g << common * x(1), common * x(0), (1.0 - x(2) * x(2)) / (q * q), 0.0;
            return g;
          });
      DisturbanceSignal d{[](double t) { return std::tanh(t); },
                          [](double t) {
                            const double c = std::cosh(t);
                            return 1.0 / (c * c);
                          },
                          1.05, 1.05};
      return {std::move(plant), std::move(d)};
    }
  }
  throw ConfigError("unknown benchmark");
}

StateBox StateBox::symmetric(int dim, double radius) {
  return StateBox{Eigen::VectorXd::Constant(dim, -radius), Eigen::VectorXd::Constant(dim, radius)};
}

StateBox StateBox::scaled(double factor) const {
  return StateBox{lower * factor, upper * factor};
}

EnvelopeFit fit_upper_envelope(const std::vector<double>& radius,
                               const std::vector<double>& value) {
  if (radius.size() != value.size() || radius.empty()) {
    throw ConfigError("fit_upper_envelope: need matching, nonempty samples");
  }
  std::vector<std::size_t> order(radius.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return radius[i] < radius[j] || (radius[i] == radius[j] && value[i] < value[j]);
  });

  // Upper convex hull (monotone chain); its edges are the only feasible
  // lines through two samples.
  std::vector<std::size_t> hull;
  for (std::size_t idx : order) {
    while (hull.size() >= 2) {
      const std::size_t a = hull[hull.size() - 2];
      const std::size_t b = hull.back();
      const double cross = (radius[b] - radius[a]) * (value[idx] - value[a]) -
                           (value[b] - value[a]) * (radius[idx] - radius[a]);
      if (cross >= 0.0) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(idx);
  }

  const double mean_r =
      std::accumulate(radius.begin(), radius.end(), 0.0) / static_cast<double>(radius.size());
  const double tol = 1e-12;

  auto feasible = [&](const EnvelopeFit& fit) {
    if (fit.intercept < -tol || fit.slope < -tol) return false;
    for (std::size_t i = 0; i < radius.size(); ++i) {
      const double env = fit.intercept + fit.slope * radius[i];
      if (env < value[i] - tol * (1.0 + std::abs(value[i]))) return false;
    }
    return true;
  };

  std::vector<EnvelopeFit> candidates;
  candidates.push_back({*std::max_element(value.begin(), value.end()), 0.0});
  double through_origin = 0.0;
  bool origin_ok = true;
  for (std::size_t i = 0; i < radius.size(); ++i) {
    if (radius[i] > 0.0) {
      through_origin = std::max(through_origin, value[i] / radius[i]);
    } else if (value[i] > tol) {
      origin_ok = false;
    }
  }
  if (origin_ok) candidates.push_back({0.0, through_origin});
  for (std::size_t k = 1; k < hull.size(); ++k) {
    const std::size_t a = hull[k - 1];
    const std::size_t b = hull[k];
    const double dr = radius[b] - radius[a];
    if (dr <= 0.0) continue;
    const double slope = (value[b] - value[a]) / dr;
    candidates.push_back({value[a] - slope * radius[a], slope});
  }

  EnvelopeFit best = candidates.front();
  double best_cost = std::numeric_limits<double>::infinity();
  for (auto fit : candidates) {
    fit.intercept = std::max(fit.intercept, 0.0);
    fit.slope = std::max(fit.slope, 0.0);
    if (!feasible(fit)) continue;
    const double cost = fit.intercept + fit.slope * mean_r;
    if (cost < best_cost) {
      best_cost = cost;
      best = fit;
    }
  }
  return best;
}

GrowthReport growth_diagnostic(const PlantModel& model, const StateBox& box, int samples,
                               std::uint64_t seed) {
  const int n = model.dim();
  if (box.lower.size() != n || box.upper.size() != n) {
    throw ConfigError("growth_diagnostic: box dimension mismatch");
  }
  if ((box.upper - box.lower).minCoeff() < 0.0) {
    throw ConfigError("growth_diagnostic: empty box");
  }
  if (samples < 100) {
    throw ConfigError("growth_diagnostic: at least 100 samples required");
  }

  // Unit samples in [0,1]^n, mapped into each (nested) box.
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Eigen::VectorXd> unit_points;
  unit_points.reserve(samples);
  for (int s = 0; s < samples; ++s) {
    Eigen::VectorXd p(n);
    for (int i = 0; i < n; ++i) p(i) = unit(rng);
    unit_points.push_back(std::move(p));
  }

  struct Fits {
    EnvelopeFit value;
    EnvelopeFit gradient;
  };
  auto fit_box = [&](const StateBox& b) {
    std::vector<double> r, fv, gv;
    r.reserve(samples);
    fv.reserve(samples);
    gv.reserve(samples);
    for (const auto& p : unit_points) {
      const Eigen::VectorXd x =
          b.lower.array() + p.array() * (b.upper - b.lower).array();
      const double f = model.f(x);
      const Eigen::VectorXd g = model.f_gradient(x);
      if (!std::isfinite(f) || !all_finite(g)) {
        throw DivergenceError("growth_diagnostic: f is not finite on the box", 0.0);
      }
      r.push_back(x.norm());
      fv.push_back(std::abs(f));
      gv.push_back(g.norm());
    }
    return Fits{fit_upper_envelope(r, fv), fit_upper_envelope(r, gv)};
  };

  GrowthReport report;
  const Fits full = fit_box(box);
  report.fitted = {full.value.intercept, full.value.slope, full.gradient.intercept,
                   full.gradient.slope};
  for (double factor : {0.25, 0.5}) {
    report.nested_value_slopes.push_back(fit_box(box.scaled(factor)).value.slope);
  }
  report.nested_value_slopes.push_back(full.value.slope);

  const double half = report.nested_value_slopes[1];
  const double whole = report.nested_value_slopes[2];
  if (whole > 1e-9 && whole > 1.25 * half) {
    report.degrades_with_radius = true;
    report.notes.emplace_back("linear-growth fit degrades with box radius");
  }
  return report;
}

}  // namespace assosm
