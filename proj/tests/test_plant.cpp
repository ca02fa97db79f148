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


#include "assosm/errors.hpp"
#include "assosm/plant.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace assosm;

namespace {

Eigen::VectorXd v2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

InputSource zero_input() {
  return [](double, const Eigen::VectorXd&) { return 0.0; };
}

// x' = lambda x embedded as x1' = lambda x1 + 0 x2 ... with x2 pinned at 0.
PlantModel scalar_growth(double lambda) {
  return PlantModel(Eigen::MatrixXd::Constant(1, 1, lambda), Eigen::VectorXd::Ones(1), 1.0,
                    [](const Eigen::VectorXd&) { return 0.0; });
}

}  // namespace

TEST_CASE("plant_derivative at the published operating points") {
  const auto b1 = benchmark_plant(Benchmark::kPendulum);
  CHECK(plant_derivative(b1.plant, v2(0, 0), 0, 0).norm() == 0.0);
  const Eigen::VectorXd r = plant_derivative(b1.plant, v2(1, 1), 0, 0);
  CHECK(r(0) == doctest::Approx(1.0));
  CHECK(r(1) == doctest::Approx(-10.0 * std::sin(1.0) - 1.0));
  CHECK(r(1) == doctest::Approx(-9.4147).epsilon(1e-4));

  const auto b2 = benchmark_plant(Benchmark::kLinear);
  const Eigen::VectorXd q = plant_derivative(b2.plant, v2(2, 3), 0, 0);
  CHECK(q(0) == doctest::Approx(3.0));
  CHECK(q(1) == doctest::Approx(5.0));

  CHECK_THROWS_AS(plant_derivative(b2.plant, Eigen::VectorXd::Zero(3), 0, 0), ConfigError);
}

TEST_CASE("plant_derivative is affine in u and d") {
  const auto b3 = benchmark_plant(Benchmark::kNonlinear);
  Eigen::VectorXd x(4);
  x << 0.3, -1.2, 2.0, 0.7;
  const auto f = [&](double u, double d) { return plant_derivative(b3.plant, x, u, d); };
  const Eigen::VectorXd lhs = f(1.5 + -0.4, 0.9) - f(1.5, 0.9);
  const Eigen::VectorXd rhs = f(-0.4, 0) - f(0, 0);
  CHECK((lhs - rhs).norm() < 1e-12);
}

TEST_CASE("benchmark plants") {
  const auto b1 = benchmark_plant(Benchmark::kPendulum);
  CHECK(b1.plant.dim() == 2);
  CHECK(b1.plant.upper()(0, 0) == 0.0);
  CHECK(b1.plant.coupling()(0) == 1.0);
  CHECK(b1.plant.input_gain() == 10.0);

  const auto b2 = benchmark_plant(Benchmark::kLinear);
  CHECK(b2.plant.input_gain() == 1.0);
  CHECK(b2.plant.f(v2(0.7, -2.5)) == doctest::Approx(0.7 - 2.5));
  CHECK(b2.disturbance.value(1.3) == doctest::Approx(std::cos(1.3)));

  const auto b3 = benchmark_plant(Benchmark::kNonlinear);
  CHECK(b3.plant.dim() == 4);
  Eigen::MatrixXd a(3, 3);
  a << -1, 1, 0, 0, -1, 1, 0, 0, -1;
  CHECK((b3.plant.upper() - a).norm() == 0.0);
  Eigen::VectorXd c(3);
  c << 0, 0, 1;
  CHECK((b3.plant.coupling() - c).norm() == 0.0);
  CHECK(b3.disturbance.value(0.8) == doctest::Approx(std::tanh(0.8)));

  CHECK_THROWS_AS(parse_benchmark("b4"), ConfigError);
}

TEST_CASE("b2 linearization has the golden-ratio eigenvalue") {
  const auto b2 = benchmark_plant(Benchmark::kLinear);
  Eigen::MatrixXd jac(2, 2);
  jac(0, 0) = b2.plant.upper()(0, 0);
  jac(0, 1) = b2.plant.coupling()(0);
  jac.row(1) = b2.plant.f_gradient(v2(0, 0)).transpose();
  const Eigen::VectorXcd ev = jac.eigenvalues();
  const double top = std::max(ev(0).real(), ev(1).real());
  CHECK(top == doctest::Approx((1.0 + std::sqrt(5.0)) / 2.0).epsilon(1e-12));
}

TEST_CASE("disturbance bounds hold on [0, 50]") {
  for (Benchmark id : {Benchmark::kPendulum, Benchmark::kLinear, Benchmark::kNonlinear}) {
    CHECK(benchmark_plant(id).disturbance.bounds_hold(0.0, 50.0, 1e-3));
  }
}

TEST_CASE("plant invariants are enforced") {
  auto f0 = [](const Eigen::VectorXd&) { return 0.0; };
  CHECK_THROWS_AS(PlantModel(Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Zero(1), 1.0, f0),
                  ConfigError);
  CHECK_THROWS_AS(PlantModel(Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Ones(1), 0.0, f0),
                  ConfigError);
  CHECK_THROWS_AS(PlantModel(Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Ones(1), 1.0,
                             [](const Eigen::VectorXd&) { return 1.0; }),
                  ConfigError);
}

TEST_CASE("integrate: b2 open loop exceeds 100 by t = 2.5") {
  const auto b2 = benchmark_plant(Benchmark::kLinear);
  const Trajectory tr = integrate(b2.plant, v2(2, 3), zero_input(), DisturbanceSignal::zero(), 2.5, 1e-4);
  CHECK(tr.time.back() == doctest::Approx(2.5));
  CHECK(std::abs(tr.states.back()(0)) > 100.0);
  CHECK(std::abs(tr.states.back()(1)) > 100.0);
}

TEST_CASE("integrate: a single step gives two grid points") {
  const auto b1 = benchmark_plant(Benchmark::kPendulum);
  const Trajectory tr = integrate(b1.plant, v2(1, 0), zero_input(), DisturbanceSignal::zero(), 1e-3, 1e-3);
  CHECK(tr.size() == 2);
  CHECK(tr.inputs.size() == 2);
  CHECK(tr.time[1] > tr.time[0]);
}

TEST_CASE("integrate: b2 under the collection feedback stays bounded") {
  const auto b2 = benchmark_plant(Benchmark::kLinear);
  const InputSource fb = [](double, const Eigen::VectorXd& x) { return -2.0 * x(0) - x(1); };
  const Trajectory tr = integrate(b2.plant, v2(2, 3), fb, DisturbanceSignal::zero(), 20.0, 1e-3);
  double sup = 0.0;
  for (const auto& x : tr.states) sup = std::max(sup, x.norm());
  CHECK(sup < 10.0);
}

TEST_CASE("integrate: RK4 error shrinks as dt^4") {
  for (double lambda : {-1.0, 1.6}) {
    const PlantModel p = scalar_growth(lambda);
    auto err = [&](double dt) {
      const Trajectory tr = integrate(p, v2(1, 0), zero_input(), DisturbanceSignal::zero(), 5.0, dt);
      return std::abs(tr.states.back()(0) - std::exp(lambda * 5.0));
    };
    const double e1 = err(0.05);
    const double e2 = err(0.025);
    // Error constant relative to the solution size at t = 5.
    const double c = e1 / (std::pow(0.05, 4) * 5.0 * std::exp(lambda * 5.0));
    CHECK(std::isfinite(c));
    CHECK(c < 1.0);
    CHECK(e1 / e2 == doctest::Approx(16.0).epsilon(0.1));
  }
}

TEST_CASE("integrate: divergence is reported with its time") {
  const PlantModel blowup(Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Ones(1), 1.0,
                          [](const Eigen::VectorXd& x) { return x(1) * x(1) * x(1); });
  try {
    integrate(blowup, v2(0, 10), zero_input(), DisturbanceSignal::zero(), 5.0, 1e-3);
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.time() > 0.0);
    CHECK(e.time() < 5.0);
  }
  const auto b1 = benchmark_plant(Benchmark::kPendulum);
  CHECK_THROWS_AS(integrate(b1.plant, v2(0, 0), zero_input(), DisturbanceSignal::zero(), 1e-4, 1e-3),
                  ConfigError);
}

TEST_CASE("growth diagnostic") {
  const PlantModel zero(Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Ones(1), 1.0,
                        [](const Eigen::VectorXd&) { return 0.0; });
  const GrowthReport z = growth_diagnostic(zero, StateBox::symmetric(2, 3.0), 200);
  CHECK(z.fitted.beta1 == 0.0);
  CHECK(z.fitted.beta2 == 0.0);
  CHECK(z.fitted.beta3 == 0.0);
  CHECK(z.fitted.beta4 == 0.0);

  const auto b1 = benchmark_plant(Benchmark::kPendulum);
  const GrowthReport p = growth_diagnostic(b1.plant, StateBox::symmetric(2, 5.0), 2000);
  // |f| <= 10 + |x| is only approached as |x| grows, so a fit over a bounded
  // box trades a little slope for intercept.
  CHECK(p.fitted.beta1 <= 10.0 + 0.1);
  CHECK(p.fitted.beta2 <= 1.0 + 0.1);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> box(-5.0, 5.0);
  for (int k = 0; k < 2000; ++k) {
    const Eigen::VectorXd x = v2(box(rng), box(rng));
    CHECK(std::abs(b1.plant.f(x)) <= 10.0 + x.norm());
  }
  CHECK(std::isfinite(p.fitted.beta3));
  CHECK(std::isfinite(p.fitted.beta4));
  CHECK_FALSE(p.degrades_with_radius);

  const PlantModel quad(Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Ones(1), 1.0,
                        [](const Eigen::VectorXd& x) { return x(0) * x(0); });
  const GrowthReport q = growth_diagnostic(quad, StateBox::symmetric(2, 8.0), 2000);
  CHECK(q.degrades_with_radius);
  REQUIRE(q.notes.size() == 1);
  CHECK(q.notes[0] == "linear-growth fit degrades with box radius");

  CHECK_THROWS_AS(growth_diagnostic(zero, StateBox::symmetric(2, 1.0), 10), ConfigError);
}

TEST_CASE("upper envelope lies above every point") {
  std::vector<double> r{0, 1, 2, 3, 4}, y{1, 0.5, 2.5, 1, 4.2};
  const EnvelopeFit fit = fit_upper_envelope(r, y);
  for (std::size_t i = 0; i < r.size(); ++i) CHECK(fit.intercept + fit.slope * r[i] >= y[i] - 1e-9);
  CHECK(fit.intercept >= 0.0);
  CHECK(fit.slope >= 0.0);
}
