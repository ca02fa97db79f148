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
#include "assosm/plant.hpp"

#include "fixtures.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

using namespace assosm;
namespace fs = std::filesystem;

namespace {

Eigen::VectorXd v2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

ExperimentConfig config(double tau, int samples, InputSource input) {
  ExperimentConfig c;
  c.tau = tau;
  c.samples = samples;
  c.input = std::move(input);
  return c;
}

}  // namespace

TEST_CASE("collect: pendulum experiment shapes") {
  const auto b1 = benchmark_plant(Benchmark::kPendulum);
  ExperimentConfig c = config(0.1, 3, [](double t, const Eigen::VectorXd&) { return 0.1 * std::cos(t); });
  c.noise = NoiseSpec::uniform(0.5);
  c.mode = DerivativeMode::kExactPlusNoise;
  const DataSet ds = collect(b1.plant, b1.disturbance, v2(1, 1), c);
  const DesignData& v = ds.design_view();
  CHECK(v.upper.rows() == 1);
  CHECK(v.upper.cols() == 3);
  CHECK(v.last.cols() == 3);
  CHECK(v.upper_rates.cols() == 3);
  CHECK(v.inputs(0, 0) == doctest::Approx(0.1));
  CHECK(v.upper(0, 0) == 1.0);
  CHECK(ds.realized_noise().cwiseAbs().maxCoeff() <= 0.5);
  CHECK(ds.disturbance_samples().cols() == 3);
  // Three columns for n = 2 is exactly 2n - 1: no warning.
  CHECK(ds.warnings.empty());
}

TEST_CASE("collect: exact mode without noise reproduces the upper dynamics") {
  const auto b3 = benchmark_plant(Benchmark::kNonlinear);
  ExperimentConfig c = config(0.5, 8, [](double t, const Eigen::VectorXd&) { return -std::sin(t); });
  c.mode = DerivativeMode::kExactPlusNoise;
  Eigen::VectorXd x0(4);
  x0 << 7, -7, 3.5, -3.5;
  const DataSet ds = collect(b3.plant, b3.disturbance, x0, c);
  const DesignData& v = ds.design_view();
  const Eigen::MatrixXd expect = b3.plant.upper() * v.upper + b3.plant.coupling() * v.last;
  CHECK((v.upper_rates - expect).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(ds.realized_noise().cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("collect: feedback-collected b2 inputs are a fixed combination of the states") {
  const auto b2 = benchmark_plant(Benchmark::kLinear);
  const ExperimentConfig c =
      config(0.5, 3, [](double, const Eigen::VectorXd& x) { return -2.0 * x(0) - x(1); });
  const DataSet ds = collect(b2.plant, b2.disturbance, v2(2, 3), c);
  const DesignData& v = ds.design_view();
  const Eigen::MatrixXd combo = -2.0 * v.upper - v.last;
  CHECK((v.inputs - combo).cwiseAbs().maxCoeff() < 1e-14);
  const RankReport r = rank_check(v);
  CHECK(r.ours);
  CHECK_FALSE(r.classical);
}

TEST_CASE("collect: warns below 2n - 1 samples and rejects bad settings") {
  const auto b1 = benchmark_plant(Benchmark::kPendulum);
  const DataSet ds = collect(b1.plant, b1.disturbance, v2(1, 1),
                             config(0.1, 2, [](double, const Eigen::VectorXd&) { return 0.0; }));
  CHECK(ds.warnings.size() == 1);
  CHECK_THROWS_AS(collect(b1.plant, b1.disturbance, v2(1, 1),
                          config(0.0, 3, [](double, const Eigen::VectorXd&) { return 0.0; })),
                  ConfigError);
  CHECK_THROWS_AS(collect(b1.plant, b1.disturbance, Eigen::VectorXd::Ones(3),
                          config(0.1, 3, [](double, const Eigen::VectorXd&) { return 0.0; })),
                  ConfigError);
}

TEST_CASE("forward_difference") {
  Eigen::MatrixXd ramp(1, 5), square(1, 2), flat = Eigen::MatrixXd::Constant(2, 4, 3.0);
  for (int k = 0; k < 5; ++k) ramp(0, k) = 0.3 * k;
  const Eigen::MatrixXd r = forward_difference(ramp, 0.3);
  CHECK(r.cols() == 4);
  for (int k = 0; k < 4; ++k) CHECK(r(0, k) == doctest::Approx(1.0).epsilon(1e-15));
  square << 0.0, 0.01;
  CHECK(forward_difference(square, 0.1)(0, 0) == doctest::Approx(0.1));
  CHECK(forward_difference(flat, 0.2).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(forward_difference(Eigen::MatrixXd::Ones(1, 1), 0.1), ConfigError);
}

TEST_CASE("forward-difference noise obeys the Taylor remainder") {
  // x1' = x2, so |x1''| = |x2'| bounds the remainder.
  const auto b2 = benchmark_plant(Benchmark::kLinear);
  const InputSource in = [](double t, const Eigen::VectorXd&) { return std::sin(3.0 * t); };
  const double tau = 0.2;
  const int samples = 6;
  const DataSet ds = collect(b2.plant, b2.disturbance, v2(0.5, -0.3), config(tau, samples, in));
  const Trajectory fine = integrate(b2.plant, v2(0.5, -0.3), in, b2.disturbance, tau * samples, 1e-4);
  double m = 0.0;
  for (std::size_t k = 0; k < fine.size(); ++k) {
    m = std::max(m, std::abs(plant_derivative(b2.plant, fine.states[k], fine.inputs[k],
                                              fine.disturbances[k])(1)));
  }
  CHECK(ds.realized_noise().cwiseAbs().maxCoeff() <= m * tau / 2.0 * (1.0 + 1e-6));
}

TEST_CASE("rank_check") {
  const DesignData pub = fixtures::pendulum_data();
  const RankReport r = rank_check(pub);
  CHECK(r.ours);
  CHECK(r.state_rank == 2);

  const RankReport l = rank_check(fixtures::linear_data());
  CHECK(l.ours);
  CHECK_FALSE(l.classical);
  CHECK(l.augmented_rank == 2);

  DesignData same = pub;
  same.upper = fixtures::row({1, 1, 1});
  same.last = fixtures::row({2, 2, 2});
  CHECK_FALSE(rank_check(same).ours);

  // Recombining the inputs cannot change the state rank.
  DesignData mixed = pub;
  mixed.inputs = fixtures::row({5, -3, 0.25});
  CHECK(rank_check(mixed).ours == r.ours);
  CHECK(rank_check(mixed).state_rank == r.state_rank);
}

TEST_CASE("noise_bound_uniform reproduces the published gamma gamma^T") {
  CHECK(noise_bound_uniform(0.5, 1, 3).gamma_gram(0, 0) == 0.75);
  CHECK(noise_bound_uniform(1.0, 1, 3).gamma_gram(0, 0) == 3.0);
  const NoiseBound b3 = noise_bound_uniform(0.1, 3, 15);
  CHECK(b3.gamma_gram == 0.45 * Eigen::MatrixXd::Identity(3, 3));
  CHECK(b3.psi_bar == doctest::Approx(0.03));
  CHECK_THROWS_AS(noise_bound_uniform(-0.1, 1, 3), ConfigError);
  CHECK_THROWS_AS(noise_bound_uniform(0.1, 0, 3), ConfigError);
}

TEST_CASE("verify_noise_energy") {
  const NoiseBound b = noise_bound_uniform(0.5, 1, 3);
  CHECK(verify_noise_energy(Eigen::MatrixXd::Zero(1, 3), b));

  const NoiseBound one = noise_bound_uniform(0.5, 1, 1);
  CHECK(verify_noise_energy(Eigen::MatrixXd::Constant(1, 1, 0.5), one));
  CHECK_FALSE(verify_noise_energy(Eigen::MatrixXd::Constant(1, 1, 0.5001), one));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  bool all = true;
  for (int k = 0; k < 1000; ++k) {
    Eigen::MatrixXd psi(1, 3);
    for (int j = 0; j < 3; ++j) psi(0, j) = u(rng);
    all = all && verify_noise_energy(psi, b);
  }
  CHECK(all);
}

TEST_CASE("numerical rank threshold") {
  Eigen::MatrixXd m(2, 2);
  m << 1, 0, 0, 1e-12;
  CHECK(numerical_rank(m) == 1);
  m(1, 1) = 1e-6;
  CHECK(numerical_rank(m) == 2);
  CHECK(numerical_rank(Eigen::MatrixXd()) == 0);
}

TEST_CASE("data export keeps simulator records apart") {
  const auto b1 = benchmark_plant(Benchmark::kPendulum);
  ExperimentConfig c = config(0.1, 4, [](double t, const Eigen::VectorXd&) { return std::cos(t); });
  c.noise = NoiseSpec::uniform(0.2);
  c.seed = 42;
  const DataSet ds = collect(b1.plant, b1.disturbance, v2(1, -1), c);
  DataManifest m;
  m.tau = 0.1;
  m.samples = 4;
  m.seed = 42;
  m.bound = noise_bound_uniform(0.2, 1, 4);
  m.benchmark = "b1";
  const fs::path dir = fs::temp_directory_path() / "assosm_test_data_export";
  fs::remove_all(dir);
  write_dataset(dir, ds, m);

  const auto noise = read_realized_noise(dir);
  REQUIRE(noise.has_value());
  CHECK(*noise == ds.realized_noise());

  fs::remove_all(dir / "oracle");
  const DesignData back = read_design_data(dir);
  CHECK(back.upper == ds.design_view().upper);
  CHECK(back.last == ds.design_view().last);
  CHECK(back.upper_rates == ds.design_view().upper_rates);
  CHECK(back.inputs == ds.design_view().inputs);
  CHECK_FALSE(read_realized_noise(dir).has_value());

  const DataManifest mb = read_manifest(dir);
  CHECK(mb.seed == 42);
  CHECK(mb.samples == 4);
  CHECK(mb.bound.gamma_gram(0, 0) == m.bound.gamma_gram(0, 0));
  REQUIRE(mb.benchmark.has_value());
  CHECK(*mb.benchmark == "b1");
  fs::remove_all(dir);
}

TEST_CASE("matrix csv round trip is exact") {
  Eigen::MatrixXd m(2, 3);
  m << 1.0 / 3.0, -2.718281828459045, 1e-300, 6.02214076e23, 0.0, -0.1;
  const fs::path f = fs::temp_directory_path() / "assosm_roundtrip.csv";
  write_matrix_csv(f, m);
  CHECK(read_matrix_csv(f) == m);
  fs::remove(f);
}
