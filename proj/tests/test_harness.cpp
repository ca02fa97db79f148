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
#include "assosm/kv_file.hpp"
#include "assosm/pipeline.hpp"
#include "assosm/report.hpp"
#include "assosm/spec.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

using namespace assosm;
namespace fs = std::filesystem;

namespace {

History scalar_history(double t_end, double dt, double (*sigma)(double)) {
  History h;
  const auto n = static_cast<long>(std::llround(t_end / dt));
  for (long k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) * dt;
    h.time.push_back(t);
    h.states.push_back(Eigen::VectorXd::Constant(2, sigma(t)));
    h.u.push_back(0);
    h.d.push_back(0);
    h.sigma.push_back(sigma(t));
    h.s2.push_back(0);
    h.s2_hat.push_back(0);
    h.upsilon.push_back(1);
    h.nu.push_back(0);
  }
  return h;
}

std::string slurp(const fs::path& f) {
  std::ifstream in(f, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("assosm_harness_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("metrics: reaching time") {
  const double dt = 1e-3;
  const RunMetrics zero = compute_metrics(scalar_history(3, dt, [](double) { return 0.0; }), 1e-2);
  REQUIRE(zero.reaching_time.has_value());
  CHECK(*zero.reaching_time == 0.0);

  const RunMetrics decay = compute_metrics(scalar_history(8, dt, [](double t) { return std::exp(-t); }),
                                           std::exp(-5.0));
  REQUIRE(decay.reaching_time.has_value());
  CHECK(std::abs(*decay.reaching_time - 5.0) <= dt * (1 + 1e-9));

  const RunMetrics osc =
      compute_metrics(scalar_history(8, dt, [](double t) { return 1.0 + 0.5 * std::sin(t); }), 1e-2);
  CHECK_FALSE(osc.reaching_time.has_value());

  // Re-entry after leaving the band resets the reaching time.
  const RunMetrics late = compute_metrics(
      scalar_history(8, dt, [](double t) { return (t > 2 && t < 3) ? 1.0 : 0.0; }), 1e-2);
  REQUIRE(late.reaching_time.has_value());
  CHECK(*late.reaching_time >= 3.0 - dt);
  CHECK(*late.reaching_time <= 3.0 + dt);
}

TEST_CASE("spec files round trip and reject unknown keys") {
  for (Benchmark id : {Benchmark::kPendulum, Benchmark::kLinear, Benchmark::kNonlinear}) {
    const ExperimentSpec s = benchmark_spec(id);
    const KvFile kv = spec_to_kv(s);
    const ExperimentSpec back = parse_spec(KvFile::parse(kv.to_string()));
    CHECK(spec_to_kv(back).to_string() == kv.to_string());
  }
  CHECK_THROWS_AS(parse_spec(KvFile::parse("plant.benchmark = b1\ncollect.taux = 0.1\n")), ConfigError);
  CHECK_THROWS_AS(parse_spec(KvFile::parse("plant.benchmark = b9\n")), ConfigError);
  const ExperimentSpec over = parse_spec(KvFile::parse("plant.benchmark = b2\ncollect.samples = 5\nrun.seed = 9\n"));
  CHECK(over.benchmark == Benchmark::kLinear);
  CHECK(over.collect.samples == 5);
  CHECK(over.seed == 9);
}

TEST_CASE("pipeline: b1 defaults converge") {
  const RunResult r = run_pipeline(benchmark_spec(Benchmark::kPendulum));
  REQUIRE(r.metrics().reaching_time.has_value());
  CHECK(r.metrics().final_state_norm < 0.1);
  CHECK(r.certificate.passed());
  // Upper dynamics a = 1, A = 0 closed through K P.
  CHECK(r.solution->virtual_gain()(0) < 0.0);
}

TEST_CASE("pipeline: one sample fails the rank test at step 1") {
  ExperimentSpec s = benchmark_spec(Benchmark::kPendulum);
  s.collect.samples = 1;
  try {
    run_pipeline(s);
    FAIL("expected a rank failure");
  } catch (const PipelineError& e) {
    CHECK(e.stage() == Stage::kRank);
    CHECK(e.step() == 1);
  }
}

TEST_CASE("pipeline: feedback-collected b2 data is usable") {
  const RunResult r = run_pipeline(benchmark_spec(Benchmark::kLinear));
  CHECK(r.certificate.passed());
  REQUIRE(r.metrics().reaching_time.has_value());
  CHECK(r.metrics().final_state_norm < 0.1);
  const std::string report = render_report(r);
  CHECK(report.find("rank [x; u]: 2 (deficient)") != std::string::npos);
  CHECK(report.find("collection input is state feedback") != std::string::npos);
}

TEST_CASE("artifacts: stored solution re-verifies and reruns are byte-identical") {
  const fs::path a = scratch("a");
  const std::vector<std::string> files{"trajectory.csv", "solution.txt", "report.txt",
                                       "spec.txt", "states.svg", "data/O1plus.csv"};
  reproduce(Benchmark::kPendulum, a);
  std::vector<std::string> first;
  for (const auto& f : files) first.push_back(slurp(a / f));
  reproduce(Benchmark::kPendulum, a);
  for (std::size_t i = 0; i < files.size(); ++i) CHECK_MESSAGE(slurp(a / files[i]) == first[i], files[i]);
  const std::string csv = slurp(a / "trajectory.csv");
  CHECK(csv.rfind("t,x1,x2,u,d,sigma,s2,s2_hat,upsilon,nu\n", 0) == 0);

  const DesignData data = read_design_data(a / "data");
  const DataManifest m = read_manifest(a / "data");
  const DesignProblem p = DesignProblem::from(data, m.bound);
  const DesignSolution s = read_solution(a / "solution.txt");
  const auto bp = benchmark_plant(Benchmark::kPendulum);
  OracleContext oc;
  oc.plant = &bp.plant;
  oc.realized_noise = read_realized_noise(a / "data");
  CHECK(verify_certificate(p, s, oc).passed());
  fs::remove_all(a);
}

TEST_CASE("non-adaptive threshold") {
  CHECK(non_adaptive_threshold(3.0, 10.0, 10.0) == doctest::Approx(3.0 / 5.0));
  CHECK(non_adaptive_threshold(0.0, 1.0, 1.0) == 0.0);
  CHECK(non_adaptive_threshold(1.0, 1.0, 2.0) == doctest::Approx(4.0));
  CHECK_THROWS_AS(non_adaptive_threshold(1.0, 1.0, 3.0), ConfigError);
}

TEST_CASE("bound report") {
  const auto b1 = benchmark_plant(Benchmark::kPendulum);
  const Eigen::RowVectorXd kp = Eigen::RowVectorXd::Constant(1, -1.0946);
  BoundBox box{StateBox::symmetric(2, 5.0), 5.0, 1.2, 1.6};
  const BoundReport r = bound_report(b1.plant, kp, box, 4000);
  CHECK(r.lambda_lower == 10.0);
  CHECK(r.lambda_upper == 10.0);
  CHECK(std::isfinite(r.delta_bar));
  CHECK(r.delta_bar > 0.0);
  CHECK(r.threshold == doctest::Approx(r.delta_bar / 5.0));

  BoundBox zero{StateBox::symmetric(2, 0.0), 0.0, 0.0, 0.0};
  const BoundReport z = bound_report(b1.plant, kp, zero, 100);
  CHECK(z.delta_bar == 0.0);
  CHECK(z.threshold == 0.0);

  double last = 0.0;
  for (double s : {0.25, 0.5, 1.0, 2.0}) {
    BoundBox nested{StateBox::symmetric(2, 5.0 * s), 5.0 * s, 1.2, 1.6};
    const double d = bound_report(b1.plant, kp, nested, 2000).delta_bar;
    CHECK(d >= last);
    last = d;
  }
}

TEST_CASE("disturbance probe on b2") {
  const ExperimentSpec spec = benchmark_spec(Benchmark::kLinear);
  const RunResult r = run_pipeline(spec);
  const auto bp = spec.resolve_plant();
  LoopConfig c;
  c.x0 = spec.simulation.x0;
  c.horizon = spec.simulation.horizon;
  c.dt = spec.simulation.dt;
  const DisturbanceProbe p = disturbance_probe(bp.plant, bp.disturbance, r.sliding, spec.controller, c, 5.0);
  MESSAGE("adaptive residual " << p.adaptive_residual << ", static residual " << p.static_residual);
  CHECK(p.adaptive_residual < 0.05);
  CHECK(p.static_residual >= 0.05);
}
