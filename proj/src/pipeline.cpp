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


#include "assosm/pipeline.hpp"

#include "assosm/errors.hpp"
#include "assosm/kv_file.hpp"
#include "assosm/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace fs = std::filesystem;

namespace assosm {

namespace {

// Pipeline step numbers used to tag failures.
constexpr int kStepCollect = 1;
constexpr int kStepNoiseBound = 2;
constexpr int kStepSolve = 3;
constexpr int kStepControl = 11;

LoopConfig loop_config(const ExperimentSpec& spec) {
  LoopConfig c;
  c.x0 = spec.simulation.x0;
  c.horizon = spec.simulation.horizon;
  c.dt = spec.simulation.dt;
  c.sigma_tol = spec.simulation.sigma_tol;
  c.record_every = spec.simulation.record_every;
  return c;
}

void write_text(const fs::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + file.string());
  out << text;
}

}  // namespace

RunResult run_pipeline(const ExperimentSpec& spec) {
  spec.validate();
  RunResult r;
  r.spec = spec;
  const BenchmarkPlant bp = spec.resolve_plant();
  const int n = bp.plant.dim();

  // Step 1: one experiment.
  try {
    r.data.emplace(collect(bp.plant, bp.disturbance, spec.collect.x0, spec.experiment_config()));
  } catch (const DivergenceError& e) {
    throw PipelineError(Stage::kCollection, kStepCollect, e.what());
  } catch (const ConsistencyError& e) {
    throw PipelineError(Stage::kCollection, kStepCollect, e.what());
  }
  for (const auto& w : r.data->warnings) r.warnings.push_back("collect: " + w);
  const DesignData& view = r.data->design_view();
  const RankReport rank = rank_check(view);
  if (!rank.ours) {
    throw PipelineError(Stage::kRank, kStepCollect,
                        "rank [O1; O2] = " + std::to_string(rank.state_rank) + " < n = " +
                            std::to_string(n));
  }

  // Step 2: noise bound from the declared per-component range.
  const double halfwidth =
      spec.collect.noise.kind == NoiseSpec::Kind::kUniform ? spec.collect.noise.halfwidth : 0.0;
  r.bound = noise_bound_uniform(halfwidth, n - 1, spec.collect.samples);
  if (!verify_noise_energy(r.data->realized_noise(), r.bound)) {
    r.warnings.push_back("noise bound (step " + std::to_string(kStepNoiseBound) +
                         "): realized derivative noise exceeds the declared bound");
  }

  // Steps 3-4.
  r.problem.emplace(DesignProblem::from(view, r.bound));
  spec.design.apply(*r.problem);
  try {
    r.solution.emplace(solve_design(*r.problem));
  } catch (const RankError& e) {
    throw PipelineError(Stage::kRank, kStepSolve, e.what());
  } catch (const DesignInfeasibleError& e) {
    throw PipelineError(Stage::kDesign, kStepSolve, e.what());
  }
  for (const auto& w : r.solution->warnings) r.warnings.push_back("design: " + w);

  OracleContext oracle;
  oracle.plant = &bp.plant;
  oracle.realized_noise = r.data->realized_noise();
  r.certificate = verify_certificate(*r.problem, *r.solution, oracle);
  // The realized-noise check only restates the warning above.
  if (!r.certificate.certificate_ok || (r.certificate.lyapunov_checked && !r.certificate.lyapunov_ok)) {
    throw PipelineError(Stage::kDesign, kStepSolve,
                        "certificate check failed:\n" + format_certificate(r.certificate));
  }

  // Steps 5-11.
  r.sliding = sliding_variable(*r.solution);
  try {
    r.loop = simulate_closed_loop(bp.plant, bp.disturbance, r.sliding, spec.controller,
                                  loop_config(spec));
  } catch (const DivergenceError& e) {
    throw PipelineError(Stage::kSimulation, kStepControl, e.what());
  }
  return r;
}

std::string trajectory_csv(const History& h) {
  std::ostringstream os;
  const std::size_t n = h.states.empty() ? 0 : static_cast<std::size_t>(h.states.front().size());
  os << "t";
  for (std::size_t i = 1; i <= n; ++i) os << ",x" << i;
  os << ",u,d,sigma,s2,s2_hat,upsilon,nu\n";
  for (std::size_t k = 0; k < h.size(); ++k) {
    os << format_double(h.time[k]);
    for (Eigen::Index i = 0; i < h.states[k].size(); ++i) os << ',' << format_double(h.states[k](i));
    os << ',' << format_double(h.u[k]) << ',' << format_double(h.d[k]) << ','
       << format_double(h.sigma[k]) << ',' << format_double(h.s2[k]) << ','
       << format_double(h.s2_hat[k]) << ',' << format_double(h.upsilon[k]) << ','
       << format_double(h.nu[k]) << '\n';
  }
  return os.str();
}

std::string render_report(const RunResult& r) {
  std::ostringstream os;
  os << std::setprecision(6);
  const BenchmarkPlant bp = r.spec.resolve_plant();
  const int n = bp.plant.dim();
  os << "run: " << (r.spec.plant ? std::string("user plant") : to_string(r.spec.benchmark))
     << ", seed " << r.spec.seed << "\n\n";

  os << "== data\n";
  const RankReport rank = rank_check(r.data->design_view());
  os << "samples: " << r.spec.collect.samples << ", tau " << r.spec.collect.tau << "\n"
     << "rank [O1; O2]: " << rank.state_rank << " (n = " << n << ")\n"
     << "noise bound psi_bar: " << r.bound.psi_bar << "\n\n";

  os << "== design\n";
  const DesignSolution& s = *r.solution;
  os << "K: " << s.gain << "\n"
     << "P:\n" << s.p << "\n"
     << "kappa1: " << s.kappa1 << ", kappa2: " << s.kappa2 << "\n"
     << "LMI max eigenvalue: " << s.lmi_max_eigenvalue << "\n"
     << "sigma = x" << n;
  for (Eigen::Index i = 0; i < r.sliding.coeff_r.size(); ++i) {
    const double c = r.sliding.coeff_r(i);
    os << (c < 0 ? " - " : " + ") << std::abs(c) << " x" << (i + 1);
  }
  os << "\n" << format_certificate(r.certificate) << "\n";

  os << "== closed loop\n" << format_metrics(r.loop.metrics, r.loop.checks) << "\n";

  // Box covering the simulated initial state and the recorded input.
  const double radius = std::max(1.0, r.spec.simulation.x0.cwiseAbs().maxCoeff());
  double u_max = 0.0;
  for (double u : r.loop.history.u) u_max = std::max(u_max, std::abs(u));
  BoundBox box{StateBox::symmetric(n, radius), u_max, bp.disturbance.value_bound,
               bp.disturbance.rate_bound};
  BoundReport bound = bound_report(bp.plant, s.virtual_gain(), box, 2000);
  bound.final_gain = r.loop.metrics.final_gain;
  os << "== auxiliary bound (|x|_inf <= " << radius << ", |u| <= " << u_max << ")\n"
     << format_bound(bound) << "\n";

  os << "== growth of f on the same box\n"
     << format_growth(growth_diagnostic(bp.plant, box.states, 2000)) << "\n";

  os << "== classical data-driven comparison\n";
  if (r.data->design_view().last_rates) {
    os << format_classical(classical_design(r.data->design_view()));
  } else {
    os << "not available: the data carries no x_n derivatives\n";
  }

  if (!r.warnings.empty()) {
    os << "\n== warnings\n";
    for (const auto& w : r.warnings) os << w << "\n";
  }
  return os.str();
}

void write_artifacts(RunResult& r, const fs::path& dir) {
  fs::create_directories(dir);
  DataManifest manifest;
  manifest.t0 = r.spec.collect.t0;
  manifest.tau = r.spec.collect.tau;
  manifest.samples = r.spec.collect.samples;
  manifest.seed = r.spec.seed;
  manifest.mode = r.spec.collect.mode;
  manifest.bound = r.bound;
  if (!r.spec.plant) manifest.benchmark = to_string(r.spec.benchmark);
  write_dataset(dir / "data", *r.data, manifest);
  r.artifacts.push_back(dir / "data");

  spec_to_kv(r.spec).save(dir / "spec.txt");
  write_solution(dir / "solution.txt", *r.solution);
  write_text(dir / "trajectory.csv", trajectory_csv(r.loop.history));
  write_text(dir / "report.txt", render_report(r));
  for (const char* f : {"spec.txt", "solution.txt", "trajectory.csv", "report.txt"}) {
    r.artifacts.push_back(dir / f);
  }

  const History& h = r.loop.history;
  const std::size_t n = h.states.empty() ? 0 : static_cast<std::size_t>(h.states.front().size());
  auto column = [&](auto get) {
    std::vector<double> v;
    v.reserve(h.size());
    for (std::size_t k = 0; k < h.size(); ++k) v.push_back(get(k));
    return v;
  };

  std::vector<Series> states;
  for (std::size_t i = 0; i < n; ++i) {
    states.push_back({"x" + std::to_string(i + 1), h.time,
                      column([&](std::size_t k) { return h.states[k](static_cast<Eigen::Index>(i)); })});
  }
  write_svg(dir / "states.svg", {"States", "t [s]", "x", 720, 420, 4000}, states);
  write_svg(dir / "phase.svg", {"Sliding phase portrait", "s1", "s2", 720, 420, 4000},
            {{"(s1, s2)", h.sigma, h.s2}});
  write_svg(dir / "input.svg", {"Input and disturbance", "t [s]", "", 720, 420, 4000},
            {{"u", h.time, h.u}, {"d", h.time, h.d}});
  write_svg(dir / "gain.svg", {"Adaptive gain", "t [s]", "upsilon", 720, 420, 4000},
            {{"upsilon", h.time, h.upsilon}});
  write_svg(dir / "sigma.svg", {"Sliding variable", "t [s]", "", 720, 420, 4000},
            {{"sigma", h.time, h.sigma}, {"s2 estimate", h.time, h.s2_hat}});
  for (const char* f : {"states.svg", "phase.svg", "input.svg", "gain.svg", "sigma.svg"}) {
    r.artifacts.push_back(dir / f);
  }
}

RunResult reproduce(Benchmark id, const fs::path& out) {
  ExperimentSpec spec = benchmark_spec(id);
  spec.out = out;
  RunResult r = run_pipeline(spec);
  write_artifacts(r, out);
  return r;
}

}  // namespace assosm
