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


// assosm command-line front end.

#include "assosm/data.hpp"
#include "assosm/design.hpp"
#include "assosm/errors.hpp"
#include "assosm/pipeline.hpp"
#include "assosm/report.hpp"
#include "assosm/spec.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace assosm;

namespace {

int code(Stage s) { return static_cast<int>(s); }

ExperimentSpec spec_with_seed(const fs::path& file, const std::optional<std::uint64_t>& seed) {
  ExperimentSpec spec = load_spec(file);
  if (seed) spec.seed = *seed;
  return spec;
}

int cmd_collect(const fs::path& spec_file, const fs::path& out,
                const std::optional<std::uint64_t>& seed) {
  const ExperimentSpec spec = spec_with_seed(spec_file, seed);
  spec.validate();
  const BenchmarkPlant bp = spec.resolve_plant();
  DataSet data = [&] {
    try {
      return collect(bp.plant, bp.disturbance, spec.collect.x0, spec.experiment_config());
    } catch (const DivergenceError& e) {
      throw PipelineError(Stage::kCollection, 1, e.what());
    }
  }();
  for (const auto& w : data.warnings) std::cerr << "warning: " << w << "\n";
  DataManifest m;
  m.t0 = spec.collect.t0;
  m.tau = spec.collect.tau;
  m.samples = spec.collect.samples;
  m.seed = spec.seed;
  m.mode = spec.collect.mode;
  const double h =
      spec.collect.noise.kind == NoiseSpec::Kind::kUniform ? spec.collect.noise.halfwidth : 0.0;
  m.bound = noise_bound_uniform(h, bp.plant.dim() - 1, spec.collect.samples);
  if (!spec.plant) m.benchmark = to_string(spec.benchmark);
  write_dataset(out, data, m);

  const RankReport rank = rank_check(data.design_view());
  std::cout << "wrote " << out.string() << " (rank [O1; O2] = " << rank.state_rank << ")\n";
  if (!rank.ours) {
    std::cerr << "error: collected data fails the rank condition\n";
    return code(Stage::kRank);
  }
  return 0;
}

int cmd_design(const fs::path& data_dir, const fs::path& out,
               const std::optional<fs::path>& spec_file) {
  const DesignData data = read_design_data(data_dir);
  const DataManifest m = read_manifest(data_dir);
  DesignProblem problem = DesignProblem::from(data, m.bound);
  if (spec_file) load_spec(*spec_file).design.apply(problem);
  const DesignSolution sol = solve_design(problem);
  for (const auto& w : sol.warnings) std::cerr << "warning: " << w << "\n";
  write_solution(out, sol);
  std::cout << "K = " << sol.gain << "\nkappa1 = " << sol.kappa1 << ", kappa2 = " << sol.kappa2
            << "\nLMI max eigenvalue = " << sol.lmi_max_eigenvalue << "\nsigma coefficients = "
            << sliding_variable(sol).coeff_r << "\n";
  return 0;
}

int cmd_verify(const fs::path& data_dir, const fs::path& solution_file) {
  const DesignData data = read_design_data(data_dir);
  const DataManifest m = read_manifest(data_dir);
  const DesignProblem problem = DesignProblem::from(data, m.bound);
  const DesignSolution sol = read_solution(solution_file);

  std::optional<OracleContext> oracle;
  std::optional<BenchmarkPlant> bp;
  if (m.benchmark) {
    bp.emplace(benchmark_plant(parse_benchmark(*m.benchmark)));
    oracle.emplace();
    oracle->plant = &bp->plant;
    oracle->realized_noise = read_realized_noise(data_dir);
  }
  const CertificateReport rep = verify_certificate(problem, sol, oracle);
  std::cout << format_certificate(rep);
  if (!rep.passed()) {
    std::cerr << "error: certificate check failed\n";
    return code(Stage::kDesign);
  }
  std::cout << "certificate ok\n";
  return 0;
}

int report_run(RunResult& r, const fs::path& out) {
  write_artifacts(r, out);
  const RunMetrics& m = r.metrics();
  std::cout << "reaching time: "
            << (m.reaching_time ? std::to_string(*m.reaching_time) + " s" : "not reached")
            << "\nfinal |x| = " << m.final_state_norm << ", final gain = " << m.final_gain
            << "\nartifacts in " << out.string() << "\n";
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"assosm: adaptive suboptimal second-order sliding-mode design from data"};
  app.require_subcommand(1);
  std::optional<std::uint64_t> seed;

  fs::path spec_file, out_dir, data_dir, solution_file;
  std::optional<fs::path> design_spec;
  std::optional<fs::path> sim_out;
  std::string bench;

  auto* c = app.add_subcommand("collect", "run the data-collection experiment");
  c->add_option("--spec", spec_file)->required();
  c->add_option("--out", out_dir)->required();
  c->add_option("--seed", seed, "override the spec seed");

  auto* d = app.add_subcommand("design", "solve the virtual-controller SDP");
  d->add_option("--data", data_dir)->required();
  d->add_option("--out", solution_file)->required();
  d->add_option("--spec", design_spec, "read design.* settings from a spec file");

  auto* v = app.add_subcommand("verify", "re-check a stored solution");
  v->add_option("--data", data_dir)->required();
  v->add_option("--solution", solution_file)->required();

  auto* s = app.add_subcommand("simulate", "run the full pipeline from a spec file");
  s->add_option("--spec", spec_file)->required();
  s->add_option("--out", sim_out, "output directory (default: run.out)");
  s->add_option("--seed", seed, "override the spec seed");

  auto* r = app.add_subcommand("reproduce", "run a benchmark's published configuration");
  r->add_option("benchmark", bench)->required()->check(CLI::IsMember({"b1", "b2", "b3"}));
  r->add_option("--out", out_dir)->required();
  r->add_option("--seed", seed, "override the spec seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : code(Stage::kUsage);
  }

  try {
    if (*c) return cmd_collect(spec_file, out_dir, seed);
    if (*d) return cmd_design(data_dir, solution_file, design_spec);
    if (*v) return cmd_verify(data_dir, solution_file);
    if (*s) {
      const ExperimentSpec spec = spec_with_seed(spec_file, seed);
      RunResult run = run_pipeline(spec);
      return report_run(run, sim_out.value_or(spec.out));
    }
    if (*r) {
      ExperimentSpec spec = benchmark_spec(parse_benchmark(bench));
      if (seed) spec.seed = *seed;
      RunResult run = run_pipeline(spec);
      return report_run(run, out_dir);
    }
  } catch (const PipelineError& e) {
    std::cerr << "error (step " << e.step() << ", " << to_string(e.stage()) << "): " << e.what()
              << "\n";
    return code(e.stage());
  } catch (const RankError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return code(Stage::kRank);
  } catch (const DesignInfeasibleError& e) {
    std::cerr << "error: " << e.what() << " [" << e.solver_status() << "]\n";
    return code(Stage::kDesign);
  } catch (const DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return code(Stage::kSimulation);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return code(Stage::kUsage);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return code(Stage::kUsage);
  }
  return 0;
}
