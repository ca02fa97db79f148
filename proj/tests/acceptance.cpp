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

// Acceptance gate. One PASS/FAIL line per criterion; nonzero exit on any FAIL.

#include "assosm/data.hpp"
#include "assosm/design.hpp"
#include "assosm/pipeline.hpp"
#include "assosm/plant.hpp"
#include "assosm/report.hpp"
#include "assosm/simulation.hpp"
#include "assosm/sosm.hpp"
#include "assosm/spec.hpp"

#include "fixtures.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace assosm;
namespace fs = std::filesystem;

namespace {

int failures = 0;

struct Outcome {
  bool ok = false;
  std::string detail;
};

void run(int id, const std::string& name, double budget_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_budget = secs < budget_s;
  const bool ok = o.ok && in_budget;
  if (!ok) ++failures;
  std::ostringstream line;
  line << (ok ? "PASS" : "FAIL") << " " << id << " " << name << ": " << o.detail << " [" << secs
       << " s, budget " << budget_s << " s" << (in_budget ? "" : ", over budget") << "]";
  std::cout << line.str() << std::endl;
}

Eigen::RowVectorXd r1(double v) { return Eigen::RowVectorXd::Constant(1, v); }
Eigen::MatrixXd m1(double v) { return Eigen::MatrixXd::Constant(1, 1, v); }

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

std::string join(const Eigen::VectorXd& v) {
  std::ostringstream os;
  os << "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v(i);
  os << "]";
  return os.str();
}

Outcome lmi_fixture(const DesignData& data, double halfwidth, double k, double q, double k1, double k2) {
  const DesignProblem p = DesignProblem::from(data, noise_bound_uniform(halfwidth, 1, 3));
  const double ev = max_eigenvalue(assemble_lmi(p, r1(k), m1(q), k1, k2));
  return {ev <= 1e-2, "max eigenvalue " + std::to_string(ev) + " (<= 1e-2)"};
}

// sigma = x_n + coeff_r x_r, listed as [coeff_r, 1].
Eigen::VectorXd sigma_coefficients(const Eigen::RowVectorXd& k, const Eigen::MatrixXd& p) {
  const SlidingVariable s = sliding_variable(DesignSolution::from_gain_and_p(k, p, 0.5, 0.5));
  Eigen::VectorXd c(s.coeff_r.size() + 1);
  c << s.coeff_r.transpose(), 1.0;
  return c;
}

std::string slurp(const fs::path& f) {
  std::ifstream in(f, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<fs::path> csv_files(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".csv") out.push_back(fs::relative(e.path(), dir));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

int main() {
  std::cout.precision(6);

  run(1, "lmi fixture b1", 1.0, [] {
    return lmi_fixture(fixtures::pendulum_data(), 0.5, -0.7343, 0.6708, 0.5134, 0.4990);
  });

  run(2, "lmi fixture b2", 1.0, [] {
    return lmi_fixture(fixtures::linear_data(), 1.0, -0.3924, 0.2915, 0.2278, 0.0655);
  });

  run(3, "sliding-variable fixtures", 1.0, [] {
    const Eigen::VectorXd c1 = sigma_coefficients(r1(-0.7343), m1(1.4907));
    const Eigen::VectorXd c3 = sigma_coefficients(fixtures::b3_gain(), fixtures::b3_p());
    const double e1 = (c1 - vec({1.0946, 1.0})).cwiseAbs().maxCoeff();
    const double e3 = (c3 - vec({0.1539, -0.2355, 0.0961, 1.0})).cwiseAbs().maxCoeff();
    std::ostringstream os;
    os << "b1 " << join(c1) << " err " << e1 << "; b3 " << join(c3) << " err " << e3 << " (<= 5e-4)";
    return Outcome{e1 <= 5e-4 && e3 <= 5e-4, os.str()};
  });

  run(4, "noise-bound fixtures", 1.0, [] {
    const double a = noise_bound_uniform(0.5, 1, 3).gamma_gram(0, 0);
    const double b = noise_bound_uniform(1.0, 1, 3).gamma_gram(0, 0);
    const Eigen::MatrixXd c = noise_bound_uniform(0.1, 3, 15).gamma_gram;
    const bool ok = a == 0.75 && b == 3.0 && c == 0.45 * Eigen::MatrixXd::Identity(3, 3);
    std::ostringstream os;
    os.precision(17);
    os << a << ", " << b << ", diag " << join(c.diagonal()) << ", offdiag max "
       << (c - Eigen::MatrixXd(c.diagonal().asDiagonal())).cwiseAbs().maxCoeff();
    return Outcome{ok, os.str()};
  });

  run(5, "rank comparison b2", 1.0, [] {
    const DesignData d = fixtures::linear_data();
    Eigen::MatrixXd state(2, d.samples());
    state << d.upper, d.last;
    Eigen::MatrixXd stack(3, d.samples());
    stack << state, (Eigen::RowVector2d(-2.0, -1.0) * state);
    const int rs = numerical_rank(state);
    const int ra = numerical_rank(stack);
    return Outcome{rs == 2 && ra == 2,
                   "rank [O1; O2] " + std::to_string(rs) + ", rank [O1; O2; I] " + std::to_string(ra)};
  });

  run(6, "open-loop instability b2", 1.0, [] {
    const auto b2 = benchmark_plant(Benchmark::kLinear);
    const Trajectory tr = integrate(b2.plant, vec({2.0, 3.0}), [](double, const Eigen::VectorXd&) { return 0.0; },
                                    DisturbanceSignal::zero(), 2.5, 1e-4);
    const Eigen::VectorXd x = tr.states.back();
    return Outcome{std::abs(x(0)) > 100.0 && std::abs(x(1)) > 100.0,
                   "x(2.5) = " + join(x) + " (both > 100)"};
  });

  for (Benchmark id : {Benchmark::kPendulum, Benchmark::kLinear, Benchmark::kNonlinear}) {
    run(7, "fresh design " + to_string(id), 10.0, [id] {
      const ExperimentSpec spec = benchmark_spec(id);
      const BenchmarkPlant bp = spec.resolve_plant();
      const DataSet data = collect(bp.plant, bp.disturbance, spec.collect.x0, spec.experiment_config());
      const int n = bp.plant.dim();
      DesignProblem problem = DesignProblem::from(
          data.design_view(), noise_bound_uniform(spec.collect.noise.halfwidth, n - 1, spec.collect.samples));
      spec.design.apply(problem);
      const DesignSolution sol = solve_design(problem);
      OracleContext oracle;
      oracle.plant = &bp.plant;
      oracle.samples = 1000;
      oracle.slack = 1e-8;
      const CertificateReport c = verify_certificate(problem, sol, oracle, 1e-8);
      std::ostringstream os;
      os << "status " << sol.status << ", certificate max eigenvalue " << c.certificate_max_eigenvalue
         << ", worst Lyapunov margin " << c.worst_lyapunov_margin;
      const bool ok = c.certificate_ok && c.certificate_max_eigenvalue <= 1e-8 && c.lyapunov_checked &&
                      c.lyapunov_ok;
      return Outcome{ok, os.str()};
    });
  }

  std::vector<RunResult> loops;
  for (Benchmark id : {Benchmark::kPendulum, Benchmark::kLinear}) {
    run(8, "closed loop " + to_string(id), 60.0, [id, &loops] {
      const RunResult r = run_pipeline(benchmark_spec(id));
      loops.push_back(r);
      const RunMetrics& m = r.metrics();
      const LoopChecks& k = r.loop.checks;
      const bool reached = m.reaching_time.has_value() && *m.reaching_time <= 20.0;
      std::ostringstream os;
      os << "x0 " << join(r.spec.simulation.x0) << ", reaching "
         << (m.reaching_time ? std::to_string(*m.reaching_time) : std::string("none")) << " s, final |x| "
         << m.final_state_norm << ", gain monotone " << k.upsilon_monotone << ", max |u'| " << k.max_u_rate
         << " vs final gain " << m.final_gain << ", Lipschitz " << k.u_lipschitz;
      return Outcome{reached && m.final_state_norm < 0.1 && k.upsilon_monotone && k.u_lipschitz, os.str()};
    });
  }

  run(9, "differentiator", 10.0, [] {
    DifferentiatorState d;
    d.lipschitz = 300.0;
    const double g0 = std::abs(d.mu0() - 25.9808), g1 = std::abs(d.mu1() - 330.0);

    double worst = 0.0;
    const double dt = 1e-4;
    for (long k = 0; k <= 100000; ++k) {
      const double t = static_cast<double>(k) * dt;
      d = differentiator_step(d, std::sin(t), dt);
      if (t >= 2.0) worst = std::max(worst, std::abs(d.s2_hat - std::cos(t)));
    }

    DifferentiatorState f;
    f.lipschitz = 300.0;
    f.s1_hat = 1.75;
    f.s2_hat = 0.0;
    bool fixed = true;
    for (int k = 0; k < 1000; ++k) {
      f = differentiator_step(f, 1.75, dt);
      fixed = fixed && f.s1_hat == 1.75 && f.s2_hat == 0.0;
    }
    std::ostringstream os;
    os << "tracking error " << worst << " (<= 1e-2), fixed point " << fixed << ", gain errors " << g0 << ", "
       << g1 << " (<= 1e-4)";
    return Outcome{worst <= 1e-2 && fixed && g0 <= 1e-4 && g1 <= 1e-4, os.str()};
  });

  run(10, "semi-global sweep b1", 300.0, [] {
    ExperimentSpec spec = benchmark_spec(Benchmark::kPendulum);
    spec.controller.lipschitz = 3e4;
    const RunResult design = run_pipeline(spec);
    const BenchmarkPlant bp = spec.resolve_plant();
    LoopConfig c;
    c.horizon = spec.simulation.horizon;
    c.dt = spec.simulation.dt;
    c.sigma_tol = spec.simulation.sigma_tol;
    c.record_every = 100;
    const SweepReport s = semi_global_sweep(bp.plant, bp.disturbance, design.sliding, spec.controller, c,
                                            vec({1.0, 1.0}), {1.0, 10.0, 100.0});
    std::ostringstream os;
    for (const SweepPoint& p : s.points) {
      os << "r " << p.radius << ": final |x| " << p.final_norm << " of " << p.initial_norm << ", gain "
         << p.final_gain << (p.failure.empty() ? "" : " (" + p.failure + ")") << "; ";
    }
    os << "gain non-decreasing " << s.gain_non_decreasing;
    return Outcome{s.all_converged && s.gain_non_decreasing, os.str()};
  });

  run(11, "b3 large-scale run (slow)", 900.0, [] {
    const RunResult r = run_pipeline(benchmark_spec(Benchmark::kNonlinear));
    const RunMetrics& m = r.metrics();
    const std::vector<double>& sigma = r.loop.history.sigma;
    std::size_t last_out = 0;
    bool ever_out = false;
    for (std::size_t i = 0; i < sigma.size(); ++i) {
      if (std::abs(sigma[i]) >= 1.0) {
        last_out = i;
        ever_out = true;
      }
    }
    const bool reached = !sigma.empty() && (!ever_out || last_out + 1 < sigma.size());
    std::ostringstream os;
    os << "x0 " << join(r.spec.simulation.x0) << ", dt " << r.spec.simulation.dt << ", |sigma| < 1 from t = "
       << (reached ? std::to_string(ever_out ? r.loop.history.time[last_out + 1] : 0.0) : std::string("never"))
       << ", final |sigma| " << std::abs(m.final_sigma) << ", tail |x| slope " << m.tail_norm_slope
       << ", final |x| " << m.final_state_norm;
    return Outcome{r.spec.simulation.dt == 1e-5 && reached && m.tail_norm_slope < 0.0, os.str()};
  });

  run(12, "determinism", 120.0, [&loops] {
    if (loops.size() != 2) return Outcome{false, "closed-loop runs missing"};
    const fs::path root = fs::temp_directory_path() / "assosm_acceptance_determinism";
    fs::remove_all(root);
    std::ostringstream os;
    bool ok = true;
    for (RunResult& first : loops) {
      RunResult second = run_pipeline(first.spec);
      const fs::path a = root / (to_string(first.spec.benchmark) + "_a");
      const fs::path b = root / (to_string(first.spec.benchmark) + "_b");
      write_artifacts(first, a);
      write_artifacts(second, b);
      const auto fa = csv_files(a);
      const auto fb = csv_files(b);
      int same = 0;
      bool bench_ok = fa == fb && !fa.empty();
      for (const auto& f : fa) {
        if (slurp(a / f) == slurp(b / f)) {
          ++same;
        } else {
          bench_ok = false;
        }
      }
      ok = ok && bench_ok;
      os << to_string(first.spec.benchmark) << " " << same << "/" << fa.size() << " CSVs identical; ";
    }
    fs::remove_all(root);
    return Outcome{ok, os.str()};
  });

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criterion line(s) failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
