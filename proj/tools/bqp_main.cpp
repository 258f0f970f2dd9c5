// Copyright 2026 The pelletflow Authors
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
//
// Command-line driver. Exit codes: 0 success, 2 usage error, 3 infeasible,
// 4 iteration/time limit reached, 5 internal error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bqp/branch_bound.hpp"
#include "bqp/gen.hpp"
#include "bqp/io.hpp"
#include "bqp/model.hpp"
#include "bqp/pha.hpp"
#include "bqp/saa.hpp"
#include "bqp/scenario_gen.hpp"
#include "bqp/sched.hpp"

namespace {

namespace fs = std::filesystem;

constexpr int kOk = 0;
constexpr int kUsage = 2;
constexpr int kInfeasible = 3;
constexpr int kLimit = 4;
constexpr int kInternal = 5;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string join_args(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) {
    if (i) s += ' ';
    s += argv[i];
  }
  return s;
}

struct OutputDir {
  fs::path dir;
  bqp::RunManifest manifest;

  explicit OutputDir(const std::string& path, const std::string& command,
                     std::uint64_t seed) {
    dir = path;
    fs::create_directories(dir);
    manifest.command = command;
    manifest.seed = seed;
  }

  void add_input(const std::string& path) {
    manifest.inputs.push_back({path, bqp::file_hash_hex(path)});
  }

  void write(const std::string& name, const std::string& bytes) {
    std::ofstream out(dir / name);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    out << bytes;
    manifest.outputs.push_back(name);
  }

  void write_json(const std::string& name, const bqp::json& j) {
    write(name, j.dump(2) + "\n");
  }

  void finish() { bqp::write_manifest((dir / "run_manifest.json").string(), manifest); }
};

bqp::InstanceFile load_input(const std::string& path) {
  if (path.empty()) throw UsageError("--instance is required");
  auto f = bqp::load_instance_file(path);
  if (!f.has_model && f.scenarios.empty())
    throw UsageError("instance file carries neither a scenario model nor scenarios");
  return f;
}

std::vector<bqp::Scenario> pick_scenarios(const bqp::InstanceFile& f, int n,
                                          std::uint64_t seed) {
  if (!f.scenarios.empty()) return f.scenarios;
  return bqp::sample_scenarios(f.instance, f.scenario_model, n, seed);
}

bqp::json summary_json(const bqp::SolutionSummary& s) {
  return bqp::json{{"depots_open", s.depots_open},
                   {"supply_storage", s.supply_storage},
                   {"depot_storage", s.depot_storage},
                   {"shortage", s.shortage}};
}

struct ExactOutcome {
  bqp::MilpSolution sol;
  bqp::SolutionSummary summary;
};

ExactOutcome solve_exact(const bqp::Instance& in, const std::vector<bqp::Scenario>& scens,
                         double gap_tol, double time_limit) {
  bqp::MilpProblem p = bqp::build_extensive_form(in, scens);
  bqp::MilpSolution sol = bqp::solve_milp(p, gap_tol, 200000, time_limit);
  ExactOutcome out{std::move(sol), {}};
  if (out.sol.status == bqp::MilpStatus::Optimal ||
      out.sol.status == bqp::MilpStatus::Feasible) {
    std::vector<double> probs;
    for (const auto& s : scens) probs.push_back(s.prob);
    out.summary = bqp::summarize_solution(p, out.sol.x, probs);
  }
  return out;
}

// --------------------------------------------------------------------------

int cmd_gen_instance(const std::string& preset, int index, const bqp::GenParams& params,
                     std::uint64_t seed, int embed_scenarios, const std::string& out_path,
                     const std::string& command) {
  bqp::GeneratedInstance g;
  if (preset == "t1")
    g = bqp::make_t1();
  else if (preset == "bench9")
    g = bqp::make_bench9(index, seed);
  else if (preset == "custom")
    g = bqp::make_instance(params, seed);
  else
    throw UsageError("unknown preset: " + preset);

  bqp::InstanceFile f{g.instance, g.scenario_model, true, {}};
  if (embed_scenarios > 0)
    f.scenarios = bqp::sample_scenarios(g.instance, g.scenario_model, embed_scenarios, seed);

  fs::path out(out_path);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  bqp::save_instance_file(out_path, f);

  OutputDir od(out.has_parent_path() ? out.parent_path().string() : ".", command, seed);
  od.manifest.outputs.push_back(out.filename().string());
  od.finish();
  std::cout << "wrote " << out_path << "\n";
  return kOk;
}

int cmd_solve(const std::string& instance_path, const std::string& algo,
              const std::string& parallel, int workers, std::uint64_t seed,
              int n_scenarios, int m_replications, int n_eval, double gap_tol,
              double time_limit, int iter_limit, const std::string& out_path,
              const std::string& command) {
  const bool is_saa = algo == "saa" || algo == "hybrid";
  if (!is_saa && parallel != "none")
    throw UsageError("--parallel requires --algo saa or hybrid");

  auto f = load_input(instance_path);
  OutputDir od(out_path, command, seed);
  od.add_input(instance_path);

  int code = kOk;
  if (algo == "exact") {
    auto scens = pick_scenarios(f, n_scenarios, seed);
    auto out = solve_exact(f.instance, scens, gap_tol, time_limit);
    if (out.sol.status == bqp::MilpStatus::Infeasible) code = kInfeasible;
    if (out.sol.status == bqp::MilpStatus::Limit) code = kLimit;
    bqp::json sj{{"algo", algo},
                 {"status", code == kOk ? "optimal" : (code == kLimit ? "limit" : "infeasible")},
                 {"objective", out.sol.objective},
                 {"bound", out.sol.best_bound},
                 {"gap", out.sol.gap},
                 {"nodes", out.sol.nodes}};
    if (code != kInfeasible) {
      std::vector<std::uint8_t> y(static_cast<std::size_t>(f.instance.nc) * f.instance.nj);
      for (std::size_t k = 0; k < y.size(); ++k) y[k] = out.sol.x[k] > 0.5 ? 1 : 0;
      sj["first_stage"] = bqp::first_stage_to_json(y, f.instance.nc, f.instance.nj);
      sj["summary"] = summary_json(out.summary);
    }
    od.write_json("solution.json", sj);
  } else if (algo == "pha" || algo == "pha-hr" || algo == "pha-hr-sb") {
    auto scens = pick_scenarios(f, n_scenarios, seed);
    bqp::PhaConfig pc;
    pc.gap_tol = gap_tol;
    pc.time_limit = time_limit;
    pc.max_iterations = iter_limit;
    pc.enable_hr = algo != "pha";
    pc.enable_sb = algo == "pha-hr-sb";
    auto res = bqp::pha_solve(f.instance, scens, pc);
    if (res.stop == bqp::PhaStop::IterLimit || res.stop == bqp::PhaStop::TimeLimit)
      code = kLimit;
    bqp::json sj{{"algo", algo},
                 {"status", code == kOk ? "converged" : "limit"},
                 {"objective", res.objective},
                 {"bound", res.bound},
                 {"gap", res.gap},
                 {"iterations", res.iterations},
                 {"first_stage",
                  bqp::first_stage_to_json(res.y.y, f.instance.nc, f.instance.nj)}};
    od.write_json("solution.json", sj);
    od.write_json("trace.json", bqp::pha_trace_to_json(res.trace));
  } else if (is_saa) {
    bqp::SaaConfig sc;
    sc.n_replications = m_replications;
    sc.n_scenarios = n_scenarios;
    sc.n_eval = n_eval;
    sc.seed = seed;
    sc.inner = algo == "saa" ? bqp::InnerSolver::Exact : bqp::InnerSolver::PhaHrSb;
    sc.pha.gap_tol = gap_tol;
    sc.pha.time_limit = time_limit;
    sc.pha.max_iterations = iter_limit;
    sc.workers = workers;
    if (parallel == "scheme1")
      sc.scheme = bqp::ParallelScheme::Scheme1;
    else if (parallel == "scheme2")
      sc.scheme = bqp::ParallelScheme::Scheme2;
    else if (parallel != "none")
      throw UsageError("unknown --parallel value: " + parallel);
    auto rep = bqp::run_saa(f.instance, f.scenario_model, sc);
    od.write_json("report.json",
                  bqp::saa_report_to_json(rep, f.instance.nc, f.instance.nj));
    od.write("gantt.csv", bqp::gantt_csv(rep.schedule));
    bqp::json sj{{"algo", algo},
                 {"status", "done"},
                 {"objective", rep.upper_bound},
                 {"lower_bound", rep.lower_bound},
                 {"gap", rep.gap},
                 {"first_stage",
                  bqp::first_stage_to_json(rep.best_y.y, f.instance.nc, f.instance.nj)}};
    od.write_json("solution.json", sj);
  } else {
    throw UsageError("unknown --algo value: " + algo);
  }
  od.finish();
  return code;
}

int cmd_benchmark(const std::string& instance_path, std::uint64_t seed, int n_scenarios,
                  int m_replications, int n_eval, int workers, int iter_limit,
                  const std::string& out_path, const std::string& command) {
  auto f = load_input(instance_path);
  OutputDir od(out_path, command, seed);
  od.add_input(instance_path);
  auto scens = pick_scenarios(f, n_scenarios, seed);

  std::ostringstream csv;
  csv << "algo,objective,bound,gap,iterations,wall_ms\n";
  {
    auto t0 = std::chrono::steady_clock::now();
    auto out = solve_exact(f.instance, scens, 1e-6, 600.0);
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                    .count();
    csv << "exact," << out.sol.objective << "," << out.sol.best_bound << ","
        << out.sol.gap << ",0," << ms << "\n";
  }
  for (const std::string algo : {"pha", "pha-hr", "pha-hr-sb"}) {
    bqp::PhaConfig pc;
    pc.max_iterations = iter_limit;
    pc.enable_hr = algo != "pha";
    pc.enable_sb = algo == "pha-hr-sb";
    auto t0 = std::chrono::steady_clock::now();
    auto res = bqp::pha_solve(f.instance, scens, pc);
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                    .count();
    csv << algo << "," << res.objective << "," << res.bound << "," << res.gap << ","
        << res.iterations << "," << ms << "\n";
  }
  od.write("benchmark.csv", csv.str());

  // Replication scheduling comparison on the same instance.
  for (const auto& [name, scheme] :
       {std::pair{"scheme1", bqp::ParallelScheme::Scheme1},
        std::pair{"scheme2", bqp::ParallelScheme::Scheme2}}) {
    bqp::SaaConfig sc;
    sc.n_replications = m_replications;
    sc.n_scenarios = n_scenarios;
    sc.n_eval = n_eval;
    sc.seed = seed;
    sc.scheme = scheme;
    sc.workers = workers;
    auto rep = bqp::run_saa(f.instance, f.scenario_model, sc);
    od.write(std::string("gantt_") + name + ".csv", bqp::gantt_csv(rep.schedule));
  }
  od.finish();
  return kOk;
}

int cmd_quality_study(const std::string& instance_path, std::uint64_t seed,
                      int n_scenarios, const std::string& out_path,
                      const std::string& command) {
  auto f = load_input(instance_path);
  if (!f.has_model) throw UsageError("quality-study needs a scenario model");
  OutputDir od(out_path, command, seed);
  od.add_input(instance_path);

  struct Row {
    std::string name;
    double ash_mult, moist_mult;
  };
  const std::vector<Row> rows = {{"base", 1.0, 1.0},
                                 {"ash_x0.7", 0.7, 1.0},
                                 {"ash_x1.3", 1.3, 1.0},
                                 {"moist_x0.7", 1.0, 0.7},
                                 {"moist_x1.3", 1.0, 1.3}};
  std::ostringstream csv;
  csv << "case,cost,cost_delta_pct,depots_open,supply_storage,depot_storage,shortage\n";
  double base_cost = 0.0;
  for (const auto& row : rows) {
    auto spec = f.scenario_model;
    spec.ash_mult *= row.ash_mult;
    spec.moist_mult *= row.moist_mult;
    auto scens = bqp::sample_scenarios(f.instance, spec, n_scenarios, seed);
    auto out = solve_exact(f.instance, scens, 1e-6, 600.0);
    if (out.sol.status != bqp::MilpStatus::Optimal)
      throw std::runtime_error("quality-study: case " + row.name + " not solved");
    if (row.name == "base") base_cost = out.sol.objective;
    double delta = base_cost != 0.0
                       ? 100.0 * (out.sol.objective - base_cost) / base_cost
                       : 0.0;
    csv << row.name << "," << out.sol.objective << "," << delta << ","
        << out.summary.depots_open << "," << out.summary.supply_storage << ","
        << out.summary.depot_storage << "," << out.summary.shortage << "\n";
  }
  od.write("quality_study.csv", csv.str());
  od.finish();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-stage biomass pellet supply-chain designer"};
  app.require_subcommand(1);
  const std::string command = join_args(argc, argv);

  // gen-instance
  auto* gen = app.add_subcommand("gen-instance", "Write an instance JSON file");
  std::string g_preset = "t1", g_out = "instance.json";
  int g_index = 0, g_embed = 0;
  std::uint64_t g_seed = 0;
  bqp::GenParams g_params;
  gen->add_option("--preset", g_preset, "t1, bench9, or custom");
  gen->add_option("--index", g_index, "bench9 grid index, 0..8");
  gen->add_option("--seed", g_seed, "generator seed");
  gen->add_option("--embed-scenarios", g_embed, "embed a pre-sampled scenario set");
  gen->add_option("--out", g_out, "output path");
  gen->add_option("--biomass", g_params.nb);
  gen->add_option("--suppliers", g_params.ni);
  gen->add_option("--sites", g_params.nj);
  gen->add_option("--capacity-levels", g_params.nc);
  gen->add_option("--pellets", g_params.np);
  gen->add_option("--ash-ranges", g_params.nr);
  gen->add_option("--periods", g_params.nt);
  gen->add_option("--demand", g_params.demand_per_period);
  gen->add_option("--supply-mean", g_params.supply_mean);

  // solve
  auto* solve = app.add_subcommand("solve", "Solve an instance");
  std::string s_instance, s_algo = "exact", s_parallel = "none", s_out = "out";
  int s_workers = 1, s_scen = 20, s_reps = 10, s_eval = 200, s_iters = 50;
  std::uint64_t s_seed = 0;
  double s_gap = 0.01, s_time = 1800.0;
  solve->add_option("--instance", s_instance, "instance JSON file")->required();
  solve->add_option("--algo", s_algo, "exact, pha, pha-hr, pha-hr-sb, saa, hybrid");
  solve->add_option("--parallel", s_parallel, "none, scheme1, scheme2 (saa/hybrid only)");
  solve->add_option("--workers", s_workers, "parallel workers");
  solve->add_option("--seed", s_seed, "master seed");
  solve->add_option("--scenarios", s_scen, "scenarios per program / replication");
  solve->add_option("--replications", s_reps, "sample-average replications");
  solve->add_option("--eval-scenarios", s_eval, "common evaluation sample size");
  solve->add_option("--gap-tol", s_gap, "relative gap tolerance");
  solve->add_option("--time-limit", s_time, "seconds");
  solve->add_option("--iter-limit", s_iters, "hedging iteration limit");
  solve->add_option("--out", s_out, "output directory");

  // benchmark
  auto* bench = app.add_subcommand("benchmark", "Compare algorithm variants");
  std::string b_instance, b_out = "bench_out";
  int b_scen = 8, b_reps = 6, b_eval = 40, b_workers = 2, b_iters = 25;
  std::uint64_t b_seed = 0;
  bench->add_option("--instance", b_instance, "instance JSON file")->required();
  bench->add_option("--seed", b_seed, "master seed");
  bench->add_option("--scenarios", b_scen, "scenarios per program");
  bench->add_option("--replications", b_reps, "replications for the scheduling runs");
  bench->add_option("--eval-scenarios", b_eval, "evaluation sample size");
  bench->add_option("--workers", b_workers, "parallel workers");
  bench->add_option("--iter-limit", b_iters, "hedging iteration limit");
  bench->add_option("--out", b_out, "output directory");

  // quality-study
  auto* quality = app.add_subcommand("quality-study", "Feedstock quality sensitivity");
  std::string q_instance, q_out = "quality_out";
  int q_scen = 8;
  std::uint64_t q_seed = 0;
  quality->add_option("--instance", q_instance, "instance JSON file")->required();
  quality->add_option("--seed", q_seed, "master seed");
  quality->add_option("--scenarios", q_scen, "scenarios per case");
  quality->add_option("--out", q_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (gen->parsed())
      return cmd_gen_instance(g_preset, g_index, g_params, g_seed, g_embed, g_out, command);
    if (solve->parsed())
      return cmd_solve(s_instance, s_algo, s_parallel, s_workers, s_seed, s_scen, s_reps,
                       s_eval, s_gap, s_time, s_iters, s_out, command);
    if (bench->parsed())
      return cmd_benchmark(b_instance, b_seed, b_scen, b_reps, b_eval, b_workers,
                           b_iters, b_out, command);
    if (quality->parsed())
      return cmd_quality_study(q_instance, q_seed, q_scen, q_out, command);
    return kUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
}
