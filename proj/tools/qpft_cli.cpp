// Copyright 2026 The qpft Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Command-line driver: optimize | pft | sweep | noise | phases | gates.

#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "qpft/config.hpp"
#include "qpft/dmorph.hpp"
#include "qpft/io.hpp"
#include "qpft/noise.hpp"
#include "qpft/pft.hpp"
#include "qpft/phase_study.hpp"

namespace fs = std::filesystem;
using qpft::io::json;
using qpft::io::Table;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;

struct Options {
  std::string config_path;
  std::vector<std::uint64_t> seeds;
  std::string out;
  int jobs = 0;
  std::string format;
  // gates subcommand
  std::string gate;
  int qubits = 0;
  int phase = -1;
  double alpha = qpft::kPi / 2.0;
};

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

std::mutex log_mutex;

template <typename... Args>
void log(Args&&... args) {
  std::lock_guard<std::mutex> lock(log_mutex);
  (std::cerr << ... << args) << '\n';
}

/// Runs independent tasks on a fixed number of worker threads. Each task
/// writes only to its own result slot, so results merge in submission order.
void run_pool(std::size_t count, int jobs, const std::function<void(std::size_t)>& task) {
  const auto workers = static_cast<std::size_t>(std::max(1, jobs));
  if (workers == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> threads;
  for (std::size_t w = 0; w < std::min(workers, count); ++w)
    threads.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) task(i);
    });
  for (auto& t : threads) t.join();
}

struct Failure {
  std::string task;
  std::uint64_t seed = 0;
  std::string error;
};

class Run {
 public:
  Run(std::string command, qpft::config::ExperimentConfig cfg, std::string config_path)
      : command_(std::move(command)), cfg_(std::move(cfg)), config_path_(std::move(config_path)),
        started_(utc_now()) {
    fs::create_directories(cfg_.output);
  }

  const qpft::config::ExperimentConfig& cfg() const { return cfg_; }
  bool as_json() const { return cfg_.format == qpft::config::Format::Json; }
  std::string path(const std::string& name) const { return (fs::path(cfg_.output) / name).string(); }

  void save_json(const std::string& name, const json& j) const {
    std::ofstream out(path(name));
    if (!out) throw qpft::Error("cannot write " + path(name));
    out << j.dump(2) << '\n';
  }

  void save_table(const std::string& stem, const Table& t) const { t.save(path(stem), as_json()); }

  void fail(std::string task, std::uint64_t seed, std::string error) {
    log("error: ", task, " (seed ", seed, "): ", error);
    failures_.push_back({std::move(task), seed, std::move(error)});
  }

  bool has_failures() const { return !failures_.empty(); }

  /// Failures go to a deterministic manifest; timestamps only to the run manifest.
  void finish(int exit_code) const {
    json f = json::array();
    for (const auto& x : failures_) f.push_back({{"task", x.task}, {"seed", x.seed}, {"error", x.error}});
    save_json("failures.json", f);
    save_json("run_manifest.json", {{"command", command_},
                                    {"config", config_path_},
                                    {"started", started_},
                                    {"finished", utc_now()},
                                    {"jobs", cfg_.jobs},
                                    {"seeds", cfg_.seeds},
                                    {"exit_code", exit_code}});
  }

 private:
  std::string command_;
  qpft::config::ExperimentConfig cfg_;
  std::string config_path_;
  std::string started_;
  std::vector<Failure> failures_;
};

json gate_json(const qpft::config::GateBlock& g) {
  return {{"name", g.name}, {"phase_index", g.phase_index}, {"alpha", g.alpha}, {"seed", g.seed}};
}

std::string seed_tag(std::uint64_t seed) { return "seed" + std::to_string(seed); }

// ---------------------------------------------------------------------------

int cmd_optimize(Run& run) {
  const auto& c = run.cfg();
  const qpft::SpinSystem system = c.system.build();
  const auto model = std::make_shared<const qpft::Model>(system);
  const qpft::TargetGate gate = qpft::make_gate(c.gate.spec(), system.qubits(), c.gate.phase_index);
  const qpft::TimeGrid grid = qpft::make_grid(c.optimize.final_time, system, c.grid_safety);

  struct Slot {
    std::optional<qpft::DmorphResult> result;
    std::string error;
  };
  std::vector<Slot> slots(c.seeds.size());
  run_pool(c.seeds.size(), c.jobs, [&](std::size_t i) {
    try {
      const auto init = qpft::init_fields(system, grid, c.seeds[i], c.spectral_components);
      slots[i].result = qpft::dmorph_run(model, gate, init, c.objective, c.optimizer);
      const auto& tr = slots[i].result->trace;
      log("optimize seed ", c.seeds[i], ": ", qpft::to_string(tr.termination), " after ",
          tr.accepted, " steps, objective ", tr.final_objective());
    } catch (const std::exception& e) {
      slots[i].error = e.what();
    }
  });

  Table summary({"seed", "T", "termination", "final_objective", "effort", "rejected",
                 "gradient_evaluations", "lambda_star", "fluence_star"});
  bool stalled = false, budget = false;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const std::uint64_t seed = c.seeds[i];
    if (!slots[i].result) {
      run.fail("optimize", seed, slots[i].error);
      continue;
    }
    const auto& r = *slots[i].result;
    const auto& tr = r.trace;
    stalled |= tr.termination == qpft::Termination::Stalled;
    budget |= tr.termination == qpft::Termination::Budget;
    run.save_table("optimize_" + seed_tag(seed) + "_trace", qpft::io::trace_table(tr));
    json s = qpft::io::trace_summary(tr, seed, c.objective, c.optimizer);
    s["T"] = grid.final_time();
    s["steps"] = grid.steps();
    s["gate"] = gate_json(c.gate);
    run.save_json("optimize_" + seed_tag(seed) + "_summary.json", s);
    run.save_json("optimize_" + seed_tag(seed) + "_fields.json", qpft::io::fields_to_json(r.fields, seed));
    summary.add_row({static_cast<long long>(seed), grid.final_time(), qpft::to_string(tr.termination),
                     tr.final_objective(), static_cast<long long>(tr.accepted),
                     static_cast<long long>(tr.rejected),
                     static_cast<long long>(tr.gradient_evaluations), tr.lambda_star(),
                     tr.fluence_star()});
  }
  run.save_table("optimize", summary);
  if (stalled) return 2;
  if (budget) return 3;
  return run.has_failures() ? 4 : kExitOk;
}

// ---------------------------------------------------------------------------

json pft_settings_json(const qpft::PftSettings& s) {
  return {{"T0", s.initial_time},
          {"dt_fraction", s.dt_fraction},
          {"absolute_dt", s.absolute_dt},
          {"stop_value", s.stop_value},
          {"min_time", s.min_time},
          {"max_points", s.max_points},
          {"base_budget", s.dmorph.max_steps},
          {"scale_budget", s.scale_budget},
          {"retry_factor", s.budget_retry_factor},
          {"verify", s.verify},
          {"grid_safety", s.grid_safety},
          {"resample", s.resample == qpft::ResampleMode::Compress ? "compress" : "truncate"},
          {"dmorph", qpft::io::settings_to_json(s.dmorph)}};
}

int cmd_pft(Run& run) {
  const auto& c = run.cfg();
  const qpft::SpinSystem system = c.system.build();
  const auto model = std::make_shared<const qpft::Model>(system);
  const qpft::TargetGate gate = qpft::make_gate(c.gate.spec(), system.qubits(), c.gate.phase_index);
  fs::create_directories(run.path("fields"));

  struct Slot {
    std::optional<qpft::PftTrajectory> traj;
    std::string error;
  };
  std::vector<Slot> slots(c.seeds.size());
  run_pool(c.seeds.size(), c.jobs, [&](std::size_t i) {
    qpft::PftSettings s = c.pft;
    s.seed = c.seeds[i];
    try {
      slots[i].traj = qpft::pft_run(model, gate, s, [&](const qpft::ParetoPoint& p) {
        log("pft seed ", s.seed, ": T = ", p.final_time, " objective ", p.best_objective, " (",
            qpft::to_string(p.termination), ", ", p.effort, " steps)");
      });
    } catch (const std::exception& e) {
      slots[i].error = e.what();
    }
  });

  bool first_step_failed = false, missing_estimate = false;
  json all = json::array();
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const std::uint64_t seed = c.seeds[i];
    if (!slots[i].traj) {
      first_step_failed = true;
      run.fail("pft", seed, slots[i].error);
      continue;
    }
    const auto& traj = *slots[i].traj;
    Table pareto({"T", "best_objective", "effort", "lambda_star", "fluence_star", "termination",
                  "seed"});
    for (std::size_t p = 0; p < traj.points.size(); ++p) {
      const auto& pt = traj.points[p];
      pareto.add_row({pt.final_time, pt.best_objective, static_cast<long long>(pt.effort),
                      pt.lambda_star, pt.fluence_star, qpft::to_string(pt.termination),
                      static_cast<long long>(seed)});
      run.save_json("fields/pft_" + seed_tag(seed) + "_p" + std::to_string(p) + ".json",
                    qpft::io::fields_to_json(pt.fields, seed));
    }
    run.save_table("pareto_" + seed_tag(seed), pareto);
    json budgets = json::array();
    for (const auto& pt : traj.points)
      budgets.push_back({{"T", pt.final_time}, {"budget", pt.budget}, {"retried", pt.retried}});
    json s = {{"seed", seed},
              {"gate", gate_json(c.gate)},
              {"T0_used", traj.initial_time},
              {"points", traj.points.size()},
              {"stop_reason", traj.stop_reason},
              {"confident", traj.confident},
              {"notes", traj.notes},
              {"budgets", budgets},
              {"settings", pft_settings_json(traj.settings)}};
    if (traj.t_star) {
      s["t_star"] = traj.t_star->value;
      s["t_star_uncertainty"] = traj.t_star->uncertainty;
    } else {
      s["t_star"] = nullptr;
      missing_estimate = true;
    }
    run.save_json("pft_" + seed_tag(seed) + "_summary.json", s);
    all.push_back(s);
  }
  run.save_json("pft_summary.json", all);
  if (first_step_failed) return 2;
  return missing_estimate ? 3 : kExitOk;
}

// ---------------------------------------------------------------------------

int cmd_sweep(Run& run) {
  const auto& c = run.cfg();
  const qpft::SpinSystem reference = c.system.build();
  const int n = reference.qubits();
  std::vector<qpft::ScalingCase> cases;
  if (!c.sweep.coupling_sets.empty()) {
    for (std::size_t i = 0; i < c.sweep.coupling_sets.size(); ++i) {
      const auto& upper = c.sweep.coupling_sets[i];
      if (static_cast<int>(upper.size()) != n * (n - 1) / 2)
        throw qpft::Error("sweep.couplings: each set needs n(n-1)/2 entries");
      qpft::RMatrix m = qpft::RMatrix::Zero(n, n);
      std::size_t q = 0;
      for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) m(a, b) = m(b, a) = upper[q++];
      double mean = 0.0;
      for (double x : upper) mean += x;
      mean /= static_cast<double>(upper.size());
      const double t0 = c.sweep.coupling_t0.empty()
                            ? c.sweep.reference_t0 * c.sweep.reference_j / mean
                            : c.sweep.coupling_t0[i];
      cases.push_back({m, t0});
    }
  } else {
    cases = qpft::equal_coupling_cases(n, c.sweep.j_values, c.sweep.reference_t0,
                                       c.sweep.reference_j);
  }

  qpft::PftSettings base = c.pft;
  base.seed = c.seeds.front();
  std::vector<qpft::ScalingStudy> parts(cases.size());
  run_pool(cases.size(), c.jobs, [&](std::size_t i) {
    parts[i] = qpft::scaling_study(reference.omega(), c.gate.spec(), c.gate.phase_index,
                                   {cases[i]}, base);
    const auto& row = parts[i].rows.front();
    if (row.t_star)
      log("sweep J = ", row.coupling, ": T* = ", row.t_star->value);
    else
      log("sweep J = ", row.coupling, ": no estimate");
  });

  std::vector<double> xs, ys;
  for (const auto& p : parts)
    for (const auto& row : p.rows)
      if (row.t_star) {
        xs.push_back(row.coupling);
        ys.push_back(row.t_star->value);
      }
  std::optional<double> slope;
  if (xs.size() >= 2) slope = qpft::loglog_slope(xs, ys);

  Table table({"J", "T_star", "uncertainty", "confident", "slope"});
  for (const auto& p : parts) {
    const auto& row = p.rows.front();
    if (!row.t_star) {
      run.fail("sweep J=" + qpft::io::format_double(row.coupling), base.seed, row.error);
      continue;
    }
    table.add_row({row.coupling, row.t_star->value, row.t_star->uncertainty,
                   static_cast<long long>(row.confident), slope ? *slope : std::nan("")});
  }
  run.save_table("scaling", table);
  json s = {{"seed", base.seed}, {"gate", gate_json(c.gate)}, {"points", xs.size()},
            {"settings", pft_settings_json(base)}};
  s["slope"] = slope ? json(*slope) : json(nullptr);
  run.save_json("sweep_summary.json", s);
  return run.has_failures() ? 2 : kExitOk;
}

// ---------------------------------------------------------------------------

int cmd_noise(Run& run) {
  const auto& c = run.cfg();
  const qpft::SpinSystem system = c.system.build();
  const auto model = std::make_shared<const qpft::Model>(system);
  const qpft::TargetGate gate = qpft::make_gate(c.gate.spec(), system.qubits(), c.gate.phase_index);
  qpft::NoiseSpec proto = qpft::NoiseSpec::independent(system.qubits(), 0.0);
  if (c.noise.beta) proto.beta = *c.noise.beta;

  struct Slot {
    std::vector<std::vector<qpft::io::Table::Cell>> rows;
    std::string error;
  };
  std::vector<Slot> slots(c.seeds.size());
  run_pool(c.seeds.size(), c.jobs, [&](std::size_t i) {
    const std::uint64_t seed = c.seeds[i];
    try {
      qpft::ControlFieldSet optimal = [&] {
        if (!c.noise.fields_path.empty()) {
          std::ifstream in(c.noise.fields_path);
          if (!in) throw qpft::Error("cannot open " + c.noise.fields_path);
          return qpft::io::fields_from_json(json::parse(in));
        }
        const auto grid = qpft::make_grid(c.noise.final_time, system, c.grid_safety);
        auto r = qpft::dmorph_run(model, gate,
                                  qpft::init_fields(system, grid, seed, c.spectral_components),
                                  qpft::ObjectiveKind::PhaseDependent, c.optimizer);
        if (r.trace.termination != qpft::Termination::Converged)
          throw qpft::Error("noiseless optimization did not converge (" +
                            qpft::to_string(r.trace.termination) + ")");
        return std::move(r.fields);
      }();
      const double t = optimal.grid.final_time();
      for (double sigma2 : c.noise.sigma2) {
        qpft::NoiseSpec spec = proto;
        spec.sigma2 = sigma2;
        const double predicted = qpft::predicted_error(*model, t, spec);
        const auto mc = qpft::monte_carlo_error(model, gate, optimal, spec, c.noise.trials, seed,
                                                c.noise.substeps);
        log("noise seed ", seed, ": sigma2 = ", sigma2, " predicted ", predicted, " mc ", mc.mean,
            " +- ", mc.standard_error);
        slots[i].rows.push_back({sigma2, t, predicted, mc.mean, mc.standard_error,
                                 static_cast<long long>(mc.trials), static_cast<long long>(seed)});
      }
    } catch (const std::exception& e) {
      slots[i].error = e.what();
    }
  });

  Table table({"sigma2", "T", "predicted", "mc_mean", "mc_stderr", "trials", "seed"});
  for (std::size_t i = 0; i < slots.size(); ++i) {
    for (auto& row : slots[i].rows) table.add_row(std::move(row));
    if (!slots[i].error.empty()) run.fail("noise", c.seeds[i], slots[i].error);
  }
  run.save_table("noise", table);
  return run.has_failures() ? 2 : kExitOk;
}

// ---------------------------------------------------------------------------

int cmd_phases(Run& run) {
  const auto& c = run.cfg();
  const qpft::SpinSystem system = c.system.build();
  const auto model = std::make_shared<const qpft::Model>(system);
  const qpft::TargetGate gate = qpft::make_gate(c.gate.spec(), system.qubits(), c.gate.phase_index);
  const qpft::TimeGrid grid = qpft::make_grid(c.phases.final_time, system, c.grid_safety);

  // A single listed seed starts a block of `runs` consecutive seeds.
  std::vector<std::uint64_t> seeds = c.seeds;
  if (seeds.size() == 1)
    for (int i = 1; i < c.phases.runs; ++i) seeds.push_back(c.seeds.front() + i);

  std::vector<std::optional<qpft::PhaseRunRecord>> records(seeds.size());
  std::vector<std::string> errors(seeds.size());
  run_pool(seeds.size(), c.jobs, [&](std::size_t i) {
    try {
      records[i] = qpft::phase_run(model, gate, grid, seeds[i], c.optimizer, c.spectral_components);
      log("phases seed ", seeds[i], ": G = ", records[i]->final_g, ", m = ",
          records[i]->phase_index);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });

  Table table({"seed", "final_G", "converged", "phase_m", "effort", "lambda_star"});
  std::vector<qpft::PhaseRunRecord> done;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (!records[i]) {
      run.fail("phases", seeds[i], errors[i]);
      continue;
    }
    const auto& r = *records[i];
    table.add_row({static_cast<long long>(r.seed), r.final_g, static_cast<long long>(r.converged),
                   static_cast<long long>(r.phase_index), static_cast<long long>(r.effort),
                   r.lambda_star});
    done.push_back(r);
  }
  run.save_table("ensemble", table);
  const auto summary = qpft::summarize_phases(done, gate.dimension());
  json classes = json::array();
  for (int m = 0; m < gate.dimension(); ++m)
    classes.push_back({{"m", m},
                       {"count", summary.counts[m]},
                       {"fraction", done.empty() ? 0.0 : double(summary.counts[m]) / done.size()},
                       {"mean_G", summary.mean_g[m]},
                       {"mean_distance", summary.mean_distance[m]}});
  int switches = 0;
  for (const auto& r : done) switches += r.class_switches;
  run.save_json("phases_summary.json", {{"T", grid.final_time()},
                                        {"gate", gate_json(c.gate)},
                                        {"runs", done.size()},
                                        {"classes", classes},
                                        {"class_switches", switches},
                                        {"settings", qpft::io::settings_to_json(c.optimizer)}});
  return run.has_failures() ? 2 : kExitOk;
}

// ---------------------------------------------------------------------------

std::string format_entry(qpft::cplx z) {
  auto clean = [](double x) { return std::abs(x) < 5e-13 ? 0.0 : x; };
  char buf[64];
  std::snprintf(buf, sizeof buf, "%+.6f%+.6fi", clean(z.real()), clean(z.imag()));
  return buf;
}

int cmd_gates(const Options& opt, const qpft::config::ExperimentConfig& cfg) {
  qpft::config::GateBlock g = cfg.gate;
  if (!opt.gate.empty()) g.name = opt.gate;
  if (opt.phase >= 0) g.phase_index = opt.phase;
  if (!opt.gate.empty()) g.alpha = opt.alpha;
  const int n = opt.qubits > 0 ? opt.qubits : cfg.system.build().qubits();
  const qpft::TargetGate w = qpft::make_gate(g.spec(), n, g.phase_index);
  if (cfg.format == qpft::config::Format::Json) {
    json rows = json::array();
    for (int r = 0; r < w.dimension(); ++r) {
      json row = json::array();
      for (int col = 0; col < w.dimension(); ++col)
        row.push_back({w.matrix(r, col).real(), w.matrix(r, col).imag()});
      rows.push_back(row);
    }
    std::cout << json{{"name", w.name}, {"phase_index", w.phase_index}, {"matrix", rows}}.dump(2)
              << '\n';
    return kExitOk;
  }
  const qpft::cplx det = w.matrix.determinant();
  std::cout << w.name << " (n = " << n << ", m = " << w.phase_index
            << "), det = " << format_entry(det) << '\n';
  for (int r = 0; r < w.dimension(); ++r) {
    for (int col = 0; col < w.dimension(); ++col)
      std::cout << (col ? "  " : "") << format_entry(w.matrix(r, col));
    std::cout << '\n';
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum gate control: D-MORPH optimization and Pareto front tracking"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may also follow the subcommand
  Options opt;
  app.add_option("--config", opt.config_path, "Experiment configuration file");
  app.add_option("--seed", opt.seeds, "Random seed (repeatable; replaces the config list)");
  app.add_option("--out", opt.out, "Output directory");
  app.add_option("--jobs", opt.jobs, "Worker threads for independent runs")->check(CLI::PositiveNumber);
  app.add_option("--format", opt.format, "Table format")->check(CLI::IsMember({"csv", "json"}));

  const std::vector<std::pair<std::string, std::string>> commands{
      {"optimize", "Run D-MORPH at fixed T for each seed"},
      {"pft", "Track the Pareto front downward in T and estimate T*"},
      {"sweep", "Critical time versus coupling strength"},
      {"noise", "Additive white noise: prediction and Monte Carlo"},
      {"phases", "Phase-independent ensemble and global-phase classes"},
      {"gates", "Print a target gate matrix"}};
  std::map<std::string, CLI::App*> sub;
  for (const auto& [name, help] : commands) sub[name] = app.add_subcommand(name, help);
  sub["gates"]->add_option("--gate", opt.gate, "Gate name (CNOT, SWAP, SQRT_SWAP, QFT, QFT', CPHASE, I)");
  sub["gates"]->add_option("--qubits", opt.qubits, "Number of qubits");
  sub["gates"]->add_option("--phase", opt.phase, "Global phase index m");
  sub["gates"]->add_option("--alpha", opt.alpha, "CPHASE angle");

  CLI11_PARSE(app, argc, argv);

  std::string command;
  for (const auto& [name, ptr] : sub)
    if (ptr->parsed()) command = name;

  qpft::config::ExperimentConfig cfg;
  try {
    if (!opt.config_path.empty()) cfg = qpft::config::from_file(opt.config_path);
    if (!opt.seeds.empty()) cfg.seeds = opt.seeds;
    if (!opt.out.empty()) cfg.output = opt.out;
    if (opt.jobs > 0) cfg.jobs = opt.jobs;
    if (opt.format == "json") cfg.format = qpft::config::Format::Json;
    if (opt.format == "csv") cfg.format = qpft::config::Format::Csv;
    cfg.finalize();
  } catch (const std::exception& e) {
    std::cerr << (opt.config_path.empty() ? "config" : opt.config_path) << ": " << e.what() << '\n';
    return kExitConfig;
  }

  if (command == "gates") {
    try {
      return cmd_gates(opt, cfg);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kExitConfig;
    }
  }

  int code = kExitConfig;
  try {
    Run run(command, cfg, opt.config_path);
    if (command == "optimize") code = cmd_optimize(run);
    else if (command == "pft") code = cmd_pft(run);
    else if (command == "sweep") code = cmd_sweep(run);
    else if (command == "noise") code = cmd_noise(run);
    else if (command == "phases") code = cmd_phases(run);
    run.finish(code);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return code;
}
