#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <iostream>
#include <optional>

#include "qdmd/experiment.hpp"
#include "qdmd/verify.hpp"

namespace fs = std::filesystem;
using namespace qdmd;

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kPropertyFailure = 2;

struct Globals {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
};

ExperimentConfig load(const Globals& g) {
  if (g.config.empty()) throw ConfigError("--config is required for this command");
  ExperimentConfig cfg = load_config(g.config);
  if (g.seed) cfg.seed = *g.seed;
  if (g.threads) cfg.threads = *g.threads;
  cfg.validate();
  return cfg;
}

fs::path out_dir(const Globals& g) {
  fs::path dir(g.out);
  fs::create_directories(dir);
  return dir;
}

SnapshotSeries trajectory_for(const ExperimentConfig& cfg, const std::string& path, const fs::path& dir) {
  if (!path.empty()) return read_csv(fs::path(path));
  if (fs::exists(dir / "trajectory.csv")) return read_csv(dir / "trajectory.csv");
  fmt::print(stderr, "no trajectory given; simulating {}\n", cfg.name);
  SnapshotSeries s = simulate(cfg);
  write_csv(dir / "trajectory.csv", s);
  write_provenance(dir, cfg);
  return s;
}

int cmd_simulate(const Globals& g) {
  const ExperimentConfig cfg = load(g);
  const fs::path dir = out_dir(g);
  const SnapshotSeries s = simulate(cfg);
  write_csv(dir / "trajectory.csv", s);
  write_provenance(dir, cfg);
  fmt::print("{}: {} observables x {} snapshots -> {}\n", cfg.name, s.rows(), s.columns(),
             (dir / "trajectory.csv").string());
  return kOk;
}

int cmd_extrapolate(const Globals& g, const std::string& trajectory, bool gnuplot) {
  const ExperimentConfig cfg = load(g);
  const fs::path dir = out_dir(g);
  const Extrapolation run = extrapolate(cfg, trajectory_for(cfg, trajectory, dir));
  write_csv(dir / "prediction.csv", run.prediction);
  write_error_csv(dir / "error.csv", run.curve);
  write_json(dir / "model.json", to_json(run.model));
  nlohmann::json env = to_json(run.envelope);
  env["final_error"] = run.curve.aggregate().back();
  write_json(dir / "envelope.json", env);
  write_text(dir / "config.toml", cfg.to_text());
  if (gnuplot) write_text(dir / "plot.gp", gnuplot_script(run));

  for (const auto& f : run.model.failures()) fmt::print(stderr, "fit failed for {}\n", f);
  fmt::print("{} m={} {}: |Delta(T)| = {:.3e}, C = {:.3e}, tail slope = {:.3f} -> envelope {}\n", cfg.name,
             cfg.fit_window, cfg.embedding.describe(), run.curve.aggregate().back(), run.envelope.C,
             run.envelope.tail_slope, run.envelope.pass ? "pass" : "FAIL");
  return run.envelope.pass && run.model.failures().empty() ? kOk : kPropertyFailure;
}

int cmd_sweep(const Globals& g, const std::string& trajectory, const std::vector<std::size_t>& m_override) {
  ExperimentConfig cfg = load(g);
  if (!m_override.empty()) cfg.sweep_m = m_override;
  const fs::path dir = out_dir(g);
  const auto points = sweep(cfg, trajectory_for(cfg, trajectory, dir));
  write_sweep_csv(dir / "sweep.csv", points);
  write_text(dir / "config.toml", cfg.to_text());
  for (const auto& p : points) {
    if (p.skipped) {
      fmt::print(stderr, "{}\n", p.notice);
    } else {
      fmt::print("m={:>5}  |Delta(T)| = {:.3e}\n", p.m, p.error);
    }
  }
  return kOk;
}

int cmd_bound(const Globals& g, const std::string& trajectory) {
  const ExperimentConfig cfg = load(g);
  const fs::path dir = out_dir(g);
  const Extrapolation run = extrapolate(cfg, trajectory_for(cfg, trajectory, dir));
  const BoundReport report = bound_report(cfg, run);
  nlohmann::json j = report.to_json();
  j["config"] = cfg.to_json();
  write_json(dir / "bound.json", j);
  for (const auto& r : report.rows) {
    fmt::print("{}: ||H||_F = {:.4g}, ||O||_F = {:.4g}, c_m = {:.3e}, cond(Phi) = {:.3e}, worst |Delta|/bound = {:.3e} -> {}\n",
               r.label, r.inputs.h_frobenius, r.inputs.o_frobenius, r.inputs.c_m, r.inputs.phi_cond, r.worst_ratio,
               r.dominated ? "dominated" : "VIOLATED");
  }
  return report.pass() ? kOk : kPropertyFailure;
}

int cmd_verify(const Globals& g, bool mutate) {
  VerifyOptions opt;
  if (g.seed) opt.seed = *g.seed;
  opt.mutate_jw = mutate;
  const VerifyReport report = run_verify(opt);
  for (const auto& r : report.results) {
    fmt::print("{:<34} {}  measured={:.3e} tol={:.1e}  {}\n", r.name, r.pass ? "pass" : "FAIL", r.measured, r.tolerance,
               r.detail);
  }
  const fs::path dir = out_dir(g);
  write_json(dir / "verify.json", report.to_json());
  return report.pass() ? kOk : kPropertyFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trotter simulation and iHODMD extrapolation of lattice quench observables"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);

  Globals g;
  app.add_option("--config", g.config, "experiment config file");
  app.add_option("--out", g.out, "output directory")->capture_default_str();
  app.add_option("--seed", g.seed, "override run.seed");
  app.add_option("--threads", g.threads, "override run.threads")->check(CLI::PositiveNumber);

  std::string trajectory;
  bool gnuplot = false;
  bool mutate = false;
  std::vector<std::size_t> m_values;

  auto* simulate_cmd = app.add_subcommand("simulate", "run the Trotter quench and record observables");
  auto* extrapolate_cmd = app.add_subcommand("extrapolate", "fit iHODMD on the first m snapshots and predict");
  extrapolate_cmd->add_option("--trajectory", trajectory, "trajectory CSV (default: <out>/trajectory.csv)");
  extrapolate_cmd->add_flag("--gnuplot", gnuplot, "also write plot.gp");
  auto* sweep_cmd = app.add_subcommand("sweep-m", "final-time error against the fit window m");
  sweep_cmd->add_option("--trajectory", trajectory, "trajectory CSV (default: <out>/trajectory.csv)");
  sweep_cmd->add_option("--m", m_values, "override sweep.m_values");
  auto* bound_cmd = app.add_subcommand("bound-report", "evaluate the global error bound against the measured error");
  bound_cmd->add_option("--trajectory", trajectory, "trajectory CSV (default: <out>/trajectory.csv)");
  auto* verify_cmd = app.add_subcommand("verify", "run the property suite");
  verify_cmd->add_flag("--mutate-jw", mutate, "negative control: corrupt the Jordan-Wigner YY sign");

  for (auto* sub : {simulate_cmd, extrapolate_cmd, sweep_cmd, bound_cmd, verify_cmd}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*simulate_cmd) return cmd_simulate(g);
    if (*extrapolate_cmd) return cmd_extrapolate(g, trajectory, gnuplot);
    if (*sweep_cmd) return cmd_sweep(g, trajectory, m_values);
    if (*bound_cmd) return cmd_bound(g, trajectory);
    if (*verify_cmd) return cmd_verify(g, mutate);
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kValidation;
  }
  return kValidation;
}
