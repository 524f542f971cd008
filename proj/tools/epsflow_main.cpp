#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "epsflow/config.hpp"
#include "epsflow/parallel.hpp"
#include "epsflow/runner.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kSolverError = 3;
constexpr int kDiagnosticsError = 4;

epsflow::ExperimentConfig load(const std::string& config_path, const std::string& preset) {
  if (!preset.empty())
    return epsflow::parse_config(epsflow::preset_text(preset), "preset:" + preset);
  if (config_path.empty())
    throw epsflow::ConfigError("either --config or --preset is required");
  return epsflow::load_config(config_path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"epsflow: singularly perturbed manifold-valued energy laboratory"};
  app.require_subcommand(1);

  std::string config_path, preset, out_dir = "out";
  bool deterministic = false;
  int threads = 1;
  app.add_option("--config", config_path, "path to a JSON experiment config");
  app.add_option("--preset", preset, "built-in preset name");
  app.add_option("--out", out_dir, "output directory");
  app.add_flag("--deterministic", deterministic,
               "pin single-threaded execution for byte-identical outputs");
  app.add_option("--threads", threads, "worker threads for node loops");

  double epsilon_override = 0.0;
  int levels = 3;
  std::string center_override;
  auto* validate_cmd = app.add_subcommand("validate", "check a config against the model assumptions");
  auto* minimize_cmd = app.add_subcommand("minimize", "run a single gradient-flow minimization");
  auto* sweep_cmd = app.add_subcommand("sweep", "run the epsilon continuation sweep");
  auto* decay_cmd = app.add_subcommand("decay", "minimize, then tabulate renormalized energy decay");
  auto* bdecay_cmd = app.add_subcommand("boundary-decay", "half-ball run with boundary decay profiles");
  auto* extend_cmd = app.add_subcommand("extend", "boundary modification / extension scaling study");
  auto* report_cmd = app.add_subcommand("report", "full pipeline: solve plus all configured diagnostics");
  for (auto* cmd : {minimize_cmd, sweep_cmd, decay_cmd, bdecay_cmd, report_cmd})
    cmd->add_option("--epsilon", epsilon_override, "override solver.epsilon");
  extend_cmd->add_option("--levels", levels, "number of dyadic lambda levels");
  for (auto* cmd : {decay_cmd, bdecay_cmd, report_cmd})
    cmd->add_option("--center", center_override, "diagnostic center x,y,z");
  for (auto* cmd : {validate_cmd, minimize_cmd, sweep_cmd, decay_cmd, bdecay_cmd,
                    extend_cmd, report_cmd})
    cmd->fallthrough();

  CLI11_PARSE(app, argc, argv);

  epsflow::set_num_threads(deterministic ? 1 : threads);

  epsflow::ExperimentConfig cfg;
  try {
    cfg = load(config_path, preset);
    if (deterministic) cfg.output.deterministic = true;
    if (epsilon_override > 0) cfg.solver.minimize.epsilon = epsilon_override;
    if (!center_override.empty()) {
      std::array<double, 3> c{};
      if (std::sscanf(center_override.c_str(), "%lf,%lf,%lf", &c[0], &c[1], &c[2]) != 3)
        throw epsflow::ConfigError("--center expects x,y,z");
      cfg.diagnostics.centers = {c};
    }
  } catch (const epsflow::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    if (app.got_subcommand(validate_cmd)) {
      const auto rep = epsflow::validate_config(cfg);
      return epsflow::print_validation(rep, std::cout);
    }
    if (app.got_subcommand(minimize_cmd)) {
      epsflow::run_minimize(cfg, out_dir);
      return kOk;
    }
    if (app.got_subcommand(sweep_cmd)) {
      epsflow::run_sweep(cfg, out_dir);
      return kOk;
    }
    if (app.got_subcommand(decay_cmd)) {
      epsflow::run_decay(cfg, out_dir);
      return kOk;
    }
    if (app.got_subcommand(bdecay_cmd)) {
      epsflow::run_boundary_decay(cfg, out_dir);
      return kOk;
    }
    if (app.got_subcommand(extend_cmd)) {
      epsflow::run_extend(cfg, out_dir, levels);
      return kOk;
    }
    if (app.got_subcommand(report_cmd)) {
      epsflow::run_report(cfg, out_dir);
      return kOk;
    }
  } catch (const epsflow::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const epsflow::StagnationError& e) {
    std::cerr << "solver error: " << e.what() << " (iter " << e.iter << ", energy "
              << e.energy << ", residual " << e.residual << ")\n";
    return kSolverError;
  } catch (const epsflow::GeometryError& e) {
    std::cerr << "diagnostics error: " << e.what() << "\n";
    return kDiagnosticsError;
  } catch (const epsflow::InsufficientDataError& e) {
    std::cerr << "diagnostics error: " << e.what() << "\n";
    return kDiagnosticsError;
  } catch (const epsflow::SmallnessViolationError& e) {
    std::cerr << "diagnostics error: " << e.what() << "\n";
    return kDiagnosticsError;
  } catch (const epsflow::ConstructionError& e) {
    std::cerr << "diagnostics error: " << e.what() << "\n";
    return kDiagnosticsError;
  } catch (const epsflow::InputDomainError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const epsflow::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSolverError;
  }
  return kOk;
}
