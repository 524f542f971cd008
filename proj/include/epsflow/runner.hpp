#pragma once

#include <ostream>
#include <string>

#include "epsflow/config.hpp"
#include "epsflow/diagnostics.hpp"
#include "epsflow/solver.hpp"

namespace epsflow {

// Subcommand pipelines. Each writes its artifacts plus a manifest under
// out_dir and returns the files it produced. Errors propagate as exceptions;
// the CLI maps them to exit codes (2 config, 3 solver, 4 diagnostics).
struct RunOutputs {
  std::vector<std::string> files;
};

int print_validation(const ValidationReport& rep, std::ostream& os);

RunOutputs run_minimize(const ExperimentConfig& cfg, const std::string& out_dir);
RunOutputs run_sweep(const ExperimentConfig& cfg, const std::string& out_dir);
RunOutputs run_decay(const ExperimentConfig& cfg, const std::string& out_dir);
RunOutputs run_boundary_decay(const ExperimentConfig& cfg, const std::string& out_dir);
RunOutputs run_extend(const ExperimentConfig& cfg, const std::string& out_dir, int levels);
RunOutputs run_report(const ExperimentConfig& cfg, const std::string& out_dir);

// CSV helpers shared by the pipelines and tests.
void write_iteration_log(const std::vector<IterRow>& log, const std::string& path);
void write_sweep_csv(const SweepResult& sweep, const std::string& path);
void write_convergence_csv(const std::vector<ConvergenceRow>& rows, const std::string& path);
void write_decay_csv(const DecayReport& rep, const std::string& path);

}  // namespace epsflow
