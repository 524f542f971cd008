#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "epsflow/elastic.hpp"
#include "epsflow/field.hpp"
#include "epsflow/manifold.hpp"
#include "epsflow/solver.hpp"

namespace epsflow {

struct PotentialSection {
  std::string kind = "gl";  // "gl" | "ldg"
  double a2 = 1.0, b2 = 10.0, c2 = 1.0;
};

struct WeightSection {
  std::string kind = "none";  // "none" | "cosine"
  double amplitude = 0.0;
  std::array<double, 3> wavevector{0, 0, 0};
};

struct ElasticSection {
  std::string kind = "isotropic";  // "isotropic" | "ldg" | "general"
  double L1 = 1.0, L2 = 0.0, L3 = 0.0;
  std::vector<double> coefficients;  // (3k)^2 row-major for "general"
  WeightSection weight;
};

struct DomainSection {
  std::string kind = "ball";  // "ball" | "box" | "half_ball"
  double radius = 1.0;        // side for boxes
  std::array<double, 3> center{0, 0, 0};
  int resolution = 32;
};

struct AnchoringSection {
  std::string kind = "dirichlet";  // "dirichlet" | "weak" | "free"
  std::string data = "hedgehog";   // "hedgehog" | "constant" | "tilt"
  double amplitude = 0.1;          // tilt data amplitude
  std::array<double, 3> director{0, 0, 1};
  double strength = 1.0;           // W0 for weak anchoring
  std::string init = "data";       // "data" | "ramp" | "constant"
  double ramp_radius = 0.25;       // core radius fraction of R for "ramp"
};

struct SolverSection {
  MinimizeConfig minimize;
  bool has_sweep = false;
  SweepConfig sweep;
};

struct DiagnosticsSection {
  std::vector<std::array<double, 3>> centers;  // empty: domain center
  std::vector<double> radii;                   // empty: dyadic defaults
  double theta = 0.25;
  double r0 = 0.0;  // outer radius for the large-scale ratio; 0: R/2
  std::vector<double> alpha_grid{0.5};
  double delta = 0.1;
  double defect_tau = 0.0;  // 0: s_star/4
  double exclusion_radius = 0.25;
  double sup_bound_M = 0.0;  // 0: no (A3a) threshold configured
  double growth_p = 2.0;
  double growth_a = 0.75;
  std::vector<double> growth_radii;  // empty: 2 s_star * {1,2,4,8}
};

struct OutputSection {
  std::string directory = "out";
  bool deterministic = true;
  bool write_snapshots = true;
  bool write_vtk = false;
};

struct ExperimentConfig {
  PotentialSection potential;
  ElasticSection elastic;
  DomainSection domain;
  AnchoringSection anchoring;
  SolverSection solver;
  DiagnosticsSection diagnostics;
  OutputSection output;
  std::string source_text;  // original JSON, hashed into the manifest

  int k() const { return potential.kind == "ldg" ? 5 : 3; }
};

ExperimentConfig parse_config(const std::string& json_text, const std::string& origin);
ExperimentConfig load_config(const std::string& path);

// Built-in experiment presets; throws ConfigError for unknown names.
std::vector<std::string> preset_names();
std::string preset_text(const std::string& name);

// Assembled objects ready for the solver.
struct Problem {
  Grid grid;
  Potential pot;
  ElasticModel model;
  AnchoringSpec anchoring;
  Field initial;
  MinimizeConfig minimize;
  bool has_sweep;
  SweepConfig sweep;
};

Problem build_problem(const ExperimentConfig& cfg);

// The boundary/initial data generator named by the anchoring section.
std::function<TargetPoint(const Vec3&)> data_generator(const ExperimentConfig& cfg);

struct ValidationItem {
  std::string name;
  bool pass;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationItem> items;
  double s_star = 0, lambda_min = 0, lambda_max = 0;
  std::array<double, 3> positivity_lhs{0, 0, 0};
  double tube_c1 = 0, tube_c2 = 0;
  bool all_pass() const {
    for (const auto& it : items)
      if (!it.pass) return false;
    return true;
  }
};

// Runs the cross-checks: elastic positivity and (A1) bounds, potential
// admissibility, (A2) tube comparability, (A3b) growth, schedule vs grid
// resolution, boundary data on N, weight bounds.
ValidationReport validate_config(const ExperimentConfig& cfg);

std::uint64_t fnv1a_hash(const std::string& text);

}  // namespace epsflow
