#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "epsflow/energy.hpp"
#include "epsflow/field.hpp"

namespace epsflow {

enum class AnchoringKind { Dirichlet, Weak, Free };

// Dirichlet data lives in the field's frozen nodes. Weak anchoring applies
// the Rapini-Papoular surface density g(x,u) = W0 |u - Q_b(x)|^2 on the
// domain's boundary faces (flat face for half balls, all faces for boxes).
struct AnchoringSpec {
  AnchoringKind kind = AnchoringKind::Dirichlet;
  double strength = 0.0;  // W0 >= 0
  std::function<TargetPoint(const Vec3&)> preferred;

  static AnchoringSpec dirichlet() { return AnchoringSpec{AnchoringKind::Dirichlet, 0.0, {}}; }
  static AnchoringSpec free_boundary() { return AnchoringSpec{AnchoringKind::Free, 0.0, {}}; }
  static AnchoringSpec weak(double w0, std::function<TargetPoint(const Vec3&)> qb);
};

struct MinimizeConfig {
  double epsilon = 0.1;
  int max_iters = 20000;
  double grad_tol = 1e-4;      // threshold on the max node residual density
  double initial_step = 1e-3;
  double armijo_c = 1e-4;
  double step_shrink = 0.5;
  void validate(const Grid& grid) const;
};

struct SweepConfig {
  double epsilon0 = 0.25;
  double ratio = 0.5;  // in (0,1)
  int count = 4;
  bool warm_start = true;
  void validate() const;
  std::vector<double> schedule() const;
};

struct IterRow {
  int iter;
  double energy_total;
  double energy_elastic;
  double energy_potential;  // eps^-2 int f
  double max_residual;
  double step_size;
};

struct MinimizeResult {
  Field field;
  std::vector<IterRow> log;
  bool converged = false;
  double final_residual = 0.0;
  int iterations = 0;
};

struct SweepStage {
  double epsilon;
  double energy_total;
  double energy_elastic;
  double energy_potential;  // eps^-2 int f
  double max_dist_to_N;
  double h1_increment;  // to the previous stage; 0 for the first
  double sup_norm;
  int iterations;
  double final_residual;
};

struct SweepResult {
  std::vector<SweepStage> stages;
  std::vector<Field> fields;
};

// Gradient of the discrete objective divided by h^3, zero at frozen nodes;
// minus the residual is the descent direction.
Field el_residual(const Field& f, double eps, const ElasticModel& model,
                  const Potential& pot, const AnchoringSpec& anchoring);

// Total discrete objective the solver descends (variational elastic part,
// midpoint potential part, surface term under weak anchoring).
EnergyBreakdown objective_energy(const Field& f, double eps, const ElasticModel& model,
                                 const Potential& pot, const AnchoringSpec& anchoring);

MinimizeResult minimize(const Field& init, const MinimizeConfig& cfg,
                        const ElasticModel& model, const Potential& pot,
                        const AnchoringSpec& anchoring);

SweepResult epsilon_sweep(const Field& init, const SweepConfig& sweep,
                          const MinimizeConfig& base, const ElasticModel& model,
                          const Potential& pot, const AnchoringSpec& anchoring);

}  // namespace epsflow
