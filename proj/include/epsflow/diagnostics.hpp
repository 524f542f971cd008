#pragma once

#include <optional>
#include <vector>

#include "epsflow/energy.hpp"
#include "epsflow/field.hpp"
#include "epsflow/solver.hpp"

namespace epsflow {

struct DecayRow {
  double r;
  double renorm_energy;     // r^{-1} E_eps(B_r)
  double renorm_dirichlet;  // r^{-1} int_{B_r} |grad u|^2
  double data_norm;         // N(u_b; B'_r) for boundary profiles, else 0
  bool below_delta;
};

struct DecayReport {
  Vec3 center{};
  std::vector<DecayRow> rows;
  bool alpha_defined = false;
  double alpha = 0.0;          // log-log slope of the Dirichlet part
  double fit_residual = 0.0;   // rms residual of the fit
  double delta = 0.0;
};

// Tabulates renormalized energies over balls and fits the decay exponent of
// the Dirichlet part. Throws InsufficientDataError below two valid radii.
DecayReport decay_profile(const Field& f, double eps, const ElasticModel& model,
                          const Potential& pot, const Vec3& center,
                          const std::vector<double>& radii, double delta = 0.0);

// theta^{-1} E_eps(B_{theta r0}) / E_eps(B_{r0}); empty when the outer ball
// energy is below 1e-14 (vacuum region).
std::optional<double> large_scale_ratio(const Field& f, double eps,
                                        const ElasticModel& model, const Potential& pot,
                                        const Vec3& center, double r0, double theta);

struct CampanatoReport {
  double sup_value = 0.0;      // sup over balls of r^{-(1+2a)} int |grad u|^2
  double holder_bound = 0.0;   // dimensional constant times sqrt(sup_value)
  double direct_quotient = 0.0;  // sup |u(x)-u(y)| / |x-y|^alpha over sampled pairs
  int balls = 0;
};

CampanatoReport campanato_holder(const Field& f, const Vec3& center, double region_radius,
                                 double alpha);

struct BoundaryDecayReport {
  DecayReport decay;  // half-ball renormalized quantities, data_norm filled
};

// Half-ball decay profile at a point on the flat boundary face of a
// half-ball domain; N(u_b;B'_r) from tangential differences of the boundary
// plane data.
BoundaryDecayReport boundary_decay_profile(const Field& f, double eps,
                                           const ElasticModel& model, const Potential& pot,
                                           const Vec3& x0_prime,
                                           const std::vector<double>& radii,
                                           double delta = 0.0);

struct DefectComponent {
  Vec3 center{};
  int size = 0;
  std::vector<std::uint32_t> nodes;
};

struct DefectSet {
  double tau;
  double beta_threshold;
  std::vector<std::uint32_t> nodes;
  std::vector<DefectComponent> components;
};

// Nodes with dist_to_N > tau, or biaxiality > 0.9 in the Q-tensor model;
// 6-connected components with centroid centers.
DefectSet detect_defects(const Field& f, const Potential& pot, double tau);

struct ConvergenceRow {
  double epsilon;
  double h1_increment;       // to the previous stage
  double linf_to_final;      // outside exclusion balls around final defects
  double sup_norm;           // (A3a) witness column
  int defect_components;
};

// Stage-by-stage convergence metrics for a sweep; exclusion balls of the
// given radius are removed around the final stage's defect components.
std::vector<ConvergenceRow> convergence_report(const SweepResult& sweep,
                                               const Potential& pot, double tau,
                                               double exclusion_radius);

}  // namespace epsflow
