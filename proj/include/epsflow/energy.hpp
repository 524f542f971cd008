#pragma once

#include "epsflow/elastic.hpp"
#include "epsflow/field.hpp"
#include "epsflow/manifold.hpp"

namespace epsflow {

struct EnergyBreakdown {
  double elastic = 0.0;    // int W(x, grad u) a(x)
  double potential = 0.0;  // int f(u) a(x), unscaled
  double total = 0.0;      // elastic + potential / eps^2
};

// Node-localized variational elastic density: forward/backward face
// differences averaged for the axis-aligned blocks, central differences for
// the mixed blocks. Exact on affine fields, second-order on smooth ones, and
// consistent with the solver's variational quadrature.
double variational_node_density(const Field& f, const ElasticModel& model,
                                std::size_t idx);

// Plain |grad u|^2 by the same staggered-face convention.
double dirichlet_node_density(const Field& f, std::size_t idx);

// Midpoint node quadrature with partial-volume mask weights. Diagnostic
// quadrature used by all renormalized-energy reports.
EnergyBreakdown energy(const Field& f, double eps, const ElasticModel& model,
                       const Potential& pot, const Mask& mask);

// r^{2-n} E_eps(B_r(center)) with n = 3.
double renormalized_energy(const Field& f, double eps, const ElasticModel& model,
                           const Potential& pot, const Vec3& center, double r);

// Plain Dirichlet part: sum of w * |grad u|^2 * h^3 over the mask.
double masked_dirichlet_energy(const Field& f, const Mask& mask);

// Variational elastic energy: forward differences on staggered faces for the
// axis-aligned blocks, node-centered central differences for the mixed
// blocks. Its exact nodal gradient is the discrete divergence-form operator.
double elastic_energy_variational(const Field& f, const ElasticModel& model);

// Accumulates scale * d(elastic_energy_variational)/d(u) into out.
void elastic_gradient_accumulate(const Field& f, const ElasticModel& model, double scale,
                                 std::vector<double>& out);

// (1/h^3) d(elastic_energy_variational)/du at every node; satisfies
// <apply(u), v>_h = d/dt|_0 elastic_energy_variational(u + t v).
Field elastic_operator_apply(const Field& f, const ElasticModel& model);

}  // namespace epsflow
